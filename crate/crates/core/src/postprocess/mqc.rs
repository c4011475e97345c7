use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::Scalar;

/// Connected components of the variables where `a` and `b` differ, linked
/// by the couplers of `q`, each sorted and listed by smallest member.
pub fn disagreement_components<S: Scalar>(q: &Qubo<S>, a: &[u8], b: &[u8]) -> Vec<Vec<usize>> {
    let adj = q.adjacency();
    let n = q.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if a[s] == b[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for (u, _) in &adj[v] {
                if a[*u] != b[*u] && !seen[*u] {
                    seen[*u] = true;
                    comp.push(*u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Energy of the terms touching `comp` when it takes its values from
/// `donor` and every other variable reads from `x`.
fn component_energy<S: Scalar>(q: &Qubo<S>, adj: &[Vec<(usize, S)>], comp: &[usize], donor: &[u8], x: &[u8], inside: &[bool]) -> S {
    let mut e = S::zero();
    for &i in comp {
        if donor[i] == 0 {
            continue;
        }
        e = e + q.linear(i);
        for (j, c) in &adj[i] {
            let other = if inside[*j] { donor[*j] } else { x[*j] };
            // couplers inside the component are seen from both ends
            if other == 1 && (!inside[*j] || i < *j) {
                e = e + c.clone();
            }
        }
    }
    e
}

/// Fuses two assignments: agreed variables are kept, and each disagreement
/// component takes the values of whichever input gives it lower energy
/// against the agreed variables, `a` on ties.
pub fn mqc_pair<S: Scalar>(q: &Qubo<S>, a: &[u8], b: &[u8]) -> Result<Vec<u8>> {
    if a.len() != q.n() || b.len() != q.n() {
        return Err(Error::shape("assignments must match the QUBO size"));
    }
    let adj = q.adjacency();
    let mut out = a.to_vec();
    let mut inside = vec![false; q.n()];
    for comp in disagreement_components(q, a, b) {
        comp.iter().for_each(|&i| inside[i] = true);
        let ea = component_energy(q, &adj, &comp, a, a, &inside);
        let eb = component_energy(q, &adj, &comp, b, a, &inside);
        if eb < ea {
            comp.iter().for_each(|&i| out[i] = b[i]);
        }
        comp.iter().for_each(|&i| inside[i] = false);
    }
    Ok(out)
}

/// Halves the sample list by fusing neighbours `(0, 1), (2, 3), ...` until
/// one assignment remains; an odd last sample moves up unchanged.
pub fn mqc<S: Scalar>(q: &Qubo<S>, samples: &[Vec<u8>]) -> Result<Vec<u8>> {
    if samples.is_empty() {
        return Err(Error::param("mqc needs at least one sample"));
    }
    let mut round: Vec<Vec<u8>> = samples.to_vec();
    while round.len() > 1 {
        let mut next = Vec::with_capacity(round.len().div_ceil(2));
        for pair in round.chunks(2) {
            match pair {
                [a, b] => next.push(mqc_pair(q, a, b)?),
                [a] => next.push(a.clone()),
                _ => unreachable!(),
            }
        }
        round = next;
    }
    let x = round.pop().unwrap();
    if x.len() != q.n() {
        return Err(Error::shape("sample does not match the QUBO size"));
    }
    Ok(x)
}
