use crate::darcy::PermeabilityField;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Qubo;

pub const BRUTE_FORCE_LIMIT: usize = 24;

/// Exhaustive minimum by Gray-code enumeration. Among minimizers (up to
/// rounding) the lexicographically smallest assignment wins.
pub fn brute_force_min<S: Scalar>(q: &Qubo<S>) -> Result<(Vec<u8>, S)> {
    let n = q.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Size(format!("{n} variables exceeds the exhaustive limit of {BRUTE_FORCE_LIMIT}")));
    }
    let lin: Vec<S> = (0..n).map(|i| q.linear(i)).collect();
    let adj = q.adjacency();
    let tol = S::rounding_slack() * q.magnitude();
    let mut x = vec![0u8; n];
    let mut e = q.offset().clone();
    let mut best = x.clone();
    let mut best_e = e.clone();
    for step in 1u64..(1u64 << n) {
        let i = step.trailing_zeros() as usize;
        let mut field = lin[i].clone();
        for (j, c) in &adj[i] {
            if x[*j] == 1 {
                field = field + c.clone();
            }
        }
        if x[i] == 0 {
            x[i] = 1;
            e = e + field;
        } else {
            x[i] = 0;
            e = e - field;
        }
        if e < best_e.clone() - tol.clone() || (e <= best_e.clone() + tol.clone() && x < best) {
            best.copy_from_slice(&x);
            best_e = e.clone();
        }
    }
    let e = q.energy_unchecked(&best);
    Ok((best, e))
}

/// Exact minimum when the couplings form vertex-disjoint simple paths, by
/// dynamic programming along each path.
///
/// Ties go to 0, deciding variables in path order from the lower-numbered
/// end. For a path visited in index order (a 1D chain) this is the
/// lexicographic rule of [`brute_force_min`].
pub fn chain_exact_min<S: Scalar>(q: &Qubo<S>) -> Result<(Vec<u8>, S)> {
    let n = q.n();
    let adj = q.adjacency();
    if let Some(v) = (0..n).find(|&v| adj[v].len() > 2) {
        return Err(Error::Structure(format!("variable {v} has {} couplings", adj[v].len())));
    }
    let tol = S::rounding_slack() * q.magnitude();
    let mut x = vec![0u8; n];
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] || adj[start].len() == 2 {
            continue;
        }
        // walk from an endpoint
        let mut path = vec![start];
        seen[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        while let Some(&(next, _)) = adj[cur].iter().find(|(u, _)| *u != prev) {
            prev = cur;
            cur = next;
            seen[cur] = true;
            path.push(cur);
        }
        solve_path(q, &path, &tol, &mut x);
    }
    if let Some(v) = seen.iter().position(|s| !s) {
        return Err(Error::Structure(format!("variable {v} lies on a cycle")));
    }
    let e = q.energy_unchecked(&x);
    Ok((x, e))
}

fn solve_path<S: Scalar>(q: &Qubo<S>, path: &[usize], tol: &S, x: &mut [u8]) {
    let m = path.len();
    let coupling = |t: usize| q.quadratic(path[t], path[t + 1]);
    // g[t][b]: best energy of path[t..] given x[path[t]] = b
    let mut g = vec![[S::zero(), S::zero()]; m];
    for t in (0..m).rev() {
        let a = q.linear(path[t]);
        for b in 0..2 {
            let own = if b == 1 { a.clone() } else { S::zero() };
            let rest = if t + 1 < m {
                let j = if b == 1 { coupling(t) } else { S::zero() };
                let (g0, g1) = (g[t + 1][0].clone(), g[t + 1][1].clone());
                let with_one = j + g1;
                if with_one < g0 {
                    with_one
                } else {
                    g0
                }
            } else {
                S::zero()
            };
            g[t][b] = own + rest;
        }
    }
    let mut last = 0u8;
    for t in 0..m {
        let j = if t > 0 && last == 1 { coupling(t - 1) } else { S::zero() };
        let c0 = g[t][0].clone();
        let c1 = j + g[t][1].clone();
        last = if c1 < c0 - tol.clone() { 1 } else { 0 };
        x[path[t]] = last;
    }
}

/// The field with `q = x` on the template's grid and permeability levels.
pub fn decode_permeability<S: Scalar>(x: &[u8], template: &PermeabilityField<S>) -> Result<PermeabilityField<S>> {
    PermeabilityField::new(template.shape, template.k_low.clone(), template.k_high.clone(), x.to_vec())
}

/// Fraction of cells whose indicator matches.
pub fn accuracy<S: Scalar>(estimate: &PermeabilityField<S>, truth: &PermeabilityField<S>) -> Result<f64> {
    if estimate.shape != truth.shape {
        return Err(Error::shape("fields differ in shape"));
    }
    let hits = estimate.q.iter().zip(&truth.q).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.q.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darcy::Shape;

    #[test]
    fn single_variable() {
        let mut q = Qubo::<f64>::new(1);
        q.add_linear(0, 1.0);
        assert_eq!(brute_force_min(&q).unwrap().0, vec![0]);
        let mut q = Qubo::<f64>::new(1);
        q.add_linear(0, -1.0);
        assert_eq!(brute_force_min(&q).unwrap(), (vec![1], -1.0));
    }

    #[test]
    fn ties_prefer_zeros() {
        let mut q = Qubo::<f64>::new(5);
        q.set_offset(2.0);
        assert_eq!(brute_force_min(&q).unwrap(), (vec![0; 5], 2.0));
        assert_eq!(chain_exact_min(&q).unwrap(), (vec![0; 5], 2.0));
        // x0 xor x1 both optimal: lexicographic choice is (0, 1)
        let mut q = Qubo::<f64>::new(2);
        q.add_linear(0, -1.0);
        q.add_linear(1, -1.0);
        q.add_quadratic(0, 1, 2.0);
        assert_eq!(brute_force_min(&q).unwrap().0, vec![0, 1]);
        assert_eq!(chain_exact_min(&q).unwrap().0, vec![0, 1]);
    }

    #[test]
    fn limits() {
        assert!(matches!(brute_force_min(&Qubo::<f64>::new(25)), Err(Error::Size(_))));
        let mut q = Qubo::<f64>::new(3);
        q.add_quadratic(0, 1, 1.0);
        q.add_quadratic(1, 2, 1.0);
        q.add_quadratic(0, 2, 1.0);
        assert!(matches!(chain_exact_min(&q), Err(Error::Structure(_))));
        let mut q = Qubo::<f64>::new(4);
        for j in 1..4 {
            q.add_quadratic(0, j, 1.0);
        }
        assert!(matches!(chain_exact_min(&q), Err(Error::Structure(_))));
    }

    #[test]
    fn decode_and_score() {
        let t = PermeabilityField::new(Shape::Line(4), 1.0, 3.0, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(decode_permeability(&[0; 4], &t).unwrap().k_values(), vec![1.0; 4]);
        assert_eq!(decode_permeability(&[1; 4], &t).unwrap().k_values(), vec![3.0; 4]);
        assert_eq!(decode_permeability(&t.q, &t).unwrap(), t);
        assert!(decode_permeability(&[0; 3], &t).is_err());
        assert_eq!(accuracy(&t, &t).unwrap(), 1.0);
        let c = decode_permeability(&[1, 0, 0, 1], &t).unwrap();
        assert_eq!(accuracy(&c, &t).unwrap(), 0.0);
    }
}
