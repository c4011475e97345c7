use std::collections::HashMap;

use rand::Rng;

use super::decompose::{Decomposition, Subset};
use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::{Real, Scalar};
use crate::seed;

struct Factor<S> {
    scope: Vec<usize>,
    table: Vec<S>,
}

/// Per eliminated variable: the later variables it depends on and the value
/// of each `(x_v, scope)` combination, indexed `x_v + 2 * scope_bits`.
struct Bucket<S> {
    var: usize,
    scope: Vec<usize>,
    table: Vec<S>,
}

/// Bucket elimination of the sub-QUBO on `subset`, conditioned on `x`
/// outside it. `combine` folds the two values of an eliminated variable into
/// a message.
fn eliminate<S: Scalar>(
    adj: &[Vec<(usize, S)>],
    q: &Qubo<S>,
    subset: &Subset,
    x: &[u8],
    combine: &dyn Fn(&S, &S) -> S,
) -> Vec<Bucket<S>> {
    let pos: HashMap<usize, usize> = subset.order.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let m = subset.order.len();
    let mut pending: Vec<Vec<Factor<S>>> = (0..m).map(|_| Vec::new()).collect();
    let mut buckets = Vec::with_capacity(m);
    for (k, &v) in subset.order.iter().enumerate() {
        let scope: Vec<usize> = subset.tree.bags[k][1..].to_vec();
        let mut unary = q.linear(v);
        let mut pairs: Vec<(usize, S)> = Vec::new();
        for (u, b) in &adj[v] {
            match pos.get(u) {
                None if x[*u] == 1 => unary = unary + b.clone(),
                None => {}
                Some(&p) if p > k => {
                    let slot = scope.iter().position(|w| w == u).expect("neighbour outside bag");
                    pairs.push((slot, b.clone()));
                }
                Some(_) => {}
            }
        }
        let factors = std::mem::take(&mut pending[k]);
        // bit of each factor variable inside (x_v, scope)
        let maps: Vec<Vec<Option<usize>>> = factors
            .iter()
            .map(|f| f.scope.iter().map(|w| if *w == v { None } else { scope.iter().position(|s| s == w) }).collect())
            .collect();
        let width = scope.len();
        let mut table = Vec::with_capacity(2 << width);
        for idx in 0..(1usize << width) {
            for xv in 0..2usize {
                let mut val = if xv == 1 { unary.clone() } else { S::zero() };
                if xv == 1 {
                    for (slot, b) in &pairs {
                        if idx >> slot & 1 == 1 {
                            val = val + b.clone();
                        }
                    }
                }
                for (f, map) in factors.iter().zip(&maps) {
                    let mut fi = 0;
                    for (bit, slot) in map.iter().enumerate() {
                        let on = match slot {
                            None => xv == 1,
                            Some(s) => idx >> s & 1 == 1,
                        };
                        if on {
                            fi |= 1 << bit;
                        }
                    }
                    val = val + f.table[fi].clone();
                }
                table.push(val);
            }
        }
        if !scope.is_empty() {
            let message: Vec<S> = (0..(1usize << width)).map(|i| combine(&table[2 * i], &table[2 * i + 1])).collect();
            let first = scope.iter().map(|w| pos[w]).min().unwrap();
            pending[first].push(Factor { scope: scope.clone(), table: message });
        }
        buckets.push(Bucket { var: v, scope, table });
    }
    buckets
}

/// Assigns the subset in reverse elimination order; `choose` picks `x_v`
/// from the values at 0 and 1.
fn back_substitute<S>(buckets: &[Bucket<S>], x: &mut [u8], mut choose: impl FnMut(&S, &S) -> u8) {
    for b in buckets.iter().rev() {
        let idx = b.scope.iter().enumerate().fold(0, |acc, (i, &w)| acc | (x[w] as usize) << i);
        x[b.var] = choose(&b.table[2 * idx], &b.table[2 * idx + 1]);
    }
}

fn check<S: Scalar>(q: &Qubo<S>, x: &[u8], d: &Decomposition) -> Result<()> {
    if x.len() != q.n() || d.coverage.len() != q.n() {
        return Err(Error::shape("assignment, decomposition and QUBO disagree in size"));
    }
    Ok(())
}

/// Repeatedly re-solves each subset exactly with everything else held at
/// its current value, keeping a result only when the total energy strictly
/// drops, until a full pass changes nothing.
pub fn optimize_local<S: Scalar>(q: &Qubo<S>, x: &[u8], d: &Decomposition) -> Result<Vec<u8>> {
    check(q, x, d)?;
    let adj = q.adjacency();
    let mut x = x.to_vec();
    let mut e = q.energy_unchecked(&x);
    let min = |a: &S, b: &S| if b < a { b.clone() } else { a.clone() };
    loop {
        let mut improved = false;
        for s in &d.subsets {
            let buckets = eliminate(&adj, q, s, &x, &min);
            let mut y = x.clone();
            back_substitute(&buckets, &mut y, |a, b| u8::from(b < a));
            let ey = q.energy_unchecked(&y);
            if ey < e {
                x = y;
                e = ey;
                improved = true;
            }
        }
        if !improved {
            return Ok(x);
        }
    }
}

/// One pass over the subsets, redrawing each from its exact conditional
/// Boltzmann distribution at temperature `t`.
pub fn boltzmann_sample_local<S: Real>(q: &Qubo<S>, x: &[u8], d: &Decomposition, t: S, seed: u64) -> Result<Vec<u8>> {
    check(q, x, d)?;
    if !(t > S::zero()) {
        return Err(Error::param("temperature must be positive"));
    }
    let adj = q.adjacency();
    let mut rng = seed::rng(seed);
    let mut x = x.to_vec();
    let softmin = |a: &S, b: &S| {
        let lo = a.min(*b);
        lo - t * ((-(*a - lo) / t).exp() + (-(*b - lo) / t).exp()).ln()
    };
    for s in &d.subsets {
        let buckets = eliminate(&adj, q, s, &x, &softmin);
        back_substitute(&buckets, &mut x, |a, b| {
            let p1 = S::one() / (S::one() + ((*b - *a) / t).exp());
            let u: f64 = rng.random();
            u8::from(u < p1.approx())
        });
    }
    Ok(x)
}
