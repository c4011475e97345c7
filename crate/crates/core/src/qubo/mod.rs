//! Quadratic binary objectives.

mod build;
mod oracle;
mod spectrum;

pub use build::{build_qubo_1d, build_qubo_residual};
pub use oracle::{accuracy, brute_force_min, chain_exact_min, decode_permeability, BRUTE_FORCE_LIMIT};
pub use spectrum::{coefficient_spectrum, SpectrumReport};

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `offset + sum_i a_i x_i + sum_{i<j} b_ij x_i x_j` over `x in {0,1}^n`.
///
/// Zero coefficients are never stored and pair keys are kept as `(i, j)`
/// with `i < j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "QuboRepr<S>",
    into = "QuboRepr<S>",
    bound(serialize = "S: Scalar + Serialize", deserialize = "S: Scalar + DeserializeOwned")
)]
pub struct Qubo<S: Scalar> {
    n: usize,
    offset: S,
    linear: BTreeMap<usize, S>,
    quadratic: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> Qubo<S> {
    pub fn new(n: usize) -> Self {
        Self { n, offset: S::zero(), linear: BTreeMap::new(), quadratic: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn offset(&self) -> &S {
        &self.offset
    }

    pub fn set_offset(&mut self, c: S) {
        self.offset = c;
    }

    pub fn add_offset(&mut self, c: S) {
        self.offset = self.offset.clone() + c;
    }

    pub fn add_linear(&mut self, i: usize, c: S) {
        assert!(i < self.n, "variable {i} out of range");
        accumulate(&mut self.linear, i, c);
    }

    /// Adds `c x_i x_j`; `i == j` folds into the linear term since `x^2 = x`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, c: S) {
        assert!(i < self.n && j < self.n, "pair ({i}, {j}) out of range");
        if i == j {
            self.add_linear(i, c);
        } else {
            accumulate(&mut self.quadratic, (i.min(j), i.max(j)), c);
        }
    }

    pub fn linear(&self, i: usize) -> S {
        self.linear.get(&i).cloned().unwrap_or_else(S::zero)
    }

    pub fn quadratic(&self, i: usize, j: usize) -> S {
        self.quadratic.get(&(i.min(j), i.max(j))).cloned().unwrap_or_else(S::zero)
    }

    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, &S)> {
        self.linear.iter().map(|(&i, c)| (i, c))
    }

    pub fn quadratic_terms(&self) -> impl Iterator<Item = (usize, usize, &S)> {
        self.quadratic.iter().map(|(&(i, j), c)| (i, j, c))
    }

    pub fn num_linear(&self) -> usize {
        self.linear.len()
    }

    pub fn num_quadratic(&self) -> usize {
        self.quadratic.len()
    }

    pub fn is_zero(&self) -> bool {
        self.linear.is_empty() && self.quadratic.is_empty()
    }

    pub fn energy(&self, x: &[u8]) -> Result<S> {
        if x.len() != self.n {
            return Err(Error::shape(format!("assignment of length {} for {} variables", x.len(), self.n)));
        }
        Ok(self.energy_unchecked(x))
    }

    pub(crate) fn energy_unchecked(&self, x: &[u8]) -> S {
        let mut e = self.offset.clone();
        for (&i, c) in &self.linear {
            if x[i] == 1 {
                e = e + c.clone();
            }
        }
        for (&(i, j), c) in &self.quadratic {
            if x[i] == 1 && x[j] == 1 {
                e = e + c.clone();
            }
        }
        e
    }

    /// Neighbour lists with coupling strengths, both directions.
    pub fn adjacency(&self) -> Vec<Vec<(usize, S)>> {
        let mut adj = vec![Vec::new(); self.n];
        for (&(i, j), c) in &self.quadratic {
            adj[i].push((j, c.clone()));
            adj[j].push((i, c.clone()));
        }
        adj
    }

    pub fn max_abs_coefficient(&self) -> S {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .fold(S::zero(), |m, c| S::max_of(m, c.abs()))
    }

    /// `max |c| / min |c|` over stored coefficients, `None` when there are none.
    pub fn dynamic_range(&self) -> Option<f64> {
        let mags = self.linear.values().chain(self.quadratic.values()).map(|c| c.abs().approx());
        let (lo, hi) = mags.fold((f64::INFINITY, 0.0f64), |(lo, hi), m| (lo.min(m), hi.max(m)));
        (hi > 0.0).then(|| hi / lo)
    }

    /// Multiplies every coefficient and the offset by `c`.
    pub fn scaled(&self, c: &S) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    /// Converts coefficients to another scalar type.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Qubo<T> {
        let mut out = Qubo::new(self.n);
        out.offset = f(&self.offset);
        for (&i, c) in &self.linear {
            out.add_linear(i, f(c));
        }
        for (&(i, j), c) in &self.quadratic {
            out.add_quadratic(i, j, f(c));
        }
        out
    }

    /// Sum of absolute coefficients plus `|offset|`; a scale for tolerances.
    pub(crate) fn magnitude(&self) -> S {
        self.linear
            .values()
            .chain(self.quadratic.values())
            .fold(self.offset.abs(), |m, c| m + c.abs())
    }
}

fn accumulate<K: Ord, S: Scalar>(map: &mut BTreeMap<K, S>, key: K, c: S) {
    if c.is_zero() {
        return;
    }
    let v = match map.remove(&key) {
        Some(old) => old + c,
        None => c,
    };
    if !v.is_zero() {
        map.insert(key, v);
    }
}

#[derive(Serialize, Deserialize)]
struct QuboRepr<S> {
    n: usize,
    offset: S,
    linear: BTreeMap<String, S>,
    quadratic: BTreeMap<String, S>,
}

impl<S: Scalar> From<Qubo<S>> for QuboRepr<S> {
    fn from(q: Qubo<S>) -> Self {
        QuboRepr {
            n: q.n,
            offset: q.offset,
            linear: q.linear.into_iter().map(|(i, c)| (i.to_string(), c)).collect(),
            quadratic: q.quadratic.into_iter().map(|((i, j), c)| (format!("{i},{j}"), c)).collect(),
        }
    }
}

impl<S: Scalar> TryFrom<QuboRepr<S>> for Qubo<S> {
    type Error = Error;
    fn try_from(r: QuboRepr<S>) -> Result<Self> {
        let idx = |s: &str| -> Result<usize> {
            let i: usize = s.trim().parse().map_err(|_| Error::param(format!("bad variable index {s:?}")))?;
            if i >= r.n {
                return Err(Error::param(format!("variable {i} out of range")));
            }
            Ok(i)
        };
        let mut q = Qubo::new(r.n);
        q.offset = r.offset.clone();
        for (k, c) in &r.linear {
            q.add_linear(idx(k)?, c.clone());
        }
        for (k, c) in &r.quadratic {
            let (a, b) = k.split_once(',').ok_or_else(|| Error::param(format!("bad pair key {k:?}")))?;
            q.add_quadratic(idx(a)?, idx(b)?, c.clone());
        }
        Ok(q)
    }
}
