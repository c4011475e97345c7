use std::collections::BTreeMap;

use crate::darcy::{HeadDifferences, HeadField, Shape, Stencil};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Qubo;

/// Closed-form objective for a line from its head drops.
///
/// `b_i = -dh_i dh_{i+1} dk` on consecutive cells and
/// `a_i = dh_i (k_L ((dh_i - dh_{i+1}) - (dh_{i-1} - dh_i)) + dk dh_i)` inside
/// the line. A cell at either end sits next to one measured node rather than
/// two, so it keeps only the neighbour difference that exists and half of the
/// `dk dh_i` term. This is the squared conservative residual divided by
/// `2 dk`, without its constant part.
pub fn build_qubo_1d<S: Scalar>(dh: &HeadDifferences<S>, k_low: S, dk: S) -> Result<Qubo<S>> {
    if !matches!(dh.shape, Shape::Line(_)) {
        return Err(Error::shape("closed form needs a line"));
    }
    let d = &dh.values;
    let n = d.len();
    if n < 2 {
        return Err(Error::param("need at least two cells"));
    }
    if !(dk > S::zero()) {
        return Err(Error::param("dk must be positive"));
    }
    let half = S::lit(0.5);
    let mut t = Terms::new(n);
    for i in 0..n {
        let mut grad = S::zero();
        let mut grad_abs = S::zero();
        let mut self_term = S::zero();
        if i > 0 {
            let g = d[i - 1].clone() - d[i].clone();
            grad_abs = grad_abs + d[i - 1].abs() + d[i].abs();
            grad = grad - g;
            self_term = self_term + half.clone();
        }
        if i + 1 < n {
            let g = d[i].clone() - d[i + 1].clone();
            grad_abs = grad_abs + d[i].abs() + d[i + 1].abs();
            grad = grad + g;
            self_term = self_term + half.clone();
        }
        let own = dk.clone() * d[i].clone() * self_term;
        let scale = d[i].abs() * (k_low.abs() * grad_abs + own.abs());
        t.linear(i, d[i].clone() * (k_low.clone() * grad + own), scale);
        if i + 1 < n {
            let b = -(d[i].clone() * d[i + 1].clone() * dk.clone());
            t.quadratic(i, i + 1, b.clone(), b.abs());
        }
    }
    let q = t.finish();
    Ok(q)
}

/// Sum over measured nodes of the squared flow residual, written as a
/// polynomial in the indicators. Nonnegative, and zero at the field that
/// produced noiseless heads under the same stencil.
pub fn build_qubo_residual<S: Scalar>(heads: &HeadField<S>, k_low: S, dk: S, stencil: Stencil) -> Result<Qubo<S>> {
    if !(dk > S::zero()) {
        return Err(Error::param("dk must be positive"));
    }
    let shape = heads.shape;
    let interior = shape.interior_nodes();
    if interior.is_empty() {
        return Err(Error::param("grid has no interior nodes"));
    }
    let c: S = stencil.diagonal();
    let two = S::lit(2.0);
    let mut t = Terms::new(shape.link_count());
    let mut offset = S::zero();
    for p in interior {
        let mut c0 = S::zero();
        let mut c0_abs = S::zero();
        let mut alpha = Vec::with_capacity(4);
        for (l, m, axis) in shape.node_links(p) {
            let g = (c.clone() * heads.h[p].clone() - heads.h[m].clone()) / heads.spacing_sq(axis);
            c0 = c0 + k_low.clone() * g.clone();
            c0_abs = c0_abs + (k_low.clone() * g.clone()).abs();
            alpha.push((l, dk.clone() * g));
        }
        offset = offset + c0.clone() * c0.clone();
        for (a, (la, va)) in alpha.iter().enumerate() {
            let sq = va.clone() * va.clone();
            let scale = two.clone() * c0_abs.clone() * va.abs() + sq.clone();
            t.linear(*la, two.clone() * c0.clone() * va.clone() + sq, scale);
            for (lb, vb) in &alpha[a + 1..] {
                let v = two.clone() * va.clone() * vb.clone();
                t.quadratic(*la, *lb, v.clone(), v.abs());
            }
        }
    }
    let mut q = t.finish();
    q.set_offset(offset);
    Ok(q)
}

/// Accumulates coefficients together with the magnitude of what went into
/// them, so that sums which cancel analytically come out as exact zeros
/// instead of rounding residue.
struct Terms<S: Scalar> {
    q: Qubo<S>,
    lin_scale: BTreeMap<usize, S>,
    quad_scale: BTreeMap<(usize, usize), S>,
}

impl<S: Scalar> Terms<S> {
    fn new(n: usize) -> Self {
        Self { q: Qubo::new(n), lin_scale: BTreeMap::new(), quad_scale: BTreeMap::new() }
    }

    fn linear(&mut self, i: usize, c: S, scale: S) {
        self.q.add_linear(i, c);
        let e = self.lin_scale.entry(i).or_insert_with(S::zero);
        *e = e.clone() + scale;
    }

    fn quadratic(&mut self, i: usize, j: usize, c: S, scale: S) {
        self.q.add_quadratic(i, j, c);
        let e = self.quad_scale.entry((i.min(j), i.max(j))).or_insert_with(S::zero);
        *e = e.clone() + scale;
    }

    fn finish(mut self) -> Qubo<S> {
        let slack = S::rounding_slack();
        for (i, scale) in &self.lin_scale {
            let c = self.q.linear(*i);
            if !c.is_zero() && c.abs() <= slack.clone() * scale.clone() {
                self.q.add_linear(*i, -c);
            }
        }
        for ((i, j), scale) in &self.quad_scale {
            let c = self.q.quadratic(*i, *j);
            if !c.is_zero() && c.abs() <= slack.clone() * scale.clone() {
                self.q.add_quadratic(*i, *j, -c);
            }
        }
        self.q
    }
}
