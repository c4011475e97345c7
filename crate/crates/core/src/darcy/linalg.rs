//! Symmetric positive-definite solvers for the head system.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Symmetric banded matrix stored by lower diagonals: `band[i][d] = A[i][i - d]`.
#[derive(Clone, Debug)]
pub(crate) struct Banded<S> {
    pub bw: usize,
    pub band: Vec<Vec<S>>,
}

impl<S: Scalar> Banded<S> {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { bw, band: vec![vec![S::zero(); bw + 1]; n] }
    }

    pub fn len(&self) -> usize {
        self.band.len()
    }

    /// Adds `v` to `A[i][j]` (and its mirror).
    pub fn add(&mut self, i: usize, j: usize, v: S) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bw, "entry outside band");
        let e = &mut self.band[hi][d];
        *e = e.clone() + v;
    }

    fn get(&self, i: usize, j: usize) -> S {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bw {
            S::zero()
        } else {
            self.band[hi][d].clone()
        }
    }

    pub fn mul(&self, x: &[S]) -> Vec<S> {
        let n = self.len();
        let mut y = vec![S::zero(); n];
        for i in 0..n {
            y[i] = y[i].clone() + self.band[i][0].clone() * x[i].clone();
            for d in 1..=self.bw.min(i) {
                let a = self.band[i][d].clone();
                if a.is_zero() {
                    continue;
                }
                y[i] = y[i].clone() + a.clone() * x[i - d].clone();
                y[i - d] = y[i - d].clone() + a * x[i].clone();
            }
        }
        y
    }

    /// Square-root-free `L D Lᵀ` factorization followed by two triangular
    /// solves. Works over any ordered field, so rational systems solve exactly.
    pub fn solve_ldlt(&self, b: &[S]) -> Result<Vec<S>> {
        let n = self.len();
        let bw = self.bw;
        // l[i][d] = L[i][i - d] for d >= 1
        let mut l = vec![vec![S::zero(); bw + 1]; n];
        let mut dg = vec![S::zero(); n];
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            for j in lo..i {
                let mut s = self.get(i, j);
                for k in lo.max(j.saturating_sub(bw))..j {
                    s = s - l[i][i - k].clone() * dg[k].clone() * l[j][j - k].clone();
                }
                l[i][i - j] = s / dg[j].clone();
            }
            let mut d = self.get(i, i);
            for k in lo..i {
                let lik = l[i][i - k].clone();
                d = d - lik.clone() * lik * dg[k].clone();
            }
            if !(d > S::zero()) {
                return Err(Error::IllPosed("head system is not positive definite".into()));
            }
            dg[i] = d;
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for k in i.saturating_sub(bw)..i {
                y[i] = y[i].clone() - l[i][i - k].clone() * y[k].clone();
            }
        }
        for i in 0..n {
            y[i] = y[i].clone() / dg[i].clone();
        }
        for i in (0..n).rev() {
            for k in i + 1..n.min(i + bw + 1) {
                y[i] = y[i].clone() - l[k][k - i].clone() * y[k].clone();
            }
        }
        Ok(y)
    }

    /// Jacobi-preconditioned conjugate gradients to relative residual `tol`.
    pub fn solve_cg(&self, b: &[S], tol: S) -> Result<Vec<S>> {
        let n = self.len();
        let dot = |u: &[S], v: &[S]| u.iter().zip(v).fold(S::zero(), |a, (p, q)| a + p.clone() * q.clone());
        for i in 0..n {
            if !(self.band[i][0] > S::zero()) {
                return Err(Error::IllPosed("head system has a non-positive diagonal".into()));
            }
        }
        let mut x = vec![S::zero(); n];
        let mut r = b.to_vec();
        let bb = dot(b, b);
        if bb.is_zero() {
            return Ok(x);
        }
        let target = tol.clone() * tol * bb;
        let mut z: Vec<S> = r.iter().zip(&self.band).map(|(ri, row)| ri.clone() / row[0].clone()).collect();
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        for _ in 0..10 * n + 100 {
            let ap = self.mul(&p);
            let pap = dot(&p, &ap);
            if !(pap > S::zero()) {
                return Err(Error::IllPosed("head system is not positive definite".into()));
            }
            let alpha = rz.clone() / pap;
            for i in 0..n {
                x[i] = x[i].clone() + alpha.clone() * p[i].clone();
                r[i] = r[i].clone() - alpha.clone() * ap[i].clone();
            }
            if dot(&r, &r) <= target {
                return Ok(x);
            }
            for i in 0..n {
                z[i] = r[i].clone() / self.band[i][0].clone();
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new.clone() / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i].clone() + beta.clone() * p[i].clone();
            }
        }
        Err(Error::IllPosed("conjugate gradients did not converge".into()))
    }
}
