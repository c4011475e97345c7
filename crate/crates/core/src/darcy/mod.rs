//! Steady Darcy flow on binary permeability fields.

mod field;
mod linalg;

pub use field::{Axis, BoundaryCondition, HeadDifferences, HeadField, PermeabilityField, Shape};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::seed;
use linalg::Banded;

/// Finite-difference stencil for `div(k grad h) = 0`.
///
/// At an interior node `p` with links `l` to neighbours `m`, the residual is
/// `sum_l k_l (c h_p - h_m) / d_l^2` with `c = 1` for [`Stencil::Conservative`]
/// and `c = 2` for [`Stencil::DoubledDiagonal`]. Only the conservative form
/// keeps the flux `k_i dh_i` constant along a line; the doubled form is kept
/// for comparison.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stencil {
    #[default]
    Conservative,
    DoubledDiagonal,
}

impl Stencil {
    pub(crate) fn diagonal<S: Scalar>(self) -> S {
        match self {
            Stencil::Conservative => S::one(),
            Stencil::DoubledDiagonal => S::lit(2.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions<S> {
    pub stencil: Stencil,
    pub dx: S,
    pub dy: S,
    /// `None` means [`BoundaryCondition::unit_gradient`].
    pub bc: Option<BoundaryCondition<S>>,
}

impl<S: Scalar> Default for SolveOptions<S> {
    fn default() -> Self {
        Self { stencil: Stencil::default(), dx: S::one(), dy: S::one(), bc: None }
    }
}

/// Draws each indicator from a fair coin. `k_high == k_low` is allowed and
/// gives a constant field.
pub fn sample_permeability<S: Scalar>(shape: Shape, k_low: S, k_high: S, seed: u64) -> Result<PermeabilityField<S>> {
    shape.validate()?;
    let mut rng = seed::rng(seed);
    let q = (0..shape.link_count()).map(|_| rng.random_bool(0.5) as u8).collect();
    PermeabilityField::new(shape, k_low, k_high, q)
}

/// Solves for the heads at every interior node.
pub fn solve_heads<S: Scalar>(field: &PermeabilityField<S>, opts: &SolveOptions<S>) -> Result<HeadField<S>> {
    let shape = field.shape;
    let bc = opts.bc.clone().unwrap_or_else(|| BoundaryCondition::unit_gradient(&shape));
    bc.fixed()?;
    let mut h = vec![S::zero(); shape.node_count()];
    for (node, v) in h.iter_mut().enumerate() {
        if shape.is_boundary(node) {
            *v = bc.value_at(&shape, node)?;
        }
    }
    let dy = if shape.dims() == 1 { S::one() } else { opts.dy.clone() };
    let out = HeadField::new(shape, opts.dx.clone(), dy, bc, h)?;
    let interior = shape.interior_nodes();
    if interior.is_empty() {
        return Ok(out);
    }
    let mut unknown = vec![usize::MAX; shape.node_count()];
    for (u, &node) in interior.iter().enumerate() {
        unknown[node] = u;
    }
    let bw = match shape {
        Shape::Line(_) => 1,
        Shape::Grid { nx, .. } => nx,
    };
    let c: S = opts.stencil.diagonal();
    let mut a = Banded::zeros(interior.len(), bw);
    let mut rhs = vec![S::zero(); interior.len()];
    for (u, &node) in interior.iter().enumerate() {
        for (link, nb, axis) in shape.node_links(node) {
            let w = field.k(link) / out.spacing_sq(axis);
            a.add(u, u, c.clone() * w.clone());
            if unknown[nb] == usize::MAX {
                rhs[u] = rhs[u].clone() + w * out.h[nb].clone();
            } else if unknown[nb] < u {
                a.add(u, unknown[nb], -w);
            }
        }
    }
    let x = match shape {
        Shape::Grid { nx, ny } if nx > 64 || ny > 64 => a.solve_cg(&rhs, S::lit(1e-12))?,
        _ => a.solve_ldlt(&rhs)?,
    };
    let mut out = out;
    for (u, &node) in interior.iter().enumerate() {
        out.h[node] = x[u].clone();
    }
    Ok(out)
}

/// Residual of the discrete flow equation at each interior node, in
/// row-major interior order.
pub fn residuals<S: Scalar>(field: &PermeabilityField<S>, heads: &HeadField<S>, stencil: Stencil) -> Result<Vec<S>> {
    if field.shape != heads.shape {
        return Err(Error::shape("permeability and head fields differ in shape"));
    }
    let c: S = stencil.diagonal();
    Ok(heads
        .shape
        .interior_nodes()
        .into_iter()
        .map(|p| {
            heads.shape.node_links(p).into_iter().fold(S::zero(), |acc, (l, m, axis)| {
                acc + field.k(l) * (c.clone() * heads.h[p].clone() - heads.h[m].clone()) / heads.spacing_sq(axis)
            })
        })
        .collect())
}

/// `h[to] - h[from]` across every link.
pub fn head_differences<S: Scalar>(heads: &HeadField<S>) -> HeadDifferences<S> {
    let shape = heads.shape;
    let values = (0..shape.link_count())
        .map(|l| {
            let (a, b) = shape.link_nodes(l);
            heads.h[b].clone() - heads.h[a].clone()
        })
        .collect();
    HeadDifferences { shape, values }
}

/// The two head-drop levels of a noiseless line of `n_low` low cells and
/// `n_high` high cells under [`BoundaryCondition::unit_gradient`].
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaHLevels<S> {
    /// Drop across a low-permeability cell.
    pub low: S,
    /// Drop across a high-permeability cell.
    pub high: S,
}

/// Flux constancy `k_i dh_i = C` with `sum dh_i = -n` gives
/// `dh_low = -n k_H / (n_low k_H + n_high k_L)` and
/// `dh_high = -n k_L / (n_low k_H + n_high k_L)`.
pub fn analytic_delta_h<S: Scalar>(n: usize, n_low: usize, n_high: usize, k_low: S, k_high: S) -> Result<DeltaHLevels<S>> {
    if n_low == 0 || n_high == 0 || n != n_low + n_high {
        return Err(Error::param(format!("need n = n_low + n_high with both >= 1, got {n}, {n_low}, {n_high}")));
    }
    let denom = S::from_count(n_low) * k_high.clone() + S::from_count(n_high) * k_low.clone();
    let nn = S::from_count(n);
    Ok(DeltaHLevels {
        low: -(nn.clone() * k_high) / denom.clone(),
        high: -(nn * k_low) / denom,
    })
}

/// Adds i.i.d. `N(0, sigma)` to every head, boundary nodes included.
pub fn add_observation_noise<S: Real>(heads: &HeadField<S>, sigma: f64, seed: u64) -> Result<HeadField<S>> {
    if !(sigma >= 0.0) {
        return Err(Error::param("noise level must be non-negative"));
    }
    let mut out = heads.clone();
    if sigma == 0.0 {
        return Ok(out);
    }
    let mut rng = seed::rng(seed);
    for v in &mut out.h {
        let e: f64 = rng.sample(StandardNormal);
        *v += S::lit(sigma * e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn line(k: &[f64]) -> PermeabilityField<f64> {
        let q = k.iter().map(|&v| (v > 1.0) as u8).collect();
        PermeabilityField::new(Shape::Line(k.len()), 1.0, 4.0, q).unwrap()
    }

    #[test]
    fn uniform_line_drops_one_per_cell() {
        let f = PermeabilityField::<f64>::new(Shape::Line(4), 1.0, 1.0, vec![0, 1, 0, 1]).unwrap();
        let h = solve_heads(&f, &SolveOptions::default()).unwrap();
        for d in head_differences(&h).values {
            assert!((d + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn line_matches_flux_closed_form() {
        let k = [1.0, 1.0, 4.0, 4.0, 1.0, 4.0];
        let h = solve_heads(&line(&k), &SolveOptions::default()).unwrap();
        let c = -6.0 / k.iter().map(|v| 1.0 / v).sum::<f64>();
        for (d, kv) in head_differences(&h).values.iter().zip(k) {
            assert!((d - c / kv).abs() < 1e-12);
        }
    }

    #[test]
    fn small_differences() {
        let h = HeadField::new(
            Shape::Line(2),
            1.0,
            1.0,
            BoundaryCondition::dirichlet(0.0, -2.0),
            vec![0.0, -1.0, -2.0],
        )
        .unwrap();
        assert_eq!(head_differences(&h).values, vec![-1.0, -1.0]);
    }

    #[test]
    fn grid_residuals_vanish() {
        let f = sample_permeability::<f64>(Shape::square(3), 1.0, 9.0, 11).unwrap();
        let h = solve_heads(&f, &SolveOptions::default()).unwrap();
        let scale = h.h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for r in residuals(&f, &h, Stencil::Conservative).unwrap() {
            assert!(r.abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn large_grid_uses_iterative_solver() {
        let f = sample_permeability::<f64>(Shape::Grid { nx: 66, ny: 3 }, 1.0, 5.0, 2).unwrap();
        let h = solve_heads(&f, &SolveOptions::default()).unwrap();
        let scale = h.h.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for r in residuals(&f, &h, Stencil::Conservative).unwrap() {
            assert!(r.abs() <= 1e-10 * scale, "{r}");
        }
    }

    #[test]
    fn boundary_values_are_prescribed() {
        let f = sample_permeability::<f64>(Shape::square(2), 1.0, 3.0, 5).unwrap();
        let h = solve_heads(&f, &SolveOptions::default()).unwrap();
        assert_eq!(h.h[f.shape.node(0, 1)], 0.0);
        assert_eq!(h.h[f.shape.node(3, 2)], -3.0);
        assert!((h.h[f.shape.node(1, 0)] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn missing_boundary_is_ill_posed() {
        let f = line(&[1.0, 4.0]);
        let opts = SolveOptions { bc: Some(BoundaryCondition { left: Some(0.0), right: None }), ..Default::default() };
        assert!(matches!(solve_heads(&f, &opts), Err(Error::IllPosed(_))));
    }

    #[test]
    fn rational_heads_are_exact() {
        let r = |v: f64| BigRational::lit(v);
        let f = PermeabilityField::new(Shape::square(2), r(1.0), r(7.0), vec![0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1]).unwrap();
        let h = solve_heads(&f, &SolveOptions::default()).unwrap();
        assert!(residuals(&f, &h, Stencil::Conservative).unwrap().iter().all(|v| v == &r(0.0)));
    }

    #[test]
    fn analytic_levels_match_solver() {
        let k = [1.0, 4.0, 1.0, 4.0, 4.0, 1.0];
        let h = solve_heads(&line(&k), &SolveOptions::default()).unwrap();
        let lv = analytic_delta_h::<f64>(6, 3, 3, 1.0, 4.0).unwrap();
        for (d, kv) in head_differences(&h).values.iter().zip(k) {
            let want = if kv > 1.0 { lv.high } else { lv.low };
            assert!((d - want).abs() < 1e-12);
        }
        let k = [1.0, 4.0, 4.0, 4.0, 4.0, 1.0, 4.0];
        let h = solve_heads(&line(&k), &SolveOptions::default()).unwrap();
        let lv = analytic_delta_h::<f64>(7, 2, 5, 1.0, 4.0).unwrap();
        for (d, kv) in head_differences(&h).values.iter().zip(k) {
            let want = if kv > 1.0 { lv.high } else { lv.low };
            assert!((d - want).abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_levels_degenerate_and_invalid() {
        let lv = analytic_delta_h::<f64>(5, 2, 3, 1.0, 1.0).unwrap();
        assert_eq!((lv.low, lv.high), (-1.0, -1.0));
        assert!(analytic_delta_h::<f64>(5, 2, 2, 1.0, 2.0).is_err());
        assert!(analytic_delta_h::<f64>(5, 0, 5, 1.0, 2.0).is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let f = sample_permeability::<f64>(Shape::Line(20), 1.0, 5.0, 1).unwrap();
        let h = solve_heads(&f, &SolveOptions::default()).unwrap();
        assert_eq!(add_observation_noise(&h, 0.0, 3).unwrap(), h);
        let a = add_observation_noise(&h, 0.1, 3).unwrap();
        assert_eq!(a, add_observation_noise(&h, 0.1, 3).unwrap());
        assert_ne!(a, add_observation_noise(&h, 0.1, 4).unwrap());
        assert_ne!(a.h[0], 0.0);
        assert!(add_observation_noise(&h, -0.1, 3).is_err());
    }
}
