use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::Real;
use crate::seed;

/// When control error is redrawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseScope {
    /// One perturbed problem per anneal call, shared by all reads.
    #[default]
    PerCall,
    /// A fresh perturbation for every read.
    PerRead,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HardwareNoise {
    pub sigma: f64,
    #[serde(default)]
    pub scope: NoiseScope,
}

impl HardwareNoise {
    pub fn new(sigma: f64, scope: NoiseScope) -> Self {
        Self { sigma, scope }
    }
}

/// Scales `q` so its largest coefficient has magnitude one.
pub fn normalize<S: Real>(q: &Qubo<S>) -> Qubo<S> {
    let m = q.max_abs_coefficient();
    if m.is_zero() {
        q.clone()
    } else {
        q.scaled(&m.recip())
    }
}

/// Normalizes `q`, then adds `N(0, sigma)` to the linear term of every
/// variable and to every stored coupler. The offset is scaled but not
/// perturbed.
pub fn apply_hardware_noise<S: Real>(q: &Qubo<S>, sigma: f64, seed: u64) -> Result<Qubo<S>> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::param(format!("noise level must be non-negative, got {sigma}")));
    }
    let base = normalize(q);
    if sigma == 0.0 {
        return Ok(base);
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::param(e.to_string()))?;
    let mut rng = seed::rng(seed);
    let mut out = Qubo::new(q.n());
    out.set_offset(*base.offset());
    for i in 0..q.n() {
        out.add_linear(i, base.linear(i) + S::lit(normal.sample(&mut rng)));
    }
    for (i, j, c) in base.quadratic_terms() {
        out.add_quadratic(i, j, *c + S::lit(normal.sample(&mut rng)));
    }
    Ok(out)
}
