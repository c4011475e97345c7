use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::noise::{apply_hardware_noise, HardwareNoise, NoiseScope};
use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::Real;
use crate::seed;

const READ_STREAM: u64 = 0x5EAD;
const NOISE_STREAM: u64 = 0x0153;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub num_reads: usize,
    pub sweeps: usize,
    pub seed: u64,
    #[serde(default)]
    pub noise: HardwareNoise,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self { num_reads: 1000, sweeps: 1000, seed: 0, noise: HardwareNoise::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sample<S> {
    pub x: Vec<u8>,
    pub energy: S,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerInfo {
    pub num_reads: usize,
    pub sweeps: usize,
    pub seed: u64,
    pub sigma_hw: f64,
    /// Set once the samples have been unembedded.
    pub chain_break_fraction: Option<f64>,
}

/// Reads in the order they were produced.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleSet<S> {
    pub samples: Vec<Sample<S>>,
    pub info: SamplerInfo,
}

impl<S: Real> SampleSet<S> {
    /// Lowest energy; the earliest read wins ties.
    pub fn best(&self) -> Option<&Sample<S>> {
        self.samples.iter().fold(None, |b: Option<&Sample<S>>, s| match b {
            Some(b) if b.energy <= s.energy => Some(b),
            _ => Some(s),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// One `{read, energy, x}` object per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (read, s) in self.samples.iter().enumerate() {
            let line = json!({ "read": read, "energy": s.energy.approx(), "x": s.x });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }
}

struct Csr<S> {
    start: Vec<usize>,
    nbr: Vec<usize>,
    w: Vec<S>,
    linear: Vec<S>,
}

impl<S: Real> Csr<S> {
    fn new(q: &Qubo<S>) -> Self {
        let adj = q.adjacency();
        let mut start = vec![0];
        let (mut nbr, mut w) = (Vec::new(), Vec::new());
        for row in &adj {
            for &(j, c) in row {
                nbr.push(j);
                w.push(c);
            }
            start.push(nbr.len());
        }
        Self { start, nbr, w, linear: (0..q.n()).map(|i| q.linear(i)).collect() }
    }

    fn fields(&self, x: &[u8]) -> Vec<S> {
        (0..x.len())
            .map(|i| {
                let mut f = self.linear[i];
                for e in self.start[i]..self.start[i + 1] {
                    if x[self.nbr[e]] == 1 {
                        f += self.w[e];
                    }
                }
                f
            })
            .collect()
    }
}

fn schedule<S: Real>(t0: S, sweeps: usize) -> Vec<S> {
    let t1 = t0 * S::lit(1e-3);
    if sweeps == 1 {
        return vec![t1];
    }
    let ratio = (t1 / t0).powf(S::from_count(sweeps - 1).recip());
    let mut t = t0;
    (0..sweeps)
        .map(|_| {
            let now = t;
            t *= ratio;
            now
        })
        .collect()
}

fn sweep_read<S: Real>(q: &Qubo<S>, sweeps: usize, rng: &mut impl Rng) -> Vec<u8> {
    let n = q.n();
    let mut x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let t0 = q.max_abs_coefficient();
    if t0.is_zero() {
        return x;
    }
    let csr = Csr::new(q);
    let mut f = csr.fields(&x);
    for t in schedule(t0, sweeps) {
        for i in 0..n {
            // energy change of flipping x_i
            let delta = if x[i] == 0 { f[i] } else { -f[i] };
            let accept = delta <= S::zero() || {
                let u: f64 = rng.random();
                u < (-delta / t).exp().approx()
            };
            if accept {
                x[i] ^= 1;
                let sign = if x[i] == 1 { S::one() } else { -S::one() };
                for e in csr.start[i]..csr.start[i + 1] {
                    f[csr.nbr[e]] += sign * csr.w[e];
                }
            }
        }
    }
    x
}

/// Simulated annealing with a geometric schedule from the largest coefficient
/// magnitude down to a thousandth of it. Reads are independent and seeded by
/// `(seed, read)`; hardware noise, when set, perturbs the problem the sampler
/// sees while the reported energies are taken on `q` itself.
pub fn anneal<S: Real>(q: &Qubo<S>, params: &AnnealParams) -> Result<SampleSet<S>> {
    if params.num_reads == 0 || params.sweeps == 0 {
        return Err(Error::param("anneal needs at least one read and one sweep"));
    }
    let sigma = params.noise.sigma;
    let shared = match (sigma > 0.0, params.noise.scope) {
        (true, NoiseScope::PerCall) => Some(apply_hardware_noise(q, sigma, seed::derive(params.seed, NOISE_STREAM, 0))?),
        (true, NoiseScope::PerRead) => None,
        _ => Some(q.clone()),
    };
    let mut samples = Vec::with_capacity(params.num_reads);
    for read in 0..params.num_reads {
        let mut rng = seed::rng(seed::derive(params.seed, READ_STREAM, read as u64));
        let x = match &shared {
            Some(p) => sweep_read(p, params.sweeps, &mut rng),
            None => {
                let p = apply_hardware_noise(q, sigma, seed::derive(params.seed, NOISE_STREAM, 1 + read as u64))?;
                sweep_read(&p, params.sweeps, &mut rng)
            }
        };
        let energy = q.energy_unchecked(&x);
        samples.push(Sample { x, energy });
    }
    Ok(SampleSet {
        samples,
        info: SamplerInfo {
            num_reads: params.num_reads,
            sweeps: params.sweeps,
            seed: params.seed,
            sigma_hw: sigma,
            chain_break_fraction: None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_ends() {
        let s = schedule(2.0f64, 11);
        assert_eq!(s[0], 2.0);
        assert!((s[10] - 2e-3).abs() < 1e-12);
        assert_eq!(schedule(2.0f64, 1), vec![2e-3]);
    }

    #[test]
    fn zero_qubo_reports_offset() {
        let mut q = Qubo::<f64>::new(5);
        q.set_offset(3.5);
        let params = AnnealParams { num_reads: 4, sweeps: 3, ..Default::default() };
        let s = anneal(&q, &params).unwrap();
        assert!(s.samples.iter().all(|x| x.energy == 3.5));
        assert_eq!(s.to_jsonl().lines().count(), 4);
    }

    #[test]
    fn rejects_empty_budget() {
        let q = Qubo::<f64>::new(2);
        let params = AnnealParams { num_reads: 0, ..Default::default() };
        assert!(anneal(&q, &params).is_err());
    }
}
