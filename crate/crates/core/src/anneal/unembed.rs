use super::embed::Embedding;
use super::sampler::{Sample, SampleSet};
use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::scalar::Real;

/// Majority vote per chain. Exact ties are settled in variable order by the
/// conditional logical energy given everything decided so far, with 0 on
/// equal energy. The info block records the fraction of broken chains.
pub fn unembed<S: Real>(samples: &SampleSet<S>, e: &Embedding, q: &Qubo<S>) -> Result<SampleSet<S>> {
    if q.n() != e.num_logical() {
        return Err(Error::Embedding(format!("{} variables for {} chains", q.n(), e.num_logical())));
    }
    let adj = q.adjacency();
    let mut broken = 0usize;
    let mut out = Vec::with_capacity(samples.len());
    for s in &samples.samples {
        if s.x.len() != e.num_physical() {
            return Err(Error::shape(format!("sample over {} qubits, embedding uses {}", s.x.len(), e.num_physical())));
        }
        let mut x = vec![0u8; q.n()];
        let mut ties = Vec::new();
        for i in 0..q.n() {
            let span = e.span(i);
            let len = span.len();
            let ones = s.x[span].iter().filter(|&&b| b == 1).count();
            if ones != 0 && ones != len {
                broken += 1;
            }
            match (2 * ones).cmp(&len) {
                std::cmp::Ordering::Greater => x[i] = 1,
                std::cmp::Ordering::Less => {}
                std::cmp::Ordering::Equal => ties.push(i),
            }
        }
        for i in ties {
            let mut field = q.linear(i);
            for &(j, c) in &adj[i] {
                if x[j] == 1 {
                    field += c;
                }
            }
            x[i] = u8::from(field < S::zero());
        }
        let energy = q.energy_unchecked(&x);
        out.push(Sample { x, energy });
    }
    let mut info = samples.info.clone();
    let chains = samples.len() * q.n();
    info.chain_break_fraction = Some(if chains == 0 { 0.0 } else { broken as f64 / chains as f64 });
    Ok(SampleSet { samples: out, info })
}
