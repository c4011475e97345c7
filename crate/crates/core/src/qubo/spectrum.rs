use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::Qubo;

/// Sorted coefficient magnitudes of a QUBO.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Nonzero `|c|` over linear and quadratic terms, largest first.
    pub magnitudes: Vec<f64>,
    pub dynamic_range: f64,
    /// Count of magnitudes per decade, keyed by `floor(log10 |c|)`.
    pub decades: BTreeMap<i32, usize>,
}

pub fn coefficient_spectrum<S: Scalar>(q: &Qubo<S>) -> Result<SpectrumReport> {
    let mut magnitudes: Vec<f64> = q
        .linear_terms()
        .map(|(_, c)| c)
        .chain(q.quadratic_terms().map(|(_, _, c)| c))
        .map(|c| c.abs().approx())
        .filter(|m| *m > 0.0)
        .collect();
    if magnitudes.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    magnitudes.sort_by(|a, b| b.total_cmp(a));
    let dynamic_range = magnitudes[0] / magnitudes[magnitudes.len() - 1];
    let mut decades = BTreeMap::new();
    for m in &magnitudes {
        *decades.entry(m.log10().floor() as i32).or_insert(0) += 1;
    }
    Ok(SpectrumReport { magnitudes, dynamic_range, decades })
}

impl SpectrumReport {
    pub fn decades_spanned(&self) -> f64 {
        self.dynamic_range.log10()
    }

    /// Largest ratio between neighbouring sorted magnitudes, ignoring the
    /// top and bottom `trim` fraction of the spectrum.
    pub fn max_adjacent_ratio(&self, trim: f64) -> f64 {
        let n = self.magnitudes.len();
        let lo = ((n as f64) * trim).floor() as usize;
        let hi = n - lo;
        self.magnitudes[lo..hi.max(lo)]
            .windows(2)
            .map(|w| w[0] / w[1])
            .fold(1.0, f64::max)
    }

    /// Magnitudes grouped so that consecutive members differ by less than `ratio`.
    pub fn clusters(&self, ratio: f64) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = Vec::new();
        for &m in &self.magnitudes {
            match out.last_mut() {
                Some(c) if c.last().unwrap() / m < ratio => c.push(m),
                _ => out.push(vec![m]),
            }
        }
        out
    }

    /// `rank,magnitude` rows with a header, rank starting at 1.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("rank,magnitude\n");
        for (r, m) in self.magnitudes.iter().enumerate() {
            writeln!(s, "{},{:e}", r + 1, m).unwrap();
        }
        s
    }
}
