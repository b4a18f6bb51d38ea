//! The two scalar objectives behind the pulse optimizations.
//!
//! `cost_dicke` scores a stroboscopic series for period doubling: a matching
//! term `|s[n] - s[n+2]|` plus the reciprocal of the period-1 flip
//! `|s[n] - s[n+1]|`, so fixed points are punished hard and strong
//! alternation is cheap. `cost_chain` scores a stroboscopic spectrum: the
//! distance of the dominant line from the subharmonic, the summed sideband
//! weight, and a steep penalty when the subharmonic peak sits below its
//! threshold.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{fcma, Spectrum};

#[derive(Debug, Error, PartialEq)]
pub enum CostError {
    #[error("stroboscopic series has {len} samples but indices {needed} are required")]
    SeriesTooShort { len: usize, needed: usize },
}

/// A scalar cost plus the named sub-terms that sum to it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub total: f64,
    pub terms: BTreeMap<String, f64>,
    /// Extra numeric notes (clamps applied, raw intermediate values).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, f64>,
}

impl CostBreakdown {
    pub fn from_terms<const N: usize>(terms: [(&str, f64); N]) -> Self {
        let terms: BTreeMap<String, f64> =
            terms.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self { total: terms.values().sum(), terms, diagnostics: BTreeMap::new() }
    }

    /// Wraps a bare objective value (used by generic optimization problems).
    pub fn scalar(value: f64) -> Self {
        Self::from_terms([("objective", value)])
    }

    fn note(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }
}

/// Division floor for the period-1 penalty; keeps the cost finite on exactly
/// period-1 responses while preserving their ranking as worst.
pub const DICKE_EPS_DIV: f64 = 1e-12;

/// Period-doubling cost of a stroboscopic series evaluated at the burn-in
/// index `s`: `|s[s] - s[s+2]| + 1 / max(|s[s] - s[s+1]|, eps_div)`.
pub fn cost_dicke(jx_strobe: &[f64], s: usize, eps_div: f64) -> Result<CostBreakdown, CostError> {
    cost_dicke_window_avg(jx_strobe, s, eps_div, 1)
}

/// Window-averaged variant of [`cost_dicke`]: the mean cost over the
/// consecutive triples starting at `s .. s + n_triples`. `n_triples = 1`
/// reproduces the plain single-triple cost, which is the default everywhere.
pub fn cost_dicke_window_avg(
    jx_strobe: &[f64],
    s: usize,
    eps_div: f64,
    n_triples: usize,
) -> Result<CostBreakdown, CostError> {
    let n_triples = n_triples.max(1);
    let needed = s + n_triples + 2;
    if jx_strobe.len() < needed {
        return Err(CostError::SeriesTooShort { len: jx_strobe.len(), needed });
    }
    let mut match_term = 0.0;
    let mut penalty_term = 0.0;
    for k in s..s + n_triples {
        match_term += (jx_strobe[k] - jx_strobe[k + 2]).abs();
        penalty_term += 1.0 / (jx_strobe[k] - jx_strobe[k + 1]).abs().max(eps_div);
    }
    match_term /= n_triples as f64;
    penalty_term /= n_triples as f64;
    Ok(CostBreakdown::from_terms([("match", match_term), ("penalty", penalty_term)]))
}

/// Settings for the spectrum-shaping cost.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainCostOpts {
    /// Lower threshold on the subharmonic peak magnitude.
    pub threshold: f64,
    /// Penalty factor applied while the peak is at or below threshold.
    pub penalty: f64,
    /// Count the DC bin as a sideband. Off by default: autocorrelations may
    /// carry a benign offset that the objective should not chase.
    pub include_dc_in_sidebands: bool,
}

impl Default for ChainCostOpts {
    fn default() -> Self {
        Self { threshold: 0.05, penalty: 1e4, include_dc_in_sidebands: false }
    }
}

/// Subharmonic spectrum-shaping cost:
/// `|FCMA - Ω0/2| + Σ_{sidebands} mag + Θ(x)/|x|` with
/// `x = mag(Ω0/2) - threshold`, `Θ = penalty` for `x <= 0` and `1` above.
pub fn cost_chain(spectrum: &Spectrum, opts: &ChainCostOpts) -> CostBreakdown {
    let sub_bin = spectrum.subharmonic_bin();
    let subharmonic = spectrum.freqs()[sub_bin];

    let fcma_term = match fcma(spectrum, true) {
        Some(f) => (f - subharmonic).abs(),
        // An all-zero spectrum is maximally far from a subharmonic delta.
        None => subharmonic,
    };

    let sideband_term: f64 = spectrum
        .mags()
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != sub_bin && (opts.include_dc_in_sidebands || *k != 0))
        .map(|(_, &v)| v)
        .sum();

    let x = spectrum.mags()[sub_bin] - opts.threshold;
    let theta = if x <= 0.0 { opts.penalty } else { 1.0 };
    let x_abs = x.abs();
    let clamped = x_abs < 1e-15;
    let threshold_term = theta / x_abs.max(1e-15);

    let breakdown = CostBreakdown::from_terms([
        ("fcma_term", fcma_term),
        ("sideband_term", sideband_term),
        ("threshold_term", threshold_term),
    ])
    .note("x", x);
    if clamped {
        breakdown.note("x_clamped", 1.0)
    } else {
        breakdown
    }
}
