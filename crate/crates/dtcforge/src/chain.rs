//! Exact stroboscopic evolution of a disordered Floquet spin chain.
//!
//! One drive period splits into a transverse segment — a uniform x rotation
//! of every spin by the integrated field angle `φ = ∫ (g - θ_t) dt` — and an
//! interaction segment that is diagonal in the `σ_z` product basis:
//! nearest-neighbour `J_z^i σ_z^i σ_z^{i+1}` couplings plus on-site `B_z^i`
//! fields. States live in the full `2^L` amplitude space (basis index bit
//! `i` holds spin `i`, bit value 0 meaning `σ_z = +1`), so every operation
//! is either a bit-paired 2x2 kernel sweep or a diagonal phase multiply.
//!
//! The order diagnostic is the spin autocorrelation `R_i(nT)` averaged over
//! product-state initial conditions: at the perfect flip angle `φ = π/2` it
//! alternates exactly as `(-1)^n` regardless of disorder, and its spectrum
//! is a unit delta at half the drive frequency.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pulse::GatedPulse;

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid site list: {0}")]
    InvalidSites(String),
    #[error("state vector norm is {norm}, expected 1 within 1e-10")]
    NotNormalized { norm: f64 },
    #[error("amplitude count {len} is not 2^L for L = {length}")]
    DimensionMismatch { len: usize, length: usize },
    #[error("disorder realization does not fit the chain: {0}")]
    DisorderMismatch(String),
    #[error("pulse does not fit the drive cycle: {0}")]
    PulseMismatch(String),
}

/// Mean interaction strength the disorder is drawn around.
pub const COUPLING_MEAN: f64 = 0.2 * std::f64::consts::PI;
/// Relative half-width of the coupling distribution (`±20%`).
pub const COUPLING_SPREAD: f64 = 0.2;
/// On-site fields are uniform in `[0, 2π)`.
pub const FIELD_MAX: f64 = std::f64::consts::TAU;

/// Drive-cycle geometry for the chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainParams {
    /// Number of spins `L`.
    pub length: usize,
    /// Transverse field amplitude `g`.
    pub g: f64,
    /// Drive period `T`.
    pub period: f64,
    /// Duration of the transverse segment.
    pub t1: f64,
    /// Open chain (`L-1` bonds); `false` adds the wrap-around bond.
    pub open_boundary: bool,
}

impl Default for ChainParams {
    /// The calibration `T = 2`, `T1 = 1`, `g = π/2`, so `g T = π` and a zero
    /// control pulse gives a perfect spin flip every period.
    fn default() -> Self {
        Self {
            length: 8,
            g: std::f64::consts::FRAC_PI_2,
            period: 2.0,
            t1: 1.0,
            open_boundary: true,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<(), ChainError> {
        if self.length < 2 {
            return Err(ChainError::InvalidParams(format!(
                "chain length must satisfy L >= 2, got {}",
                self.length
            )));
        }
        if self.length > 24 {
            return Err(ChainError::InvalidParams(format!(
                "chain length {} needs more than 2^24 amplitudes; use a smaller L",
                self.length
            )));
        }
        if !(self.period.is_finite() && self.t1.is_finite() && self.period > 0.0) {
            return Err(ChainError::InvalidParams("period must be finite and positive".into()));
        }
        if !(self.t1 > 0.0 && self.t1 < self.period) {
            return Err(ChainError::InvalidParams(format!(
                "need 0 < T1 < T, got T1 = {}, T = {}",
                self.t1, self.period
            )));
        }
        if !self.g.is_finite() {
            return Err(ChainError::InvalidParams("g must be finite".into()));
        }
        Ok(())
    }

    /// Hilbert-space dimension `2^L`.
    pub fn dim(&self) -> usize {
        1 << self.length
    }

    fn n_bonds(&self) -> usize {
        if self.open_boundary {
            self.length - 1
        } else {
            self.length
        }
    }
}

/// One draw of couplings and fields, together with the seed that made it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderRealization {
    pub seed: u64,
    #[serde(rename = "Jz")]
    pub jz: Vec<f64>,
    #[serde(rename = "Bz")]
    pub bz: Vec<f64>,
}

impl DisorderRealization {
    /// Checks lengths against the chain and the sampled ranges.
    pub fn validate(&self, params: &ChainParams) -> Result<(), ChainError> {
        if self.jz.len() != params.n_bonds() {
            return Err(ChainError::DisorderMismatch(format!(
                "{} couplings for {} bonds",
                self.jz.len(),
                params.n_bonds()
            )));
        }
        if self.bz.len() != params.length {
            return Err(ChainError::DisorderMismatch(format!(
                "{} fields for {} sites",
                self.bz.len(),
                params.length
            )));
        }
        Ok(())
    }
}

/// Draws couplings uniformly from `[0.8 J̄, 1.2 J̄]` with `J̄ = 0.2π` and
/// fields uniformly from `[0, 2π)`; deterministic in the seed.
pub fn sample_disorder(seed: u64, params: &ChainParams) -> DisorderRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = COUPLING_MEAN * (1.0 - COUPLING_SPREAD);
    let hi = COUPLING_MEAN * (1.0 + COUPLING_SPREAD);
    let jz = (0..params.n_bonds()).map(|_| rng.gen_range(lo..=hi)).collect();
    let bz = (0..params.length).map(|_| rng.gen_range(0.0..FIELD_MAX)).collect();
    DisorderRealization { seed, jz, bz }
}

/// `2^L` complex amplitudes in the `σ_z` product basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The product state `|z⟩` for basis index `index` (bit `i` = spin `i`).
    pub fn basis_state(length: usize, index: usize) -> Self {
        let dim = 1 << length;
        assert!(index < dim, "basis index {index} out of range for L = {length}");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    /// Wraps raw amplitudes, requiring a power-of-two length and unit norm
    /// within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, ChainError> {
        if !amps.len().is_power_of_two() || amps.len() < 4 {
            return Err(ChainError::DimensionMismatch {
                len: amps.len(),
                length: amps.len().trailing_zeros() as usize,
            });
        }
        let s = Self { amps };
        let norm = s.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(ChainError::NotNormalized { norm });
        }
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn n_sites(&self) -> usize {
        self.amps.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨σ_z⟩` at a 1-based site.
    pub fn sigma_z_expectation(&self, site: usize) -> f64 {
        let bit = site - 1;
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| z_sign(b, bit) * a.norm_sqr())
            .sum()
    }
}

#[inline]
fn z_sign(basis_index: usize, bit: usize) -> f64 {
    1.0 - 2.0 * ((basis_index >> bit) & 1) as f64
}

/// Integrated x-rotation angle of the transverse segment,
/// `φ = ∫_0^{T1} (g - θ_t) dt`, computed in closed form. The control gate
/// must not extend past the transverse segment.
pub fn x_rotation_angle(theta: &GatedPulse, params: &ChainParams) -> Result<f64, ChainError> {
    params.validate()?;
    if (theta.period() - params.period).abs() > 1e-9 * params.period {
        return Err(ChainError::PulseMismatch(format!(
            "pulse period {} differs from drive period {}",
            theta.period(),
            params.period
        )));
    }
    let gate_end = theta.gate_fraction() * theta.period();
    if gate_end > params.t1 + 1e-12 {
        return Err(ChainError::PulseMismatch(format!(
            "gate window ends at {gate_end} but the transverse segment ends at {}",
            params.t1
        )));
    }
    Ok(params.g * params.t1 - theta.integral(0.0, params.t1))
}

/// Applies `exp(-i φ σ_x)` to every site: the 2x2 kernel `cos φ` on the
/// diagonal and `-i sin φ` off it, swept over bit-paired amplitudes.
pub fn apply_x_rotation(state: &mut StateVector, phi: f64) {
    let (s, c) = phi.sin_cos();
    let l = state.n_sites();
    rotate_all_sites(&mut state.amps, l, c, s);
}

#[inline]
fn rotate_all_sites(amps: &mut [Complex64], l: usize, c: f64, s: f64) {
    let half = amps.len() >> 1;
    for i in 0..l {
        let bit = 1usize << i;
        for k in 0..half {
            let lo = ((k >> i) << (i + 1)) | (k & (bit - 1));
            let hi = lo | bit;
            let u = amps[lo];
            let v = amps[hi];
            amps[lo] = Complex64::new(c * u.re + s * v.im, c * u.im - s * v.re);
            amps[hi] = Complex64::new(c * v.re + s * u.im, c * v.im - s * u.re);
        }
    }
}

/// Classical interaction energy `E(z) = Σ J_z^i z_i z_{i+1} + Σ B_z^i z_i`
/// of a basis configuration (`z_i = ±1`).
pub fn classical_energy(
    basis_index: usize,
    disorder: &DisorderRealization,
    params: &ChainParams,
) -> f64 {
    let l = params.length;
    let mut e = 0.0;
    for (i, &j) in disorder.jz.iter().enumerate() {
        let a = z_sign(basis_index, i);
        let b = z_sign(basis_index, (i + 1) % l);
        e += j * a * b;
    }
    for (i, &b) in disorder.bz.iter().enumerate() {
        e += b * z_sign(basis_index, i);
    }
    e
}

fn diagonal_phases(
    disorder: &DisorderRealization,
    duration: f64,
    params: &ChainParams,
) -> Vec<Complex64> {
    (0..params.dim())
        .map(|b| {
            let arg = -classical_energy(b, disorder, params) * duration;
            Complex64::new(arg.cos(), arg.sin())
        })
        .collect()
}

/// Multiplies each basis amplitude by `exp(-i E(z) duration)`: the
/// interaction segment, diagonal and magnitude-preserving elementwise.
pub fn apply_diagonal_phase(
    state: &mut StateVector,
    disorder: &DisorderRealization,
    duration: f64,
    params: &ChainParams,
) -> Result<(), ChainError> {
    params.validate()?;
    disorder.validate(params)?;
    if state.amps.len() != params.dim() {
        return Err(ChainError::DimensionMismatch { len: state.amps.len(), length: params.length });
    }
    let phases = diagonal_phases(disorder, duration, params);
    for (a, ph) in state.amps.iter_mut().zip(&phases) {
        *a *= ph;
    }
    Ok(())
}

/// Advances one full drive period: the transverse rotation by `phi`, then
/// the diagonal interaction segment of duration `T - T1`.
pub fn evolve_period(
    state: &mut StateVector,
    phi: f64,
    disorder: &DisorderRealization,
    params: &ChainParams,
) -> Result<(), ChainError> {
    apply_x_rotation(state, phi);
    apply_diagonal_phase(state, disorder, params.period - params.t1, params)
}

/// Which product states the autocorrelation averages over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialStates {
    /// Full `2^L` enumeration (the default at L = 8).
    All,
    /// A seeded random subset without replacement, for larger chains.
    RandomSubset { count: usize, seed: u64 },
}

/// Stroboscopic spin autocorrelations `R_i(nT)` for a set of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Autocorrelation {
    sites: Vec<usize>,
    /// `series[k][n]` is `R` at 1-based site `sites[k]` after `n` periods.
    series: Vec<Vec<f64>>,
}

impl Autocorrelation {
    pub fn sites(&self) -> &[usize] {
        &self.sites
    }

    pub fn n_periods(&self) -> usize {
        self.series[0].len() - 1
    }

    pub fn site_series(&self, site: usize) -> Option<&[f64]> {
        self.sites.iter().position(|&s| s == site).map(|k| self.series[k].as_slice())
    }

    pub fn all_series(&self) -> &[Vec<f64>] {
        &self.series
    }

    /// Arithmetic mean across the stored sites at each stroboscopic time.
    pub fn site_averaged(&self) -> Vec<f64> {
        site_averaged_series(&self.series)
    }
}

/// Mean across per-site series at each time index.
pub fn site_averaged_series(series: &[Vec<f64>]) -> Vec<f64> {
    let n = series[0].len();
    (0..n).map(|t| series.iter().map(|s| s[t]).sum::<f64>() / series.len() as f64).collect()
}

/// Product-state-averaged autocorrelation
/// `R_i(nT) = (1/N_init) Σ_z z_i ⟨ψ_z(nT)| σ_z^i |ψ_z(nT)⟩` for
/// `n = 0..=n_periods`, with `|ψ_z⟩` evolved stroboscopically at rotation
/// angle `phi`.
///
/// Initial states evolve independently (in parallel); the average is a
/// fixed-order reduction, so the result is bit-identical for any worker
/// count.
pub fn autocorrelation(
    sites: &[usize],
    disorder: &DisorderRealization,
    phi: f64,
    params: &ChainParams,
    n_periods: usize,
    initial: InitialStates,
) -> Result<Autocorrelation, ChainError> {
    params.validate()?;
    disorder.validate(params)?;
    if sites.is_empty() {
        return Err(ChainError::InvalidSites("site list is empty".into()));
    }
    if sites.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ChainError::InvalidSites(format!(
            "sites must be strictly ascending, got {sites:?}"
        )));
    }
    if sites[0] < 1 || *sites.last().unwrap() > params.length {
        return Err(ChainError::InvalidSites(format!(
            "sites {sites:?} outside 1..={}",
            params.length
        )));
    }

    let dim = params.dim();
    let initial_indices: Vec<usize> = match initial {
        InitialStates::All => (0..dim).collect(),
        InitialStates::RandomSubset { count, seed } => {
            if count == 0 {
                return Err(ChainError::InvalidSites("initial-state subset is empty".into()));
            }
            if count >= dim {
                (0..dim).collect()
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut picked = rand::seq::index::sample(&mut rng, dim, count).into_vec();
                picked.sort_unstable();
                picked
            }
        }
    };

    let (s, c) = phi.sin_cos();
    let phases = diagonal_phases(disorder, params.period - params.t1, params);
    let bits: Vec<usize> = sites.iter().map(|&s| s - 1).collect();
    let l = params.length;

    // per initial state: a flat (n_periods+1) x n_sites block of
    // z_i(z0) * <sigma_z^i>(nT)
    let blocks: Vec<Vec<f64>> = initial_indices
        .par_iter()
        .with_min_len(8)
        .map(|&z0| {
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[z0] = Complex64::new(1.0, 0.0);
            let mut block = vec![0.0; (n_periods + 1) * bits.len()];
            let mut probs = vec![0.0f64; dim];
            for (k, _) in bits.iter().enumerate() {
                block[k] = 1.0; // z_i^2 = 1 at n = 0
            }
            for n in 1..=n_periods {
                rotate_all_sites(&mut amps, l, c, s);
                for (a, ph) in amps.iter_mut().zip(&phases) {
                    *a *= ph;
                }
                for (p, a) in probs.iter_mut().zip(&amps) {
                    *p = a.norm_sqr();
                }
                for (k, &bit) in bits.iter().enumerate() {
                    let mut expectation = 0.0;
                    for (b, &p) in probs.iter().enumerate() {
                        expectation += z_sign(b, bit) * p;
                    }
                    block[n * bits.len() + k] = z_sign(z0, bit) * expectation;
                }
            }
            block
        })
        .collect();

    let norm = initial_indices.len() as f64;
    let mut series = vec![vec![0.0; n_periods + 1]; sites.len()];
    for block in &blocks {
        for n in 0..=n_periods {
            for k in 0..sites.len() {
                series[k][n] += block[n * sites.len() + k];
            }
        }
    }
    for s in &mut series {
        for v in s.iter_mut() {
            *v /= norm;
        }
    }
    Ok(Autocorrelation { sites: sites.to_vec(), series })
}
