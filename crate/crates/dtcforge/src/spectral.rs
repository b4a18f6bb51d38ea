//! Discrete Fourier analysis of sampled signals and the dynamical-phase
//! classifier.
//!
//! Magnitudes are normalized by `1/M` so that the ideal period-doubled
//! (alternating) sequence produces a unit peak exactly at half the sampling
//! frequency; an autocorrelation that starts at 1 therefore lands on a [0, 1]
//! magnitude scale and the subharmonic peak threshold of 0.05 is meaningful.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("series length must be even so the subharmonic lies on the grid, got {0}")]
    OddLength(usize),
    #[error("series too short: {len} samples, need at least {min}")]
    TooShort { len: usize, min: usize },
    #[error("sample interval must be positive and finite, got {0}")]
    InvalidInterval(f64),
    #[error("magnitudes must be non-negative and finite")]
    InvalidMagnitudes,
}

/// Magnitude spectrum of a uniformly sampled real signal.
///
/// `freqs[k] = k * omega0 / M` where `omega0 = 2π / Δt` is the angular
/// sampling frequency. For a stroboscopic series sampled once per drive
/// period, `omega0` is the drive frequency and bin `M/2` is the subharmonic.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    freqs: Vec<f64>,
    mags: Vec<f64>,
    omega0: f64,
}

impl Spectrum {
    /// Assembles a spectrum from raw magnitudes (used for synthetic inputs);
    /// `omega0` is the angular sampling frequency.
    pub fn from_parts(mags: Vec<f64>, omega0: f64) -> Result<Self, SpectralError> {
        let m = mags.len();
        if m % 2 != 0 {
            return Err(SpectralError::OddLength(m));
        }
        if m < 2 {
            return Err(SpectralError::TooShort { len: m, min: 2 });
        }
        if !omega0.is_finite() || omega0 <= 0.0 {
            return Err(SpectralError::InvalidInterval(omega0));
        }
        if mags.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SpectralError::InvalidMagnitudes);
        }
        let freqs = (0..m).map(|k| k as f64 * omega0 / m as f64).collect();
        Ok(Self { freqs, mags, omega0 })
    }

    pub fn len(&self) -> usize {
        self.mags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mags.is_empty()
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn mags(&self) -> &[f64] {
        &self.mags
    }

    /// Angular sampling frequency `2π / Δt`.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Index of the subharmonic bin (half the sampling frequency).
    pub fn subharmonic_bin(&self) -> usize {
        self.mags.len() / 2
    }

    pub fn subharmonic_mag(&self) -> f64 {
        self.mags[self.subharmonic_bin()]
    }
}

/// Magnitude spectrum `|(1/M) Σ_n series[n] e^{-2πikn/M}|` of a series
/// sampled at interval `sample_dt`.
///
/// The length must be even (so the subharmonic bin exists) and at least 8.
pub fn stroboscopic_fft(series: &[f64], sample_dt: f64) -> Result<Spectrum, SpectralError> {
    let m = series.len();
    if m < 8 {
        return Err(SpectralError::TooShort { len: m, min: 8 });
    }
    if m % 2 != 0 {
        return Err(SpectralError::OddLength(m));
    }
    if !sample_dt.is_finite() || sample_dt <= 0.0 {
        return Err(SpectralError::InvalidInterval(sample_dt));
    }
    let mut buf: Vec<Complex64> = series.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let omega0 = std::f64::consts::TAU / sample_dt;
    let mags = buf.iter().map(|c| c.norm() / m as f64).collect();
    Spectrum::from_parts(mags, omega0)
}

/// Frequency corresponding to the maximum spectral amplitude.
///
/// Scans bins in ascending order with strict comparison, so ties resolve to
/// the lowest frequency. With `exclude_dc` (the default in every cost path)
/// bin 0 is skipped so a constant offset cannot mask the dynamical response.
/// Returns `None` when every scanned magnitude is zero.
pub fn fcma_bin(spectrum: &Spectrum, exclude_dc: bool) -> Option<usize> {
    let start = usize::from(exclude_dc);
    let mut best: Option<(usize, f64)> = None;
    for k in start..spectrum.len() {
        let v = spectrum.mags[k];
        if best.map_or(true, |(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    match best {
        Some((_, v)) if v == 0.0 => None,
        Some((k, _)) => Some(k),
        None => None,
    }
}

/// [`fcma_bin`] mapped to its angular frequency.
pub fn fcma(spectrum: &Spectrum, exclude_dc: bool) -> Option<f64> {
    fcma_bin(spectrum, exclude_dc).map(|k| spectrum.freqs[k])
}

/// Outcome of the subharmonic peak test.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PeakTest {
    pub passed: bool,
    /// Frequency of the spectral maximum (DC excluded), if any.
    pub fcma_freq: Option<f64>,
    /// Magnitude at the subharmonic bin.
    pub subharmonic_mag: f64,
    pub threshold: f64,
}

/// Default lower threshold on the subharmonic peak magnitude.
pub const PEAK_THRESHOLD: f64 = 0.05;

/// Passes iff the spectral maximum sits exactly on the subharmonic bin and
/// its magnitude is at least `threshold`.
pub fn dtc_peak_test(spectrum: &Spectrum, threshold: f64) -> PeakTest {
    let bin = fcma_bin(spectrum, true);
    let sub = spectrum.subharmonic_mag();
    PeakTest {
        passed: bin == Some(spectrum.subharmonic_bin()) && sub >= threshold,
        fcma_freq: bin.map(|k| spectrum.freqs[k]),
        subharmonic_mag: sub,
        threshold,
    }
}

/// Dynamical phase of a driven trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseLabel {
    #[serde(rename = "DTC")]
    Dtc,
    #[serde(rename = "LIMIT_CYCLE")]
    LimitCycle,
    #[serde(rename = "THERMAL")]
    Thermal,
    #[serde(rename = "PERIOD_1")]
    Period1,
}

impl std::fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PhaseLabel::Dtc => "DTC",
            PhaseLabel::LimitCycle => "LIMIT_CYCLE",
            PhaseLabel::Thermal => "THERMAL",
            PhaseLabel::Period1 => "PERIOD_1",
        };
        f.write_str(s)
    }
}

/// Classifier thresholds; all exposed in experiment configs.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierTolerances {
    /// Two samples closer than this are "the same value".
    pub tol_fix: f64,
    /// Consecutive strobes must differ by more than this for period doubling.
    pub tol_flip: f64,
    /// Minimum fraction of non-DC spectral weight in one line for a clean
    /// oscillation.
    pub conc_min: f64,
}

impl Default for ClassifierTolerances {
    /// Values calibrated on the weakly dissipative working point: the
    /// envelope of a locked period-doubled orbit keeps a percent-level
    /// wobble for hundreds of periods at small `κ`, so `tol_fix` must sit
    /// above that, and a flip below 0.05 is not a usable subharmonic.
    fn default() -> Self {
        Self { tol_fix: 5e-2, tol_flip: 5e-2, conc_min: 0.4 }
    }
}

/// Classification record: the label plus the diagnostics it was based on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Classification {
    pub label: PhaseLabel,
    /// Dominant non-DC line of the densely sampled signal (folded spectrum).
    pub peak_freq: f64,
    /// Folded magnitude of that line's central bin pair.
    pub peak_mag: f64,
    /// Fraction of non-DC spectral power outside the dominant line (the line
    /// collects its central bin plus one neighbour either side, absorbing
    /// the leakage of an off-grid frequency).
    pub residual: f64,
}

/// Labels a driven trajectory from its stroboscopic samples plus the densely
/// sampled signal (both with burn-in already discarded).
///
/// The decision sequence: period-doubled strobes (fixed over 2 periods,
/// flipping every period) are a DTC; strobes fixed over 1 period are
/// PERIOD_1; otherwise a dense spectrum concentrated on one line away from
/// the `Ω0/2` comb is a LIMIT_CYCLE, and anything left is THERMAL.
///
/// `dense_dt` is the dense sample interval and `drive_period` the modulation
/// period `T` defining the comb `Ω0/2 = π/T`.
pub fn classify_dicke(
    strobe: &[f64],
    dense: &[f64],
    dense_dt: f64,
    drive_period: f64,
    tol: &ClassifierTolerances,
) -> Result<Classification, SpectralError> {
    if strobe.len() < 8 {
        return Err(SpectralError::TooShort { len: strobe.len(), min: 8 });
    }
    let d2_max = strobe
        .windows(3)
        .map(|w| (w[0] - w[2]).abs())
        .fold(0.0f64, f64::max);
    let d1 = || strobe.windows(2).map(|w| (w[0] - w[1]).abs());
    let d1_min = d1().fold(f64::INFINITY, f64::min);
    let d1_max = d1().fold(0.0f64, f64::max);

    // Dense-signal line analysis feeds both the limit-cycle branch and the
    // diagnostics reported with every label.
    let m = dense.len() & !1;
    if m < 8 {
        return Err(SpectralError::TooShort { len: m, min: 8 });
    }
    let spectrum = stroboscopic_fft(&dense[..m], dense_dt)?;
    let line = folded_peak(&spectrum);
    let peak_freq = spectrum.freqs[line.bin];
    let concentration = line.concentration;
    let residual = if line.total_power > 0.0 { 1.0 - concentration } else { 0.0 };

    let label = if d2_max < tol.tol_fix && d1_min > tol.tol_flip {
        PhaseLabel::Dtc
    } else if d1_max < tol.tol_fix {
        PhaseLabel::Period1
    } else {
        let comb = std::f64::consts::PI / drive_period; // Ω0/2
        let bin_width = spectrum.omega0() / m as f64;
        let offset = (peak_freq - (peak_freq / comb).round() * comb).abs();
        if concentration >= tol.conc_min && offset > 1.5 * bin_width {
            PhaseLabel::LimitCycle
        } else {
            PhaseLabel::Thermal
        }
    };
    Ok(Classification { label, peak_freq, peak_mag: line.magnitude, residual })
}

struct FoldedLine {
    bin: usize,
    magnitude: f64,
    /// Power fraction in the dominant bin and its immediate neighbours.
    concentration: f64,
    total_power: f64,
}

/// Folds the two-sided spectrum onto bins `1..=M/2` (mirror pairs summed, in
/// power) and locates the dominant line. The line's power takes the peak bin
/// plus one neighbour either side, so a frequency between grid points still
/// registers as concentrated.
fn folded_peak(spectrum: &Spectrum) -> FoldedLine {
    let m = spectrum.len();
    let half = m / 2;
    let folded_power = |k: usize| -> f64 {
        if k < 1 || k > half {
            0.0
        } else if k < half {
            let a = spectrum.mags[k];
            let b = spectrum.mags[m - k];
            a * a + b * b
        } else {
            spectrum.mags[k] * spectrum.mags[k]
        }
    };
    let mut best_bin = 1;
    let mut best = -1.0;
    let mut total = 0.0;
    for k in 1..=half {
        let w = folded_power(k);
        total += w;
        if w > best {
            best = w;
            best_bin = k;
        }
    }
    let line_power = folded_power(best_bin - 1) + folded_power(best_bin) + folded_power(best_bin + 1);
    let magnitude = if best_bin < half {
        spectrum.mags[best_bin] + spectrum.mags[m - best_bin]
    } else {
        spectrum.mags[best_bin]
    };
    FoldedLine {
        bin: best_bin,
        magnitude,
        concentration: if total > 0.0 { line_power / total } else { 0.0 },
        total_power: total,
    }
}
