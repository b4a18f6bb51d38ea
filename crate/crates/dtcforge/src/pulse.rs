//! Truncated-Fourier control pulses and the fixed reference drives.
//!
//! A [`FourierPulse`] is the optimization variable of the whole crate: a mean
//! level `A0` plus `N_c` cosine/sine harmonics of the drive period, with the
//! harmonic sum carrying a `1/(2 N_c)` prefactor. [`GatedPulse`] masks a
//! Fourier pulse so it acts only on the first `gate_fraction` of every
//! period, and [`on_off_pulse`] is the classic square drive used as a
//! baseline. All pulses reduce time modulo the period before evaluating
//! harmonics, so long-horizon evaluation does not accumulate argument error.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from pulse construction and coefficient handling.
#[derive(Debug, Error, PartialEq)]
pub enum PulseError {
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    #[error("cosine/sine coefficient lists have different lengths ({cos} vs {sin})")]
    ModeMismatch { cos: usize, sin: usize },
    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("coefficient bound chi must be non-negative and finite, got {0}")]
    InvalidChi(f64),
    #[error("harmonic coefficient {index} has |{value}| > chi = {chi}")]
    CoefficientOutOfBounds { index: usize, value: f64, chi: f64 },
    #[error("gate fraction must lie in (0, 1], got {0}")]
    InvalidGateFraction(f64),
    #[error("coefficient vector length {coeffs} does not match bounds length {bounds}")]
    LengthMismatch { coeffs: usize, bounds: usize },
    #[error("bound interval {index} has lower > upper ({lo} > {hi})")]
    InvalidBound { index: usize, lo: f64, hi: f64 },
    #[error("coefficient vector must hold A0 plus equal cosine/sine blocks (odd length), got {0}")]
    BadCoefficientLayout(usize),
}

/// A scalar control field sampled in time.
///
/// Implemented by every pulse shape in this module, by `f64` (a constant
/// control), and by closures, so integrators can accept any drive.
pub trait Control {
    fn value(&self, t: f64) -> f64;
}

impl Control for f64 {
    fn value(&self, _t: f64) -> f64 {
        *self
    }
}

impl<F: Fn(f64) -> f64> Control for F {
    fn value(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Truncated Fourier ansatz
/// `A0 + (1/(2 N_c)) Σ_n (A_n cos(ν_n t) + B_n sin(ν_n t))`, `ν_n = 2πn/T`.
///
/// Immutable after construction; evaluation is pure.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierPulse {
    a0: f64,
    a: Vec<f64>,
    b: Vec<f64>,
    period: f64,
    chi: f64,
}

impl FourierPulse {
    /// Builds a pulse, validating finiteness, matching mode counts and the
    /// `|A_n|, |B_n| <= chi` harmonic bound. `A0` is not checked against
    /// `chi`; its bound is a property of each optimization problem.
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>, period: f64, chi: f64) -> Result<Self, PulseError> {
        if !a0.is_finite() {
            return Err(PulseError::NonFinite("A0"));
        }
        if a.len() != b.len() {
            return Err(PulseError::ModeMismatch { cos: a.len(), sin: b.len() });
        }
        if !period.is_finite() || period <= 0.0 {
            return Err(PulseError::InvalidPeriod(period));
        }
        if !chi.is_finite() || chi < 0.0 {
            return Err(PulseError::InvalidChi(chi));
        }
        for (i, &c) in a.iter().chain(b.iter()).enumerate() {
            if !c.is_finite() {
                return Err(PulseError::NonFinite("harmonic coefficient"));
            }
            if c.abs() > chi {
                return Err(PulseError::CoefficientOutOfBounds { index: i, value: c, chi });
            }
        }
        Ok(Self { a0, a, b, period, chi })
    }

    /// Constant pulse of level `a0` (no harmonics).
    pub fn constant(a0: f64, period: f64) -> Result<Self, PulseError> {
        Self::new(a0, Vec::new(), Vec::new(), period, 0.0)
    }

    /// Rebuilds a pulse from the flat layout `[A0, A_1..A_Nc, B_1..B_Nc]`.
    pub fn from_coeffs(coeffs: &[f64], period: f64, chi: f64) -> Result<Self, PulseError> {
        if coeffs.is_empty() || coeffs.len() % 2 == 0 {
            return Err(PulseError::BadCoefficientLayout(coeffs.len()));
        }
        let n = coeffs.len() / 2;
        Self::new(coeffs[0], coeffs[1..=n].to_vec(), coeffs[n + 1..].to_vec(), period, chi)
    }

    /// Flattens to `[A0, A_1..A_Nc, B_1..B_Nc]`.
    pub fn coeffs(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(1 + 2 * self.a.len());
        v.push(self.a0);
        v.extend_from_slice(&self.a);
        v.extend_from_slice(&self.b);
        v
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn sin_coeffs(&self) -> &[f64] {
        &self.b
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn chi(&self) -> f64 {
        self.chi
    }

    pub fn n_modes(&self) -> usize {
        self.a.len()
    }

    /// Pulse value at time `t` (time reduced modulo the period first).
    /// Non-finite `t` propagates as NaN.
    pub fn value(&self, t: f64) -> f64 {
        let tau = t.rem_euclid(self.period);
        if self.a.is_empty() {
            return self.a0;
        }
        let base = TAU / self.period;
        let mut s = 0.0;
        for (n, (an, bn)) in self.a.iter().zip(&self.b).enumerate() {
            let arg = base * (n + 1) as f64 * tau;
            s += an * arg.cos() + bn * arg.sin();
        }
        self.a0 + s / (2.0 * self.a.len() as f64)
    }

    /// Exact integral over `[t0, t1]` from the sine/cosine antiderivatives.
    /// An inverted interval yields the oriented (negated) integral.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        let dc = self.a0 * (t1 - t0);
        if self.a.is_empty() {
            return dc;
        }
        // The harmonic antiderivative is T-periodic, so it is evaluated on
        // reduced time as well.
        let base = TAU / self.period;
        let anti = |t: f64| -> f64 {
            let tau = t.rem_euclid(self.period);
            let mut s = 0.0;
            for (n, (an, bn)) in self.a.iter().zip(&self.b).enumerate() {
                let nu = base * (n + 1) as f64;
                let arg = nu * tau;
                s += (an * arg.sin() - bn * arg.cos()) / nu;
            }
            s
        };
        dc + (anti(t1) - anti(t0)) / (2.0 * self.a.len() as f64)
    }

    /// Mean value over any interval; `mean(0, T)` equals `A0`.
    pub fn mean(&self, t0: f64, t1: f64) -> f64 {
        self.integral(t0, t1) / (t1 - t0)
    }
}

impl Control for FourierPulse {
    fn value(&self, t: f64) -> f64 {
        FourierPulse::value(self, t)
    }
}

/// A Fourier pulse masked to the first `gate_fraction` of each period.
///
/// The gate window is half-open: the pulse takes the inner value for
/// `0 <= t mod T < gate_fraction * T` and is exactly zero from the gate edge
/// to the end of the period.
#[derive(Clone, Debug, PartialEq)]
pub struct GatedPulse {
    inner: FourierPulse,
    gate_fraction: f64,
}

impl GatedPulse {
    pub fn new(inner: FourierPulse, gate_fraction: f64) -> Result<Self, PulseError> {
        if !gate_fraction.is_finite() || gate_fraction <= 0.0 || gate_fraction > 1.0 {
            return Err(PulseError::InvalidGateFraction(gate_fraction));
        }
        Ok(Self { inner, gate_fraction })
    }

    /// Gate over the first half of each period, the usual choice.
    pub fn half_period(inner: FourierPulse) -> Self {
        Self { inner, gate_fraction: 0.5 }
    }

    pub fn inner(&self) -> &FourierPulse {
        &self.inner
    }

    pub fn gate_fraction(&self) -> f64 {
        self.gate_fraction
    }

    pub fn period(&self) -> f64 {
        self.inner.period
    }

    pub fn value(&self, t: f64) -> f64 {
        let tau = t.rem_euclid(self.inner.period);
        if tau < self.gate_fraction * self.inner.period {
            self.inner.value(tau)
        } else {
            0.0
        }
    }

    /// Integral over `[t0, t1]`, splitting at gate edges so each gated
    /// window uses the inner pulse's closed form.
    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        if t1 < t0 {
            return -self.integral(t1, t0);
        }
        let period = self.inner.period;
        let window = self.gate_fraction * period;
        let m0 = (t0 / period).floor() as i64;
        let m1 = (t1 / period).floor() as i64;
        let mut acc = 0.0;
        for m in m0..=m1 {
            let start = m as f64 * period;
            let lo = start.max(t0);
            let hi = (start + window).min(t1);
            if hi > lo {
                acc += self.inner.integral(lo, hi);
            }
        }
        acc
    }
}

impl Control for GatedPulse {
    fn value(&self, t: f64) -> f64 {
        GatedPulse::value(self, t)
    }
}

/// Square on/off drive: `lambda0` for the first half of each period, zero for
/// the second half.
pub fn on_off_pulse(lambda0: f64, period: f64, t: f64) -> f64 {
    let tau = t.rem_euclid(period);
    if tau < 0.5 * period {
        lambda0
    } else {
        0.0
    }
}

/// [`on_off_pulse`] as a reusable control value.
#[derive(Clone, Copy, Debug)]
pub struct OnOffPulse {
    pub lambda0: f64,
    pub period: f64,
}

impl Control for OnOffPulse {
    fn value(&self, t: f64) -> f64 {
        on_off_pulse(self.lambda0, self.period, t)
    }
}

/// Either pulse shape; the form used in config files and result records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PulseRecord", into = "PulseRecord")]
pub enum Pulse {
    Fourier(FourierPulse),
    Gated(GatedPulse),
}

impl Pulse {
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Pulse::Fourier(p) => p.value(t),
            Pulse::Gated(p) => p.value(t),
        }
    }

    pub fn integral(&self, t0: f64, t1: f64) -> f64 {
        match self {
            Pulse::Fourier(p) => p.integral(t0, t1),
            Pulse::Gated(p) => p.integral(t0, t1),
        }
    }

    pub fn period(&self) -> f64 {
        match self {
            Pulse::Fourier(p) => p.period(),
            Pulse::Gated(p) => p.period(),
        }
    }

    /// The underlying Fourier series (the gated pulse's inner series).
    pub fn fourier(&self) -> &FourierPulse {
        match self {
            Pulse::Fourier(p) => p,
            Pulse::Gated(p) => p.inner(),
        }
    }
}

impl Control for Pulse {
    fn value(&self, t: f64) -> f64 {
        Pulse::value(self, t)
    }
}

impl From<FourierPulse> for Pulse {
    fn from(p: FourierPulse) -> Self {
        Pulse::Fourier(p)
    }
}

impl From<GatedPulse> for Pulse {
    fn from(p: GatedPulse) -> Self {
        Pulse::Gated(p)
    }
}

/// Wire format: `{"A0":…, "A":[…], "B":[…], "T":…, "chi":…, "gate_fraction":…}`
/// with `gate_fraction` present only for gated pulses.
#[derive(Serialize, Deserialize)]
struct PulseRecord {
    #[serde(rename = "A0")]
    a0: f64,
    #[serde(rename = "A")]
    a: Vec<f64>,
    #[serde(rename = "B")]
    b: Vec<f64>,
    #[serde(rename = "T")]
    period: f64,
    chi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gate_fraction: Option<f64>,
}

impl TryFrom<PulseRecord> for Pulse {
    type Error = PulseError;

    fn try_from(r: PulseRecord) -> Result<Self, PulseError> {
        let inner = FourierPulse::new(r.a0, r.a, r.b, r.period, r.chi)?;
        match r.gate_fraction {
            None => Ok(Pulse::Fourier(inner)),
            Some(g) => Ok(Pulse::Gated(GatedPulse::new(inner, g)?)),
        }
    }
}

impl From<Pulse> for PulseRecord {
    fn from(p: Pulse) -> Self {
        let (inner, gate) = match p {
            Pulse::Fourier(f) => (f, None),
            Pulse::Gated(g) => (g.inner.clone(), Some(g.gate_fraction)),
        };
        PulseRecord {
            a0: inner.a0,
            a: inner.a,
            b: inner.b,
            period: inner.period,
            chi: inner.chi,
            gate_fraction: gate,
        }
    }
}

/// A control replayed from a per-period table sampled on the half-step grid
/// of a fixed-step integrator.
///
/// `TabulatedPeriodic::new(control, T, n)` records the control at times
/// `j·T/(2n)` for one period and serves them back for the stage times of an
/// `n`-steps-per-period RK4 run, exactly `T`-periodically. Driven runs in the
/// optimization loops use this adapter: it amortizes harmonic evaluation and
/// guarantees the sampled drive has no period-to-period floating drift.
#[derive(Clone, Debug)]
pub struct TabulatedPeriodic {
    values: Vec<f64>,
    half_step: f64,
}

impl TabulatedPeriodic {
    pub fn new<C: Control + ?Sized>(control: &C, period: f64, steps_per_period: usize) -> Self {
        assert!(steps_per_period > 0 && period > 0.0);
        let half_step = period / steps_per_period as f64 * 0.5;
        let values =
            (0..2 * steps_per_period).map(|j| control.value(j as f64 * half_step)).collect();
        Self { values, half_step }
    }
}

impl Control for TabulatedPeriodic {
    /// Snaps `t` to the nearest half-step grid point and replays the table.
    fn value(&self, t: f64) -> f64 {
        let j = (t / self.half_step).round() as i64;
        let n = self.values.len() as i64;
        self.values[j.rem_euclid(n) as usize]
    }
}

/// Componentwise clamp of `coeffs` into closed `bounds` intervals.
/// Idempotent and never increases any coefficient magnitude relative to the
/// feasible set.
pub fn project_into_bounds(coeffs: &[f64], bounds: &[(f64, f64)]) -> Result<Vec<f64>, PulseError> {
    if coeffs.len() != bounds.len() {
        return Err(PulseError::LengthMismatch { coeffs: coeffs.len(), bounds: bounds.len() });
    }
    for (i, &(lo, hi)) in bounds.iter().enumerate() {
        if lo > hi {
            return Err(PulseError::InvalidBound { index: i, lo, hi });
        }
    }
    Ok(coeffs
        .iter()
        .zip(bounds)
        .map(|(&c, &(lo, hi))| c.max(lo).min(hi))
        .collect())
}

/// Bounds `[±a0_bound, ±chi, …, ±chi]` for the flat coefficient layout.
pub fn symmetric_bounds(a0_bound: f64, chi: f64, n_modes: usize) -> Vec<(f64, f64)> {
    let mut v = Vec::with_capacity(1 + 2 * n_modes);
    v.push((-a0_bound, a0_bound));
    v.extend(std::iter::repeat((-chi, chi)).take(2 * n_modes));
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Adaptive Simpson quadrature, the independent oracle for the
    /// closed-form integrals.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        fn rec<F: Fn(f64) -> f64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: f64,
            fb: f64,
            fm: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, fm, flm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, fb, frm, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let m = 0.5 * (a + b);
        let fm = f(m);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fb, fm, whole, tol, 40)
    }

    fn pulse(a0: f64, a: Vec<f64>, b: Vec<f64>, period: f64) -> FourierPulse {
        FourierPulse::new(a0, a, b, period, 100.0).unwrap()
    }

    #[test]
    fn constant_pulse_value() {
        let p = pulse(0.65, vec![0.0, 0.0], vec![0.0, 0.0], 3.0);
        for t in [0.0, 0.3, 1.7, 55.2, -4.0] {
            assert_eq!(p.value(t), 0.65);
        }
    }

    #[test]
    fn value_at_zero_sums_cosines() {
        // sines vanish at t = 0; 1 + (1/4)*4 = 2
        let p = pulse(1.0, vec![4.0, 0.0], vec![7.0, 7.0], 2.0);
        assert_abs_diff_eq!(p.value(0.0), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn on_off_examples() {
        assert_eq!(on_off_pulse(2.0, 1.0, 0.25), 2.0);
        assert_eq!(on_off_pulse(2.0, 1.0, 0.75), 0.0);
        assert_eq!(on_off_pulse(2.0, 1.0, 1.25), 2.0);
        assert_eq!(on_off_pulse(2.0, 1.0, 0.5), 0.0); // half-open edge
    }

    #[test]
    fn gated_examples() {
        let inner = pulse(0.45, vec![], vec![], 2.0);
        let g = GatedPulse::new(inner, 0.5).unwrap();
        assert_eq!(g.value(0.2 * 2.0), 0.45);
        assert_eq!(g.value(0.7 * 2.0), 0.0);
        assert_eq!(g.value(1.2 * 2.0), 0.45);
        assert_eq!(g.value(1.0), 0.0); // t = gate edge belongs to the off branch
    }

    #[test]
    fn rectangle_integral() {
        let p = pulse(0.45, vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], 1.0);
        assert_abs_diff_eq!(p.integral(0.0, 2.0), 0.9, epsilon = 1e-14);
    }

    #[test]
    fn harmonics_integrate_to_zero_over_period() {
        let p = pulse(0.0, vec![1.5, -2.0, 0.3], vec![0.7, 0.0, -1.1], 2.0);
        assert_abs_diff_eq!(p.integral(0.0, 2.0), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_cosine_half_period_integral_matches_quadrature() {
        let p = pulse(0.0, vec![2.0], vec![0.0], 2.0);
        let closed = p.integral(0.0, 1.0);
        let oracle = simpson(|t| p.value(t), 0.0, 1.0, 1e-12);
        assert_abs_diff_eq!(closed, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(closed, oracle, epsilon = 1e-10);
    }

    #[test]
    fn gated_integral_splits_at_edges() {
        let inner = pulse(0.3, vec![1.0, -0.4], vec![0.8, 0.2], 2.0);
        let g = GatedPulse::new(inner, 0.5).unwrap();
        for (t0, t1) in [(0.0, 2.0), (0.5, 3.7), (-1.3, 1.1), (0.9, 1.05)] {
            let oracle = simpson(|t| g.value(t), t0, t1, 1e-12);
            assert_abs_diff_eq!(g.integral(t0, t1), oracle, epsilon = 1e-9);
        }
    }

    #[test]
    fn projection_examples() {
        let b = vec![(-10.0, 10.0), (-10.0, 10.0)];
        assert_eq!(project_into_bounds(&[12.0, -3.0], &b).unwrap(), vec![10.0, -3.0]);
        assert_eq!(project_into_bounds(&[1.0, -9.9], &b).unwrap(), vec![1.0, -9.9]);
        assert!(matches!(
            project_into_bounds(&[1.0], &b),
            Err(PulseError::LengthMismatch { .. })
        ));
        assert!(matches!(
            project_into_bounds(&[1.0], &[(3.0, -3.0)]),
            Err(PulseError::InvalidBound { .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(
            FourierPulse::new(f64::NAN, vec![], vec![], 1.0, 1.0),
            Err(PulseError::NonFinite(_))
        ));
        assert!(matches!(
            FourierPulse::new(0.0, vec![1.0], vec![], 1.0, 1.0),
            Err(PulseError::ModeMismatch { .. })
        ));
        assert!(matches!(
            FourierPulse::new(0.0, vec![], vec![], -2.0, 1.0),
            Err(PulseError::InvalidPeriod(_))
        ));
        assert!(matches!(
            FourierPulse::new(0.0, vec![3.0], vec![0.0], 1.0, 1.0),
            Err(PulseError::CoefficientOutOfBounds { .. })
        ));
        let inner = pulse(0.0, vec![], vec![], 1.0);
        assert!(matches!(GatedPulse::new(inner, 0.0), Err(PulseError::InvalidGateFraction(_))));
        assert!(FourierPulse::from_coeffs(&[1.0, 2.0], 1.0, 5.0).is_err());
    }

    #[test]
    fn tabulated_control_replays_stage_times_periodically() {
        let p = pulse(0.4, vec![1.0, -0.7], vec![0.3, 0.9], 2.0);
        let spp = 100;
        let tab = TabulatedPeriodic::new(&p, 2.0, spp);
        let dt = 2.0 / spp as f64;
        for i in 0..spp {
            let t = i as f64 * dt;
            assert_eq!(tab.value(t), p.value(t));
            // the mid-stage argument can differ from the table's by 1 ulp
            assert_abs_diff_eq!(tab.value(t + 0.5 * dt), p.value(t + 0.5 * dt), epsilon = 1e-12);
            // exactly periodic replay across many periods
            let far = (i + 37 * spp) as f64 * dt;
            assert_eq!(tab.value(far), tab.value(t));
        }
    }

    #[test]
    fn nan_time_propagates() {
        let p = pulse(1.0, vec![1.0], vec![1.0], 1.0);
        assert!(p.value(f64::NAN).is_nan());
    }

    #[test]
    fn coeff_round_trip() {
        let p = pulse(0.2, vec![1.0, -0.5], vec![0.3, 0.9], 2.0);
        let c = p.coeffs();
        assert_eq!(c, vec![0.2, 1.0, -0.5, 0.3, 0.9]);
        let q = FourierPulse::from_coeffs(&c, 2.0, 100.0).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn json_schema_round_trip() {
        let p: Pulse = pulse(0.65, vec![0.1, 0.2], vec![-0.3, 0.0], 2.0).into();
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"A0\":0.65") && s.contains("\"T\":2.0"));
        assert!(!s.contains("gate_fraction"));
        let back: Pulse = serde_json::from_str(&s).unwrap();
        assert_eq!(p, back);

        let g: Pulse = GatedPulse::half_period(pulse(0.45, vec![], vec![], 2.0)).into();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"gate_fraction\":0.5"));
        let back: Pulse = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }

    proptest! {
        #[test]
        fn periodicity_is_exact(
            a0 in -5.0f64..5.0,
            coeffs in proptest::collection::vec(-10.0f64..10.0, 2..12),
            period in 0.1f64..20.0,
            t in -200.0f64..200.0,
        ) {
            let n = coeffs.len() / 2;
            let p = FourierPulse::new(a0, coeffs[..n].to_vec(), coeffs[n..2*n].to_vec(), period, 10.0).unwrap();
            let scale = p.value(t).abs().max(1.0);
            prop_assert!((p.value(t + period) - p.value(t)).abs() < 1e-12 * scale);
        }

        #[test]
        fn closed_form_integral_matches_quadrature(
            a0 in -2.0f64..2.0,
            coeffs in proptest::collection::vec(-3.0f64..3.0, 4),
            t0 in -3.0f64..3.0,
            len in 0.0f64..4.0,
        ) {
            let p = FourierPulse::new(a0, coeffs[..2].to_vec(), coeffs[2..].to_vec(), 1.7, 10.0).unwrap();
            let t1 = t0 + len;
            let oracle = simpson(|t| p.value(t), t0, t1, 1e-12);
            prop_assert!((p.integral(t0, t1) - oracle).abs() < 1e-10);
        }

        #[test]
        fn mean_over_period_is_a0(
            a0 in -5.0f64..5.0,
            coeffs in proptest::collection::vec(-10.0f64..10.0, 6),
            period in 0.1f64..10.0,
        ) {
            let p = FourierPulse::new(a0, coeffs[..3].to_vec(), coeffs[3..].to_vec(), period, 10.0).unwrap();
            prop_assert!((p.mean(0.0, period) - a0).abs() < 1e-10);
        }

        #[test]
        fn projection_is_idempotent_and_contractive(
            v in proptest::collection::vec(-100.0f64..100.0, 1..8),
            half_width in proptest::collection::vec(0.0f64..20.0, 1..8),
        ) {
            let n = v.len().min(half_width.len());
            let bounds: Vec<(f64, f64)> = half_width[..n].iter().map(|&w| (-w, w)).collect();
            let once = project_into_bounds(&v[..n], &bounds).unwrap();
            let twice = project_into_bounds(&once, &bounds).unwrap();
            prop_assert_eq!(&once, &twice);
            for (p, o) in once.iter().zip(&v[..n]) {
                prop_assert!(p.abs() <= o.abs() + 1e-15);
            }
        }
    }
}
