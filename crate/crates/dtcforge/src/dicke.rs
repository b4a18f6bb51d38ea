//! Mean-field dynamics of the dissipative Dicke model.
//!
//! State: collective spin components `(j_x, j_y, j_z)` per particle plus
//! scaled cavity quadratures `(x, p)`. The flow
//!
//! ```text
//! dj_x/dt = -ω0 j_y
//! dj_y/dt =  ω0 j_x - 2λ√(2ω) x j_z
//! dj_z/dt =  2λ√(2ω) x j_y
//! dx/dt   =  ω p - (κ/2) x
//! dp/dt   = -ω x - (κ/2) p - 2λ√(2/ω) j_x
//! ```
//!
//! conserves the spin length `j·j = 1/4` and carries a Z2 symmetry
//! `(j_x, j_y, x, p) -> -(j_x, j_y, x, p)`. Above the critical coupling
//! [`lambda_critical`] the zero-spin-projection state turns unstable through
//! a pitchfork and two symmetry-broken fixed points appear; they are exact
//! stationary points of this flow, which is what the rest of the crate
//! relies on. Integration is fixed-step classical RK4 so stroboscopic
//! samples land exactly on period multiples and runs are reproducible
//! bit-for-bit.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pulse::Control;

#[derive(Debug, Error, PartialEq)]
pub enum DickeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("state became non-finite at t = {t}")]
    Diverged { t: f64 },
    #[error("initial state is not finite")]
    NonFiniteInitial,
    #[error("time step must be positive and divide the horizon, got dt = {dt}, t_end = {t_end}")]
    BadTimeGrid { dt: f64, t_end: f64 },
    #[error("sample stride {stride} does not divide the {steps} integration steps")]
    BadStride { stride: usize, steps: usize },
    #[error("period {period} is not an integer multiple of the sample interval {sample_dt}")]
    GridMisaligned { period: f64, sample_dt: f64 },
    #[error("no symmetry-broken state exists at lambda = {lambda} (critical coupling {lambda_c})")]
    BelowThreshold { lambda: f64, lambda_c: f64 },
}

/// Model parameters. The reference frequency `omega_t` sets the time unit;
/// the cavity and spin frequencies are `ω = ω_T(1-ε)` and `ω0 = ω_T(1+ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DickeParams {
    pub omega_t: f64,
    pub epsilon: f64,
    pub kappa: f64,
}

impl Default for DickeParams {
    fn default() -> Self {
        Self { omega_t: 1.0, epsilon: 0.05, kappa: 0.05 }
    }
}

impl DickeParams {
    pub fn new(omega_t: f64, epsilon: f64, kappa: f64) -> Result<Self, DickeError> {
        let p = Self { omega_t, epsilon, kappa };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DickeError> {
        if !(self.omega_t.is_finite() && self.epsilon.is_finite() && self.kappa.is_finite()) {
            return Err(DickeError::InvalidParams("non-finite parameter".into()));
        }
        if self.omega() <= 0.0 || self.omega0() <= 0.0 {
            return Err(DickeError::InvalidParams(format!(
                "omega = {} and omega0 = {} must both be positive (|epsilon| < 1, omega_t > 0)",
                self.omega(),
                self.omega0()
            )));
        }
        if self.kappa < 0.0 {
            return Err(DickeError::InvalidParams(format!("kappa = {} must be >= 0", self.kappa)));
        }
        Ok(())
    }

    /// Cavity frequency `ω_T (1 - ε)`.
    pub fn omega(&self) -> f64 {
        self.omega_t * (1.0 - self.epsilon)
    }

    /// Spin splitting `ω_T (1 + ε)`.
    pub fn omega0(&self) -> f64 {
        self.omega_t * (1.0 + self.epsilon)
    }
}

/// Mean-field state: collective spin per particle plus cavity quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DickeState {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub x: f64,
    pub p: f64,
}

impl DickeState {
    pub fn new(jx: f64, jy: f64, jz: f64, x: f64, p: f64) -> Self {
        Self { jx, jy, jz, x, p }
    }

    /// Squared spin length `j·j`; conserved at `1/4` by the flow.
    pub fn spin_norm2(&self) -> f64 {
        self.jx * self.jx + self.jy * self.jy + self.jz * self.jz
    }

    /// Image under the Z2 symmetry of the model.
    pub fn mirrored(&self) -> Self {
        Self { jx: -self.jx, jy: -self.jy, jz: self.jz, x: -self.x, p: -self.p }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    fn to_array(self) -> [f64; 5] {
        [self.jx, self.jy, self.jz, self.x, self.p]
    }

    fn from_array(y: [f64; 5]) -> Self {
        Self { jx: y[0], jy: y[1], jz: y[2], x: y[3], p: y[4] }
    }

    /// Euclidean distance in the five-component state space.
    pub fn distance(&self, other: &Self) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        a.iter().zip(&b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    }
}

/// Critical coupling of the implemented flow: the pitchfork of the
/// zero-projection state sits at `λ_c = ½ √(ω0 (ω² + κ²/4) / ω)`.
pub fn lambda_critical(params: &DickeParams) -> f64 {
    let w = params.omega();
    let w0 = params.omega0();
    0.5 * (w0 * (w * w + 0.25 * params.kappa * params.kappa) / w).sqrt()
}

/// Which symmetry-broken branch to select.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[default]
    Plus,
    Minus,
}

/// Stationary states of the flow at a static coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SteadyStates {
    /// Below (or at) threshold: the stable zero-projection state with the
    /// spin at the `j_z = -1/2` pole.
    Normal(DickeState),
    /// Above threshold: the two Z2-related fixed points.
    Broken { plus: DickeState, minus: DickeState },
}

impl SteadyStates {
    /// Selects a branch, falling back to the normal state below threshold.
    pub fn select(&self, branch: Branch) -> DickeState {
        match (self, branch) {
            (SteadyStates::Normal(s), _) => *s,
            (SteadyStates::Broken { plus, .. }, Branch::Plus) => *plus,
            (SteadyStates::Broken { minus, .. }, Branch::Minus) => *minus,
        }
    }
}

/// Stationary states at coupling `lambda`.
///
/// Above `λ_c` the spin part is `½(±√(1-μ²), 0, -μ)` with `μ = λ_c²/λ²` and
/// the quadratures solve the cavity stationarity conditions, making both
/// returned states exact zeros of [`eom`]. At and below `λ_c` the normal
/// state `(0, 0, -1/2, 0, 0)` is returned: it is the state the broken branch
/// degenerates into as `λ -> λ_c`, and the one that is asymptotically stable
/// below threshold for `κ > 0`.
pub fn steady_states(params: &DickeParams, lambda: f64) -> SteadyStates {
    let lc = lambda_critical(params);
    if lambda <= lc {
        return SteadyStates::Normal(DickeState::new(0.0, 0.0, -0.5, 0.0, 0.0));
    }
    let w = params.omega();
    let mu = lc * lc / (lambda * lambda);
    let jx = 0.5 * (1.0 - mu * mu).sqrt();
    let jz = -0.5 * mu;
    let denom = w * w + 0.25 * params.kappa * params.kappa;
    let x = -2.0 * lambda * jx * (2.0 * w).sqrt() / denom;
    let p = params.kappa * x / (2.0 * w);
    let plus = DickeState::new(jx, 0.0, jz, x, p);
    SteadyStates::Broken { plus, minus: plus.mirrored() }
}

/// Time derivative of the mean-field state at coupling `lambda`.
pub fn eom(state: &DickeState, params: &DickeParams, lambda: f64) -> DickeState {
    let c = FlowCoeffs::new(params);
    DickeState::from_array(deriv(&state.to_array(), lambda, &c))
}

struct FlowCoeffs {
    omega: f64,
    omega0: f64,
    half_kappa: f64,
    sqrt_2w: f64,
    sqrt_2_over_w: f64,
}

impl FlowCoeffs {
    fn new(params: &DickeParams) -> Self {
        let w = params.omega();
        Self {
            omega: w,
            omega0: params.omega0(),
            half_kappa: 0.5 * params.kappa,
            sqrt_2w: (2.0 * w).sqrt(),
            sqrt_2_over_w: (2.0 / w).sqrt(),
        }
    }
}

#[inline]
fn deriv(y: &[f64; 5], lambda: f64, c: &FlowCoeffs) -> [f64; 5] {
    let [jx, jy, jz, x, p] = *y;
    let g = 2.0 * lambda * c.sqrt_2w;
    [
        -c.omega0 * jy,
        c.omega0 * jx - g * x * jz,
        g * x * jy,
        c.omega * p - c.half_kappa * x,
        -c.omega * x - c.half_kappa * p - 2.0 * lambda * c.sqrt_2_over_w * jx,
    ]
}

/// Observable selector for trajectory series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Observable {
    Jx,
    Jy,
    Jz,
    X,
    P,
}

impl Observable {
    pub fn extract(&self, state: &DickeState) -> f64 {
        match self {
            Observable::Jx => state.jx,
            Observable::Jy => state.jy,
            Observable::Jz => state.jz,
            Observable::X => state.x,
            Observable::P => state.p,
        }
    }
}

/// A sampled trajectory: states and control values on a uniform time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<DickeState>,
    pulse_values: Vec<f64>,
    sample_dt: f64,
    max_spin_drift: f64,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DickeState] {
        &self.states
    }

    pub fn pulse_values(&self) -> &[f64] {
        &self.pulse_values
    }

    /// Spacing between consecutive samples (integration step times stride).
    pub fn sample_dt(&self) -> f64 {
        self.sample_dt
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest `|j·j - 1/4|` seen at any integration step of the run,
    /// including steps between retained samples.
    pub fn max_spin_drift(&self) -> f64 {
        self.max_spin_drift
    }

    pub fn component(&self, obs: Observable) -> Vec<f64> {
        self.states.iter().map(|s| obs.extract(s)).collect()
    }
}

/// Integrates the flow with fixed-step RK4 from `t = 0` to `t_end`,
/// sampling state and control at every step. The control is evaluated at the
/// RK4 sub-stage times `t`, `t + dt/2`, `t + dt`.
pub fn evolve<C: Control + ?Sized>(
    initial: DickeState,
    params: &DickeParams,
    control: &C,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, DickeError> {
    evolve_strided(initial, params, control, t_end, dt, 1)
}

/// [`evolve`] keeping only every `stride`-th sample (the integration step is
/// unchanged). `stride` must divide the number of steps.
pub fn evolve_strided<C: Control + ?Sized>(
    initial: DickeState,
    params: &DickeParams,
    control: &C,
    t_end: f64,
    dt: f64,
    stride: usize,
) -> Result<Trajectory, DickeError> {
    params.validate()?;
    if !initial.is_finite() {
        return Err(DickeError::NonFiniteInitial);
    }
    if !(dt.is_finite() && dt > 0.0 && t_end.is_finite() && t_end > 0.0) {
        return Err(DickeError::BadTimeGrid { dt, t_end });
    }
    let steps_f = t_end / dt;
    let steps = steps_f.round() as usize;
    if steps == 0 || (steps_f - steps as f64).abs() > 1e-6 * steps_f.max(1.0) {
        return Err(DickeError::BadTimeGrid { dt, t_end });
    }
    if stride == 0 || steps % stride != 0 {
        return Err(DickeError::BadStride { stride, steps });
    }

    let c = FlowCoeffs::new(params);
    let n_samples = steps / stride + 1;
    let mut times = Vec::with_capacity(n_samples);
    let mut states = Vec::with_capacity(n_samples);
    let mut pulse_values = Vec::with_capacity(n_samples);
    let mut y = initial.to_array();
    let mut max_drift = spin_drift(&y);

    times.push(0.0);
    states.push(initial);
    pulse_values.push(control.value(0.0));

    for i in 0..steps {
        let t = i as f64 * dt;
        let t_mid = t + 0.5 * dt;
        let t_next = (i + 1) as f64 * dt;
        let l0 = control.value(t);
        let lm = control.value(t_mid);
        let l1 = control.value(t_next);

        let k1 = deriv(&y, l0, &c);
        let y2 = axpy(&y, 0.5 * dt, &k1);
        let k2 = deriv(&y2, lm, &c);
        let y3 = axpy(&y, 0.5 * dt, &k2);
        let k3 = deriv(&y3, lm, &c);
        let y4 = axpy(&y, dt, &k3);
        let k4 = deriv(&y4, l1, &c);
        for j in 0..5 {
            y[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }

        if !y.iter().all(|v| v.is_finite()) {
            return Err(DickeError::Diverged { t: t_next });
        }
        max_drift = max_drift.max(spin_drift(&y));
        if (i + 1) % stride == 0 {
            times.push(t_next);
            states.push(DickeState::from_array(y));
            pulse_values.push(control.value(t_next));
        }
    }

    Ok(Trajectory {
        times,
        states,
        pulse_values,
        sample_dt: stride as f64 * dt,
        max_spin_drift: max_drift,
    })
}

#[inline]
fn axpy(y: &[f64; 5], a: f64, k: &[f64; 5]) -> [f64; 5] {
    [y[0] + a * k[0], y[1] + a * k[1], y[2] + a * k[2], y[3] + a * k[3], y[4] + a * k[4]]
}

#[inline]
fn spin_drift(y: &[f64; 5]) -> f64 {
    (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - 0.25).abs()
}

/// Extracts the observable at `t = 0, T, 2T, …` from a uniformly sampled
/// trajectory. The period must be an integer multiple of the sample
/// interval; anything else is a grid-misalignment error.
pub fn stroboscopic(
    traj: &Trajectory,
    period: f64,
    observable: Observable,
) -> Result<Vec<f64>, DickeError> {
    let ratio = period / traj.sample_dt;
    let stride = ratio.round() as usize;
    if stride == 0 || (ratio - stride as f64).abs() > 1e-9 * ratio.abs().max(1.0) {
        return Err(DickeError::GridMisaligned { period, sample_dt: traj.sample_dt });
    }
    Ok(traj.states.iter().step_by(stride).map(|s| observable.extract(s)).collect())
}

/// Mean coupling of a pulse over the first half period, in magnitude (the
/// coupling sign is a Z2 gauge of the model: `λ -> -λ` mirrors the broken
/// states). For the on/off drive this is just `λ0`.
pub fn on_window_mean(pulse: &crate::pulse::Pulse) -> f64 {
    let period = pulse.period();
    (pulse.integral(0.0, 0.5 * period) / (0.5 * period)).abs()
}

/// The symmetry-broken fixed point at a preparation coupling, the state a
/// driven run starts from. Errors when the coupling does not exceed the
/// critical one, since no broken state exists to prepare.
pub fn prepared_state(
    params: &DickeParams,
    lambda_prep: f64,
    branch: Branch,
) -> Result<DickeState, DickeError> {
    let lc = lambda_critical(params);
    match steady_states(params, lambda_prep) {
        SteadyStates::Broken { .. } if lambda_prep > lc => {
            Ok(steady_states(params, lambda_prep).select(branch))
        }
        _ => Err(DickeError::BelowThreshold { lambda: lambda_prep, lambda_c: lc }),
    }
}

/// [`prepared_state`] at the pulse's own on-window mean coupling.
pub fn driven_initial_state(
    params: &DickeParams,
    pulse: &crate::pulse::Pulse,
    branch: Branch,
) -> Result<DickeState, DickeError> {
    prepared_state(params, on_window_mean(pulse), branch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::FourierPulse;
    use approx::assert_abs_diff_eq;

    const TPER: f64 = std::f64::consts::TAU;

    fn params(eps: f64, kappa: f64) -> DickeParams {
        DickeParams::new(1.0, eps, kappa).unwrap()
    }

    // --- bifurcation-scan oracle -------------------------------------------
    //
    // Locates the pitchfork of the implemented flow without reference to the
    // closed form: the 4x4 Jacobian of `eom` in (jx, jy, x, p) at the
    // zero-projection state, built by central differences, loses a zero
    // eigenvalue where its determinant changes sign. Bisection on that sign
    // change is the oracle.

    fn transverse_jacobian(p: &DickeParams, lambda: f64) -> [[f64; 4]; 4] {
        let base = DickeState::new(0.0, 0.0, -0.5, 0.0, 0.0);
        let h = 1e-4;
        let mut jac = [[0.0; 4]; 4];
        let idx = [0usize, 1, 3, 4]; // jx, jy, x, p
        for (col, &i) in idx.iter().enumerate() {
            let mut plus = base.to_array();
            let mut minus = base.to_array();
            plus[i] += h;
            minus[i] -= h;
            let fp = eom(&DickeState::from_array(plus), p, lambda).to_array();
            let fm = eom(&DickeState::from_array(minus), p, lambda).to_array();
            for (row, &j) in idx.iter().enumerate() {
                jac[row][col] = (fp[j] - fm[j]) / (2.0 * h);
            }
        }
        jac
    }

    fn det4(m: &[[f64; 4]; 4]) -> f64 {
        let det3 = |m: [[f64; 3]; 3]| -> f64 {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        };
        let mut acc = 0.0;
        for col in 0..4 {
            let mut minor = [[0.0; 3]; 3];
            for r in 1..4 {
                let mut cc = 0;
                for c in 0..4 {
                    if c == col {
                        continue;
                    }
                    minor[r - 1][cc] = m[r][c];
                    cc += 1;
                }
            }
            let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * m[0][col] * det3(minor);
        }
        acc
    }

    fn scan_lambda_critical(p: &DickeParams) -> f64 {
        let det_at = |lam: f64| det4(&transverse_jacobian(p, lam));
        let mut lo = 1e-6;
        let mut hi = 1.0;
        assert!(det_at(lo) > 0.0);
        while det_at(hi) > 0.0 {
            hi *= 2.0;
            assert!(hi < 1e6, "no sign change found");
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if det_at(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn critical_coupling_matches_scan_oracle() {
        // resonant lossless case: pitchfork at exactly 1/2
        let p0 = params(0.0, 0.0);
        assert_abs_diff_eq!(scan_lambda_critical(&p0), 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(lambda_critical(&p0), 0.5, epsilon = 1e-15);

        // frozen regression constant for the default working point
        let p = params(0.05, 0.05);
        let lc = lambda_critical(&p);
        assert_abs_diff_eq!(lc, 0.499547492605479, epsilon = 1e-12);
        assert_abs_diff_eq!(scan_lambda_critical(&p), lc, epsilon = 1e-6);
    }

    #[test]
    fn critical_coupling_grows_with_kappa() {
        let mut prev = 0.0;
        for kappa in [0.0, 0.1, 1.0, 10.0, 100.0] {
            let lc = lambda_critical(&params(0.05, kappa));
            assert!(lc > prev);
            prev = lc;
        }
    }

    #[test]
    fn steady_state_examples() {
        let p = params(0.05, 0.05);
        let lc = lambda_critical(&p);

        // at threshold the branch has degenerated into the normal state
        match steady_states(&p, lc) {
            SteadyStates::Normal(s) => {
                assert_eq!((s.jx, s.jy, s.jz), (0.0, 0.0, -0.5));
                assert_eq!((s.x, s.p), (0.0, 0.0));
            }
            _ => panic!("expected normal state at threshold"),
        }

        // mu = 1/2 at lambda = sqrt(2) lambda_c
        match steady_states(&p, std::f64::consts::SQRT_2 * lc) {
            SteadyStates::Broken { plus, minus } => {
                assert_abs_diff_eq!(plus.jx, (3.0f64).sqrt() / 4.0, epsilon = 1e-14);
                assert_abs_diff_eq!(plus.jz, -0.25, epsilon = 1e-14);
                assert_eq!(plus.jy, 0.0);
                assert_abs_diff_eq!(minus.jx, -plus.jx, epsilon = 1e-15);
            }
            _ => panic!("expected broken states above threshold"),
        }
    }

    #[test]
    fn broken_states_are_exact_fixed_points() {
        // randomized (eps, kappa, lambda > lambda_c) tuples from a tiny LCG
        let mut seed = 0x2545f4914f6cdd1du64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let p = params(0.6 * next() - 0.3, 0.5 * next());
            let lc = lambda_critical(&p);
            let lambda = lc * (1.01 + 2.0 * next());
            match steady_states(&p, lambda) {
                SteadyStates::Broken { plus, minus } => {
                    for s in [plus, minus] {
                        let d = eom(&s, &p, lambda);
                        let norm = d.to_array().iter().map(|v| v * v).sum::<f64>().sqrt();
                        assert!(norm < 1e-10, "residual {norm} at lambda {lambda}");
                        assert_abs_diff_eq!(s.spin_norm2(), 0.25, epsilon = 1e-14);
                    }
                }
                _ => panic!("expected broken states"),
            }
        }
    }

    #[test]
    fn eom_decoupled_sectors() {
        let p = params(0.05, 0.3);
        // spin sector: pure precession when lambda = 0
        let d = eom(&DickeState::new(0.5, 0.0, 0.0, 0.0, 0.0), &p, 0.0);
        assert_eq!(d.jx, 0.0);
        assert_abs_diff_eq!(d.jy, p.omega0() * 0.5, epsilon = 1e-15);
        assert_eq!((d.jz, d.x, d.p), (0.0, 0.0, 0.0));

        // cavity sector: damped rotation
        let d = eom(&DickeState::new(0.0, 0.0, 0.5, 1.0, 0.0), &p, 0.0);
        assert_eq!((d.jx, d.jy, d.jz), (0.0, 0.0, 0.0));
        assert_abs_diff_eq!(d.x, -p.kappa / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p, -p.omega(), epsilon = 1e-15);
    }

    #[test]
    fn eom_conserves_spin_length_to_rounding() {
        let p = params(0.12, 0.4);
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..50 {
            let s = DickeState::new(next(), next(), next(), 2.0 * next(), 2.0 * next());
            let d = eom(&s, &p, 1.7);
            let dot = s.jx * d.jx + s.jy * d.jy + s.jz * d.jz;
            assert!(dot.abs() < 1e-15, "j . dj/dt = {dot}");
        }
    }

    #[test]
    fn free_precession_matches_closed_form() {
        let p = params(0.05, 0.0);
        let w0 = p.omega0();
        let dt = TPER / 1000.0;
        let t_end = 1000.0 * dt * 16.0; // 16 periods, ~ w0 t <= 105
        let traj =
            evolve(DickeState::new(0.5, 0.0, 0.0, 0.0, 0.0), &p, &0.0f64, t_end, dt).unwrap();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            if w0 * t > 100.0 {
                break;
            }
            assert_abs_diff_eq!(s.jx, 0.5 * (w0 * t).cos(), epsilon = 1e-8);
        }
        assert!(traj.max_spin_drift() < 1e-6);
    }

    #[test]
    fn broken_state_persists_under_static_drive() {
        let p = params(0.05, 0.05);
        let lambda = 1.0;
        let init = steady_states(&p, lambda).select(Branch::Plus);
        let dt = TPER / 1000.0;
        let traj = evolve(init, &p, &lambda, 100.0 * dt * 1000.0 / 1000.0 * 10.0, dt).unwrap();
        let last = traj.states().last().unwrap();
        assert!(last.distance(&init) < 1e-8, "drifted {}", last.distance(&init));
    }

    #[test]
    fn rk4_is_fourth_order() {
        // a heavily damped cavity keeps the driven flow regular (weakly
        // damped parameter sets can be chaotic, where endpoint differences
        // track the Lyapunov growth instead of the step size)
        let p = params(0.05, 1.0);
        let pulse = FourierPulse::new(1.2, vec![0.5], vec![0.3], TPER, 10.0).unwrap();
        let init = steady_states(&p, 1.2).select(Branch::Plus);
        let horizon = 5.0 * TPER;
        let endpoint = |steps_per_period: usize| {
            let dt = TPER / steps_per_period as f64;
            *evolve(init, &p, &pulse, horizon, dt).unwrap().states().last().unwrap()
        };
        let coarse = endpoint(100);
        let mid = endpoint(200);
        let fine = endpoint(400);
        let ratio = coarse.distance(&mid) / mid.distance(&fine);
        assert!((10.0..26.0).contains(&ratio), "Richardson ratio {ratio}");
    }

    #[test]
    fn z2_mirror_commutes_with_flow() {
        let p = params(0.05, 0.05);
        let pulse = FourierPulse::new(0.9, vec![1.5, -0.7], vec![0.3, 0.8], TPER, 10.0).unwrap();
        let init = steady_states(&p, 1.1).select(Branch::Plus);
        let dt = TPER / 1000.0;
        let a = evolve(init, &p, &pulse, 20.0 * TPER, dt).unwrap();
        let b = evolve(init.mirrored(), &p, &pulse, 20.0 * TPER, dt).unwrap();
        for (sa, sb) in a.states().iter().zip(b.states()) {
            assert!(sa.mirrored().distance(sb) < 1e-8);
        }
    }

    #[test]
    fn normal_state_attracts_below_threshold() {
        let p = params(0.05, 0.2);
        let lambda = 0.7 * lambda_critical(&p);
        let jx = 1e-3;
        let init = DickeState::new(jx, 0.0, -(0.25f64 - jx * jx).sqrt(), 0.0, 0.0);
        let dt = TPER / 1000.0;
        let traj = evolve(init, &p, &lambda, 500.0 * TPER / TPER * TPER, dt).unwrap();
        let last = traj.states().last().unwrap();
        let normal = DickeState::new(0.0, 0.0, -0.5, 0.0, 0.0);
        assert!(
            last.distance(&normal) < 1e-5,
            "distance to normal state {}",
            last.distance(&normal)
        );
    }

    #[test]
    fn stroboscopic_sampling() {
        let p = params(0.05, 0.05);
        let dt = TPER / 100.0;
        let traj =
            evolve(DickeState::new(0.5, 0.0, 0.0, 0.0, 0.0), &p, &0.0f64, 8.0 * TPER, dt).unwrap();
        let series = stroboscopic(&traj, TPER, Observable::Jx).unwrap();
        assert_eq!(series.len(), 9); // floor(t_end / T) + 1

        // misaligned period
        assert!(matches!(
            stroboscopic(&traj, TPER * 0.437, Observable::Jx),
            Err(DickeError::GridMisaligned { .. })
        ));
    }

    #[test]
    fn stroboscopic_period_two_alternates() {
        // synthetic trajectory: jx flips sign each period
        let dt = 0.5;
        let states: Vec<DickeState> = (0..=8)
            .map(|i| {
                let sign = if (i / 2) % 2 == 0 { 1.0 } else { -1.0 };
                DickeState::new(0.3 * sign, 0.0, 0.4, 0.0, 0.0)
            })
            .collect();
        let traj = Trajectory {
            times: (0..=8).map(|i| i as f64 * dt).collect(),
            pulse_values: vec![0.0; states.len()],
            states,
            sample_dt: dt,
            max_spin_drift: 0.0,
        };
        let series = stroboscopic(&traj, 1.0, Observable::Jx).unwrap();
        assert_eq!(series, vec![0.3, -0.3, 0.3, -0.3, 0.3]);
    }

    #[test]
    fn divergence_reports_time() {
        let p = params(0.05, 0.05);
        let init = DickeState::new(0.5, 0.0, 0.0, 1e8, 1e8);
        match evolve(init, &p, &1e8f64, 10.0, 1.0) {
            Err(DickeError::Diverged { t }) => assert!(t > 0.0 && t <= 10.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn grid_validation() {
        let p = params(0.0, 0.0);
        let s = DickeState::new(0.0, 0.0, -0.5, 0.0, 0.0);
        assert!(matches!(
            evolve(s, &p, &0.0f64, 1.0, -0.1),
            Err(DickeError::BadTimeGrid { .. })
        ));
        assert!(matches!(
            evolve(s, &p, &0.0f64, 1.05, 0.1),
            Err(DickeError::BadTimeGrid { .. })
        ));
        assert!(matches!(
            evolve_strided(s, &p, &0.0f64, 1.0, 0.1, 3),
            Err(DickeError::BadStride { .. })
        ));
        assert!(matches!(
            evolve(DickeState::new(f64::NAN, 0.0, 0.0, 0.0, 0.0), &p, &0.0f64, 1.0, 0.1),
            Err(DickeError::NonFiniteInitial)
        ));
        assert!(DickeParams::new(1.0, 1.5, 0.1).is_err());
        assert!(DickeParams::new(1.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn strided_sampling_matches_dense() {
        let p = params(0.05, 0.05);
        let pulse = FourierPulse::new(0.9, vec![1.0], vec![0.5], TPER, 10.0).unwrap();
        let init = steady_states(&p, 1.0).select(Branch::Plus);
        let dt = TPER / 100.0;
        let dense = evolve(init, &p, &pulse, 4.0 * TPER, dt).unwrap();
        let strided = evolve_strided(init, &p, &pulse, 4.0 * TPER, dt, 100).unwrap();
        assert_eq!(strided.len(), 5);
        for (i, s) in strided.states().iter().enumerate() {
            assert_eq!(s, &dense.states()[100 * i]);
        }
        assert_eq!(strided.sample_dt(), 100.0 * dt);
    }

    #[test]
    fn driven_initial_state_uses_on_window_mean() {
        let p = params(0.05, 0.05);
        // constant pulse: mean over the half period is A0
        let pulse: crate::pulse::Pulse =
            FourierPulse::constant(1.0, TPER).unwrap().into();
        let s = driven_initial_state(&p, &pulse, Branch::Plus).unwrap();
        let expected = steady_states(&p, 1.0).select(Branch::Plus);
        assert_abs_diff_eq!(s.distance(&expected), 0.0, epsilon = 1e-14);

        let weak: crate::pulse::Pulse = FourierPulse::constant(0.1, TPER).unwrap().into();
        assert!(matches!(
            driven_initial_state(&p, &weak, Branch::Plus),
            Err(DickeError::BelowThreshold { .. })
        ));
    }
}
