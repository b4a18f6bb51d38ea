//! Bounded derivative-free minimization over pulse coefficients.
//!
//! The engine is Nelder–Mead direct search with every proposed vertex
//! projected into the coefficient bounds, seeded restarts when the simplex
//! collapses, and a fixed number of independent starts sharing one
//! evaluation budget. Every evaluation is recorded in a trace, and the whole
//! search is a deterministic function of the problem and its seed.
//!
//! [`optimize_dicke`] and [`optimize_chain`] wire the engine to the two
//! testbeds: the first scores stroboscopic period doubling of the mean-field
//! cavity-spin flow, the second the subharmonic spectrum of the chain's
//! autocorrelation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

use crate::chain::{
    autocorrelation, sample_disorder, x_rotation_angle, ChainError, ChainParams,
    DisorderRealization, InitialStates,
};
use crate::cost::{cost_chain, cost_dicke, ChainCostOpts, CostBreakdown};
use crate::dicke::{
    evolve_strided, on_window_mean, prepared_state, Branch, DickeError, DickeParams, DickeState,
    Observable,
};
use crate::pulse::{
    project_into_bounds, symmetric_bounds, FourierPulse, GatedPulse, Pulse, PulseError,
    TabulatedPeriodic,
};
use crate::spectral::{stroboscopic_fft, SpectralError};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("objective is not finite at the initial point")]
    NonFiniteAtInitial,
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Dicke(#[from] DickeError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// A bounded minimization task. The objective itself is passed separately to
/// [`minimize`] so problems stay plain data.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimizationProblem {
    /// Per-coefficient closed intervals.
    pub bounds: Vec<(f64, f64)>,
    /// Starting point (projected into bounds before use).
    pub initial: Vec<f64>,
    /// Hard cap on objective evaluations, shared by all starts.
    pub budget: usize,
    /// Stop a start once the simplex cost spread falls below this.
    pub tol: f64,
    /// Seed for restart and multi-start draws.
    pub seed: u64,
    /// Independent starts (the first begins at `initial`).
    pub n_starts: usize,
}

impl OptimizationProblem {
    pub fn new(bounds: Vec<(f64, f64)>, initial: Vec<f64>) -> Self {
        Self { bounds, initial, budget: 2000, tol: 1e-8, seed: 0, n_starts: 3 }
    }
}

/// One recorded objective evaluation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRecord {
    pub eval: usize,
    pub coeffs: Vec<f64>,
    pub cost: f64,
    pub terms: BTreeMap<String, f64>,
}

/// Search outcome: the best point ever evaluated plus the full trace.
#[derive(Clone, Debug)]
pub struct OptimizationReport {
    pub best_coeffs: Vec<f64>,
    pub best_cost: f64,
    pub trace: Vec<TraceRecord>,
    pub n_evals: usize,
    pub converged: bool,
    /// Fresh simplexes beyond the first (collapse restarts and extra starts).
    pub restarts_used: usize,
}

struct Evaluator<'a, F> {
    objective: &'a F,
    trace: Vec<TraceRecord>,
    best_coeffs: Vec<f64>,
    best_cost: f64,
    budget: usize,
}

impl<'a, F: Fn(&[f64]) -> CostBreakdown> Evaluator<'a, F> {
    fn new(objective: &'a F, budget: usize) -> Self {
        Self {
            objective,
            trace: Vec::new(),
            best_coeffs: Vec::new(),
            best_cost: f64::INFINITY,
            budget,
        }
    }

    fn used(&self) -> usize {
        self.trace.len()
    }

    fn remaining(&self) -> usize {
        self.budget - self.used()
    }

    /// Evaluates, traces, and returns the sanitized cost (non-finite
    /// objective values rank as +inf). `None` once the budget is spent.
    fn eval(&mut self, coeffs: &[f64]) -> Option<f64> {
        if self.remaining() == 0 {
            return None;
        }
        let breakdown = (self.objective)(coeffs);
        self.trace.push(TraceRecord {
            eval: self.used(),
            coeffs: coeffs.to_vec(),
            cost: breakdown.total,
            terms: breakdown.terms,
        });
        let cost = if breakdown.total.is_finite() { breakdown.total } else { f64::INFINITY };
        if cost < self.best_cost {
            self.best_cost = cost;
            self.best_coeffs = coeffs.to_vec();
        }
        Some(cost)
    }
}

enum SimplexEnd {
    Converged,
    Collapsed,
    OutOfBudget,
    CapReached,
}

/// Minimizes `objective` over the problem's feasible box.
///
/// Deterministic for a fixed `(problem, seed)`: the search is sequential and
/// all randomness flows from one seeded generator.
pub fn minimize<F>(
    problem: &OptimizationProblem,
    objective: F,
) -> Result<OptimizationReport, OptimizerError>
where
    F: Fn(&[f64]) -> CostBreakdown,
{
    let n = problem.bounds.len();
    if n == 0 {
        return Err(OptimizerError::InvalidProblem("empty coefficient vector".into()));
    }
    if problem.initial.len() != n {
        return Err(OptimizerError::InvalidProblem(format!(
            "initial point has {} coefficients but there are {} bounds",
            problem.initial.len(),
            n
        )));
    }
    if problem.budget == 0 {
        return Err(OptimizerError::InvalidProblem("budget must be at least 1".into()));
    }
    if problem.n_starts == 0 {
        return Err(OptimizerError::InvalidProblem("need at least one start".into()));
    }
    if !problem.tol.is_finite() || problem.tol < 0.0 {
        return Err(OptimizerError::InvalidProblem("tolerance must be finite and >= 0".into()));
    }
    let initial = project_into_bounds(&problem.initial, &problem.bounds)?;

    // reject problems whose objective is undefined where the search begins
    let probe = objective(&initial);
    if !probe.total.is_finite() {
        return Err(OptimizerError::NonFiniteAtInitial);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed);
    let mut ev = Evaluator::new(&objective, problem.budget);
    let mut converged = false;
    let mut restarts_used = 0usize;
    let mut simplexes = 0usize;

    for start in 0..problem.n_starts {
        if ev.remaining() == 0 {
            break;
        }
        // balance what's left over the starts still to run
        let cap = ev.used() + ev.remaining() / (problem.n_starts - start);
        let cap = cap.max(ev.used() + 1);
        let mut point =
            if start == 0 { initial.clone() } else { random_feasible(&mut rng, problem) };
        loop {
            simplexes += 1;
            if simplexes > 1 {
                restarts_used += 1;
            }
            match run_simplex(problem, &mut ev, &point, cap) {
                SimplexEnd::Converged => {
                    converged = true;
                    break;
                }
                SimplexEnd::OutOfBudget | SimplexEnd::CapReached => break,
                SimplexEnd::Collapsed => {
                    if ev.used() >= cap || ev.remaining() == 0 {
                        break;
                    }
                    point = random_feasible(&mut rng, problem);
                }
            }
        }
    }

    Ok(OptimizationReport {
        best_coeffs: ev.best_coeffs.clone(),
        best_cost: ev.best_cost,
        n_evals: ev.used(),
        trace: ev.trace,
        converged,
        restarts_used,
    })
}

fn random_feasible(rng: &mut ChaCha8Rng, problem: &OptimizationProblem) -> Vec<f64> {
    problem
        .bounds
        .iter()
        .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
        .collect()
}

/// One Nelder–Mead run from `x0` with the standard reflect/expand/contract/
/// shrink coefficients, projecting every trial point into bounds.
fn run_simplex<F>(
    problem: &OptimizationProblem,
    ev: &mut Evaluator<'_, F>,
    x0: &[f64],
    cap: usize,
) -> SimplexEnd
where
    F: Fn(&[f64]) -> CostBreakdown,
{
    let n = problem.bounds.len();
    let project = |v: &[f64]| project_into_bounds(v, &problem.bounds).expect("validated bounds");

    // initial simplex: 10% of each bound width (floored), flipped away from
    // the nearer boundary
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let (lo, hi) = problem.bounds[i];
        let h = (0.1 * (hi - lo)).max(1e-6);
        let mut v = x0.to_vec();
        v[i] = if v[i] + h <= hi { v[i] + h } else { v[i] - h };
        points.push(project(&v));
    }
    let mut costs = Vec::with_capacity(n + 1);
    for p in &points {
        match ev.eval(p) {
            Some(c) => costs.push(c),
            None => return SimplexEnd::OutOfBudget,
        }
    }

    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        if ev.remaining() == 0 {
            return SimplexEnd::OutOfBudget;
        }
        if ev.used() >= cap {
            return SimplexEnd::CapReached;
        }
        order.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]));
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        if costs[worst] - costs[best] < problem.tol {
            return SimplexEnd::Converged;
        }
        let diameter = points
            .iter()
            .map(|p| {
                p.iter().zip(&points[best]).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
            })
            .fold(0.0f64, f64::max);
        if diameter < 1e-10 {
            return SimplexEnd::Collapsed;
        }

        // centroid of all but the worst vertex
        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for (c, x) in centroid.iter_mut().zip(&points[i]) {
                *c += x / n as f64;
            }
        }
        let towards = |from: &[f64], scale: f64| -> Vec<f64> {
            let v: Vec<f64> =
                centroid.iter().zip(from).map(|(c, w)| c + scale * (c - w)).collect();
            project(&v)
        };

        let reflected = towards(&points[worst], 1.0);
        let r_cost = match ev.eval(&reflected) {
            Some(c) => c,
            None => return SimplexEnd::OutOfBudget,
        };

        if r_cost < costs[best] {
            let expanded = towards(&points[worst], 2.0);
            let e_cost = match ev.eval(&expanded) {
                Some(c) => c,
                None => return SimplexEnd::OutOfBudget,
            };
            if e_cost < r_cost {
                points[worst] = expanded;
                costs[worst] = e_cost;
            } else {
                points[worst] = reflected;
                costs[worst] = r_cost;
            }
        } else if r_cost < costs[second_worst] {
            points[worst] = reflected;
            costs[worst] = r_cost;
        } else {
            // contract outside (towards the reflection) or inside
            let contracted = if r_cost < costs[worst] {
                towards(&points[worst], 0.5)
            } else {
                towards(&points[worst], -0.5)
            };
            let c_cost = match ev.eval(&contracted) {
                Some(c) => c,
                None => return SimplexEnd::OutOfBudget,
            };
            if c_cost < r_cost.min(costs[worst]) {
                points[worst] = contracted;
                costs[worst] = c_cost;
            } else {
                // shrink everything towards the best vertex
                let best_point = points[best].clone();
                for &i in order.iter().skip(1) {
                    let v: Vec<f64> = best_point
                        .iter()
                        .zip(&points[i])
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    points[i] = project(&v);
                    match ev.eval(&points[i]) {
                        Some(c) => costs[i] = c,
                        None => return SimplexEnd::OutOfBudget,
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Dicke experiment driver
// ---------------------------------------------------------------------------

/// Settings for the period-doubling pulse search in the mean-field model.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DickeOptimizeConfig {
    pub params: DickeParams,
    /// Drive period `T`.
    pub period: f64,
    /// Harmonic bound `|A_n|, |B_n| <= chi`.
    pub chi: f64,
    /// Separate bound for `A0`; `chi` applies to it too when absent.
    pub a0_bound: Option<f64>,
    pub n_modes: usize,
    /// Mean level of the default guess (used when `guess` is None).
    pub guess_a0: f64,
    /// Explicit guess pulse; must carry `n_modes` harmonics and this period.
    pub guess: Option<Pulse>,
    /// Preparation coupling for the initial symmetry-broken state; defaults
    /// to the guess pulse's on-window mean. The same value is meant to be
    /// reused when the optimized pulse is swept over other detunings.
    pub lambda_init: Option<f64>,
    /// Burn-in periods before the cost triple is read.
    pub burn_in_periods: usize,
    /// Extra periods integrated past the burn-in.
    pub tail_periods: usize,
    pub steps_per_period: usize,
    pub eps_div: f64,
    /// Which symmetry-broken state the run is prepared in.
    pub branch: Branch,
    /// Average the cost over this many consecutive strobe triples.
    pub cost_triples: usize,
    pub budget: usize,
    pub tol: f64,
    pub seed: u64,
    pub n_starts: usize,
}

impl Default for DickeOptimizeConfig {
    /// Defaults calibrated on the working point `ε = κ = 0.05`:
    /// the 200-period burn-in lets the weakly damped envelope settle, and
    /// scoring 32 consecutive strobe triples instead of one keeps chaotic
    /// trajectories that briefly shadow the period-2 orbit from winning.
    fn default() -> Self {
        Self {
            params: DickeParams::default(),
            period: std::f64::consts::TAU,
            chi: 10.0,
            a0_bound: None,
            n_modes: 10,
            guess_a0: 0.5,
            guess: None,
            lambda_init: None,
            burn_in_periods: 200,
            tail_periods: 36,
            steps_per_period: 1000,
            eps_div: crate::cost::DICKE_EPS_DIV,
            branch: Branch::Plus,
            cost_triples: 32,
            budget: 3000,
            tol: 1e-8,
            seed: 7,
            n_starts: 3,
        }
    }
}

impl DickeOptimizeConfig {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        self.params.validate()?;
        let bad = |msg: String| Err(OptimizerError::InvalidProblem(msg));
        if !(self.period.is_finite() && self.period > 0.0) {
            return bad(format!("period must be positive, got {}", self.period));
        }
        if self.n_modes == 0 {
            return bad("n_modes must be at least 1".into());
        }
        if self.burn_in_periods == 0 {
            return bad("burn_in_periods must be at least 1".into());
        }
        if self.tail_periods < 3 {
            return bad("tail_periods must be at least 3 so the cost triple exists".into());
        }
        if self.steps_per_period < 10 {
            return bad("steps_per_period must be at least 10".into());
        }
        if self.cost_triples == 0 {
            return bad("cost_triples must be at least 1".into());
        }
        if self.cost_triples + 2 > self.tail_periods + 1 {
            return bad(format!(
                "cost_triples = {} needs tail_periods >= {}",
                self.cost_triples,
                self.cost_triples + 1
            ));
        }
        if let Some(p) = &self.guess {
            if (p.period() - self.period).abs() > 1e-12 * self.period {
                return bad(format!(
                    "guess pulse period {} does not match the configured period {}",
                    p.period(),
                    self.period
                ));
            }
            if p.fourier().n_modes() != self.n_modes {
                return bad(format!(
                    "guess pulse has {} modes, config says {}",
                    p.fourier().n_modes(),
                    self.n_modes
                ));
            }
        }
        Ok(())
    }

    /// The guess pulse to start from: the configured one, or the default
    /// first-harmonic drive `guess_a0 + (chi/(2 N_c)) sin(Ω0 t)` — the
    /// strongest single-harmonic modulation allowed, which generally does
    /// not yet lock a subharmonic response.
    pub fn guess_pulse(&self) -> Result<FourierPulse, OptimizerError> {
        match &self.guess {
            Some(Pulse::Fourier(f)) => Ok(f.clone()),
            Some(Pulse::Gated(_)) => Err(OptimizerError::InvalidProblem(
                "the cavity drive is ungated; supply a plain Fourier pulse".into(),
            )),
            None => {
                let mut b = vec![0.0; self.n_modes];
                b[0] = self.chi;
                Ok(FourierPulse::new(
                    self.guess_a0,
                    vec![0.0; self.n_modes],
                    b,
                    self.period,
                    self.chi,
                )?)
            }
        }
    }

    /// The resolved preparation coupling.
    pub fn lambda_prep(&self) -> Result<f64, OptimizerError> {
        match self.lambda_init {
            Some(l) => Ok(l),
            None => Ok(on_window_mean(&Pulse::Fourier(self.guess_pulse()?))),
        }
    }

    pub fn coefficient_bounds(&self) -> Vec<(f64, f64)> {
        symmetric_bounds(self.a0_bound.unwrap_or(self.chi), self.chi, self.n_modes)
    }

    fn horizon_periods(&self) -> usize {
        self.burn_in_periods + self.tail_periods
    }
}

/// Result bundle of a Dicke pulse search.
#[derive(Clone, Debug)]
pub struct DickeOptimizeOutcome {
    pub report: OptimizationReport,
    pub guess: FourierPulse,
    pub optimized: FourierPulse,
    /// The prepared symmetry-broken state every candidate was integrated from.
    pub initial_state: DickeState,
    /// Preparation coupling the initial state was derived from; reuse it when
    /// sweeping the optimized pulse over detunings.
    pub lambda_prep: f64,
}

/// Scores one candidate coefficient vector: integrate from the prepared
/// state under the candidate pulse, strobe `j_x`, apply the period-doubling
/// cost. Shared by the optimizer and the workbench so traces and artifacts
/// agree bit-for-bit. Diverged trajectories rank as +inf.
pub fn dicke_objective(
    cfg: &DickeOptimizeConfig,
    initial_state: DickeState,
    coeffs: &[f64],
) -> CostBreakdown {
    let pulse = match FourierPulse::from_coeffs(coeffs, cfg.period, cfg.chi) {
        Ok(p) => p,
        Err(_) => return CostBreakdown::scalar(f64::INFINITY),
    };
    let dt = cfg.period / cfg.steps_per_period as f64;
    let horizon = cfg.horizon_periods() as f64 * cfg.period;
    let tab = TabulatedPeriodic::new(&pulse, cfg.period, cfg.steps_per_period);
    match evolve_strided(initial_state, &cfg.params, &tab, horizon, dt, cfg.steps_per_period) {
        Ok(traj) => {
            let strobes = traj.component(Observable::Jx);
            crate::cost::cost_dicke_window_avg(
                &strobes,
                cfg.burn_in_periods,
                cfg.eps_div,
                cfg.cost_triples,
            )
            .unwrap_or_else(|_| CostBreakdown::scalar(f64::INFINITY))
        }
        Err(_) => CostBreakdown::scalar(f64::INFINITY),
    }
}

/// Optimizes the cavity-drive pulse for a period-doubled stroboscopic
/// response, starting every candidate trajectory from the same prepared
/// symmetry-broken state (derived from the guess pulse's on-window mean).
pub fn optimize_dicke(cfg: &DickeOptimizeConfig) -> Result<DickeOptimizeOutcome, OptimizerError> {
    cfg.validate()?;
    let guess = cfg.guess_pulse()?;
    let lambda_prep = cfg.lambda_prep()?;
    let initial_state = prepared_state(&cfg.params, lambda_prep, cfg.branch)?;

    let mut problem = OptimizationProblem::new(cfg.coefficient_bounds(), guess.coeffs());
    problem.budget = cfg.budget;
    problem.tol = cfg.tol;
    problem.seed = cfg.seed;
    problem.n_starts = cfg.n_starts;

    let report = minimize(&problem, |coeffs| dicke_objective(cfg, initial_state, coeffs))?;
    let optimized = FourierPulse::from_coeffs(&report.best_coeffs, cfg.period, cfg.chi)?;
    Ok(DickeOptimizeOutcome { report, guess, optimized, initial_state, lambda_prep })
}

// ---------------------------------------------------------------------------
// Chain experiment driver
// ---------------------------------------------------------------------------

/// Settings for the subharmonic spectrum search in the disordered chain.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainOptimizeConfig {
    pub params: ChainParams,
    pub n_modes: usize,
    /// `|A0| <= a0_bound`.
    pub a0_bound: f64,
    /// `|A_n|, |B_n| <= chi`; kept far below `a0_bound` so the optimal
    /// control comes out nearly constant over the gate.
    pub chi: f64,
    /// Constant level of the default guess.
    pub guess_a0: f64,
    pub guess: Option<Pulse>,
    pub disorder_seed: u64,
    /// Average the autocorrelation over this many realizations
    /// (seeds `disorder_seed..disorder_seed + n_disorder`).
    pub n_disorder: usize,
    /// 1-based sites entering the optimized cost.
    pub sites: Vec<usize>,
    /// Stroboscopic periods; the spectrum window is exactly this long.
    pub n_periods: usize,
    pub initial_states: InitialStates,
    pub cost: ChainCostOpts,
    pub budget: usize,
    pub tol: f64,
    pub seed: u64,
    pub n_starts: usize,
}

impl Default for ChainOptimizeConfig {
    fn default() -> Self {
        Self {
            params: ChainParams::default(),
            n_modes: 6,
            a0_bound: 1.0,
            chi: 0.0005,
            guess_a0: 0.65,
            guess: None,
            disorder_seed: 7,
            n_disorder: 1,
            sites: vec![4, 5],
            n_periods: 128,
            initial_states: InitialStates::All,
            cost: ChainCostOpts::default(),
            budget: 500,
            tol: 1e-8,
            seed: 11,
            n_starts: 3,
        }
    }
}

impl ChainOptimizeConfig {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        self.params.validate()?;
        let bad = |msg: String| Err(OptimizerError::InvalidProblem(msg));
        if self.n_modes == 0 {
            return bad("n_modes must be at least 1".into());
        }
        if self.n_periods < 8 || self.n_periods % 2 != 0 {
            return bad(format!("n_periods must be even and at least 8, got {}", self.n_periods));
        }
        if self.n_disorder == 0 {
            return bad("n_disorder must be at least 1".into());
        }
        if let Some(p) = &self.guess {
            match p {
                Pulse::Gated(g) => {
                    if g.inner().n_modes() != self.n_modes {
                        return bad(format!(
                            "guess pulse has {} modes, config says {}",
                            g.inner().n_modes(),
                            self.n_modes
                        ));
                    }
                    if (g.period() - self.params.period).abs() > 1e-12 * self.params.period {
                        return bad(format!(
                            "guess pulse period {} does not match the drive period {}",
                            g.period(),
                            self.params.period
                        ));
                    }
                }
                Pulse::Fourier(_) => {
                    return bad("the chain control is gated; supply a gated pulse".into())
                }
            }
        }
        Ok(())
    }

    /// The gate covers exactly the transverse segment of the drive cycle.
    pub fn gate_fraction(&self) -> f64 {
        self.params.t1 / self.params.period
    }

    pub fn guess_pulse(&self) -> Result<GatedPulse, OptimizerError> {
        match &self.guess {
            Some(Pulse::Gated(g)) => Ok(g.clone()),
            Some(Pulse::Fourier(_)) => Err(OptimizerError::InvalidProblem(
                "the chain control is gated; supply a gated pulse".into(),
            )),
            None => {
                let inner = FourierPulse::new(
                    self.guess_a0,
                    vec![0.0; self.n_modes],
                    vec![0.0; self.n_modes],
                    self.params.period,
                    self.chi,
                )?;
                Ok(GatedPulse::new(inner, self.gate_fraction())?)
            }
        }
    }

    pub fn coefficient_bounds(&self) -> Vec<(f64, f64)> {
        symmetric_bounds(self.a0_bound, self.chi, self.n_modes)
    }

    /// The pinned disorder realizations the objective averages over.
    pub fn disorder(&self) -> Vec<DisorderRealization> {
        (0..self.n_disorder as u64)
            .map(|k| sample_disorder(self.disorder_seed + k, &self.params))
            .collect()
    }
}

/// Result bundle of a chain pulse search.
#[derive(Clone, Debug)]
pub struct ChainOptimizeOutcome {
    pub report: OptimizationReport,
    pub guess: GatedPulse,
    pub optimized: GatedPulse,
    pub disorder: Vec<DisorderRealization>,
}

/// Site-averaged autocorrelation under `pulse`, averaged over the pinned
/// disorder realizations; the series the chain cost is computed from.
pub fn chain_signal(
    cfg: &ChainOptimizeConfig,
    disorder: &[DisorderRealization],
    pulse: &GatedPulse,
    sites: &[usize],
) -> Result<Vec<f64>, OptimizerError> {
    let phi = x_rotation_angle(pulse, &cfg.params)?;
    let mut mean = vec![0.0; cfg.n_periods + 1];
    for d in disorder {
        let r = autocorrelation(sites, d, phi, &cfg.params, cfg.n_periods, cfg.initial_states)?;
        for (m, v) in mean.iter_mut().zip(r.site_averaged()) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= disorder.len() as f64;
    }
    Ok(mean)
}

/// Scores one candidate coefficient vector for the chain problem.
pub fn chain_objective(
    cfg: &ChainOptimizeConfig,
    disorder: &[DisorderRealization],
    coeffs: &[f64],
) -> CostBreakdown {
    let pulse = match FourierPulse::from_coeffs(coeffs, cfg.params.period, cfg.chi)
        .map_err(OptimizerError::from)
        .and_then(|inner| GatedPulse::new(inner, cfg.gate_fraction()).map_err(Into::into))
    {
        Ok(p) => p,
        Err(_) => return CostBreakdown::scalar(f64::INFINITY),
    };
    let series = match chain_signal(cfg, disorder, &pulse, &cfg.sites) {
        Ok(s) => s,
        Err(_) => return CostBreakdown::scalar(f64::INFINITY),
    };
    match stroboscopic_fft(&series[..cfg.n_periods], cfg.params.period) {
        Ok(spectrum) => cost_chain(&spectrum, &cfg.cost),
        Err(_) => CostBreakdown::scalar(f64::INFINITY),
    }
}

/// Optimizes the gated transverse-field control so the site-averaged
/// autocorrelation spectrum turns into a subharmonic delta.
pub fn optimize_chain(cfg: &ChainOptimizeConfig) -> Result<ChainOptimizeOutcome, OptimizerError> {
    cfg.validate()?;
    let guess = cfg.guess_pulse()?;
    let disorder = cfg.disorder();

    let mut problem = OptimizationProblem::new(cfg.coefficient_bounds(), guess.inner().coeffs());
    problem.budget = cfg.budget;
    problem.tol = cfg.tol;
    problem.seed = cfg.seed;
    problem.n_starts = cfg.n_starts;

    let report = minimize(&problem, |coeffs| chain_objective(cfg, &disorder, coeffs))?;
    let optimized = GatedPulse::new(
        FourierPulse::from_coeffs(&report.best_coeffs, cfg.params.period, cfg.chi)?,
        cfg.gate_fraction(),
    )?;
    Ok(ChainOptimizeOutcome { report, guess, optimized, disorder })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quadratic(center: f64) -> impl Fn(&[f64]) -> CostBreakdown {
        move |c: &[f64]| CostBreakdown::scalar(c.iter().map(|x| (x - center) * (x - center)).sum())
    }

    fn problem3() -> OptimizationProblem {
        let mut p = OptimizationProblem::new(vec![(-1.0, 1.0); 3], vec![0.9, -0.8, 0.0]);
        p.seed = 42;
        p
    }

    #[test]
    fn convex_quadratic_converges() {
        let report = minimize(&problem3(), quadratic(0.3)).unwrap();
        assert!(report.best_cost < 1e-8, "best {}", report.best_cost);
        for c in &report.best_coeffs {
            assert_abs_diff_eq!(*c, 0.3, epsilon = 1e-3);
        }
        assert!(report.converged);
    }

    #[test]
    fn clamped_optimum_lands_on_the_boundary() {
        let report = minimize(&problem3(), quadratic(5.0)).unwrap();
        for c in &report.best_coeffs {
            assert!((c - 1.0).abs() < 1e-9, "coordinate {c}");
        }
        assert_abs_diff_eq!(report.best_cost, 3.0 * 16.0, epsilon = 1e-6);
    }

    #[test]
    fn rosenbrock_beats_grid_refinement_oracle() {
        let rosenbrock = |c: &[f64]| {
            let (x, y) = (c[0], c[1]);
            CostBreakdown::scalar((1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2))
        };
        let mut p = OptimizationProblem::new(vec![(-2.0, 2.0); 2], vec![-1.2, 1.0]);
        p.budget = 5000;
        p.seed = 1;
        let report = minimize(&p, rosenbrock).unwrap();
        assert!(report.best_cost < 1e-4, "best {}", report.best_cost);

        // independent coarse-to-fine grid search oracle
        let f = |x: f64, y: f64| (1.0 - x).powi(2) + 100.0 * (y - x * x).powi(2);
        let mut cx = 0.0;
        let mut cy = 0.0;
        let mut half = 2.0;
        let mut oracle = f64::INFINITY;
        for _ in 0..6 {
            let mut best = (cx, cy, f64::INFINITY);
            for i in 0..=40 {
                for j in 0..=40 {
                    let x = (cx - half + i as f64 * half / 20.0).clamp(-2.0, 2.0);
                    let y = (cy - half + j as f64 * half / 20.0).clamp(-2.0, 2.0);
                    let v = f(x, y);
                    if v < best.2 {
                        best = (x, y, v);
                    }
                }
            }
            cx = best.0;
            cy = best.1;
            oracle = best.2;
            half /= 10.0;
        }
        assert!((cx - 1.0).abs() < 1e-3 && (cy - 1.0).abs() < 1e-3);
        assert!(report.best_cost <= oracle + 1e-6, "NM {} vs grid {}", report.best_cost, oracle);
    }

    #[test]
    fn report_invariants_hold() {
        let report = minimize(&problem3(), quadratic(0.3)).unwrap();
        assert_eq!(report.trace.len(), report.n_evals);
        let min_traced = report.trace.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
        assert_eq!(report.best_cost, min_traced);
        // never worse than the (projected) initial point
        assert!(report.best_cost <= report.trace[0].cost);
        // monotone best-so-far
        let mut best = f64::INFINITY;
        for r in &report.trace {
            best = best.min(r.cost);
            assert!(best <= r.cost);
        }
        // feasibility of every evaluated point
        for r in &report.trace {
            for (c, (lo, hi)) in r.coeffs.iter().zip(&problem3().bounds) {
                assert!(*c >= *lo && *c <= *hi);
            }
        }
        // eval indices are consecutive
        for (k, r) in report.trace.iter().enumerate() {
            assert_eq!(r.eval, k);
        }
    }

    #[test]
    fn budget_is_a_hard_cap() {
        let mut p = problem3();
        p.budget = 37;
        let report = minimize(&p, quadratic(0.3)).unwrap();
        assert_eq!(report.n_evals, 37);
    }

    #[test]
    fn identical_seeds_give_identical_reports() {
        let a = minimize(&problem3(), quadratic(0.2)).unwrap();
        let b = minimize(&problem3(), quadratic(0.2)).unwrap();
        assert_eq!(a.best_coeffs, b.best_coeffs);
        assert_eq!(a.best_cost, b.best_cost);
        assert_eq!(a.n_evals, b.n_evals);
        for (ra, rb) in a.trace.iter().zip(&b.trace) {
            assert_eq!(ra.coeffs, rb.coeffs);
            assert_eq!(ra.cost, rb.cost);
        }
    }

    #[test]
    fn non_finite_at_initial_point_is_an_error() {
        let p = OptimizationProblem::new(vec![(-1.0, 1.0)], vec![0.0]);
        let r = minimize(&p, |_| CostBreakdown::scalar(f64::NAN));
        assert!(matches!(r, Err(OptimizerError::NonFiniteAtInitial)));
    }

    #[test]
    fn nan_region_is_survivable() {
        // objective undefined for x < 0: those vertices rank as +inf and the
        // search still finds the feasible minimum at 0.25
        let f = |c: &[f64]| {
            let x = c[0];
            if x < 0.0 {
                CostBreakdown::scalar(f64::NAN)
            } else {
                CostBreakdown::scalar((x - 0.25) * (x - 0.25))
            }
        };
        let mut p = OptimizationProblem::new(vec![(-1.0, 1.0)], vec![0.9]);
        p.seed = 3;
        let report = minimize(&p, f).unwrap();
        assert!(report.best_cost < 1e-8);
        assert_abs_diff_eq!(report.best_coeffs[0], 0.25, epsilon = 1e-3);
    }

    #[test]
    fn flat_objective_converges_immediately() {
        let mut p = problem3();
        p.budget = 200;
        let report = minimize(&p, |_| CostBreakdown::scalar(1.0)).unwrap();
        assert!(report.n_evals <= 200);
        assert!(report.converged);
    }

    #[test]
    fn plateau_with_zero_tol_collapses_and_restarts() {
        let mut p = problem3();
        p.budget = 2000;
        p.tol = 0.0;
        p.n_starts = 1;
        // strictly flat objective: spread never drops below tol = 0, so the
        // simplex shrinks until it collapses and the search reseeds
        let report = minimize(&p, |_| CostBreakdown::scalar(1.0)).unwrap();
        assert!(report.restarts_used >= 1, "restarts {}", report.restarts_used);
        assert!(report.n_evals <= 2000);
    }

    #[test]
    fn dicke_config_validation() {
        DickeOptimizeConfig::default().validate().unwrap();
        let cfg = DickeOptimizeConfig { n_modes: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = DickeOptimizeConfig { tail_periods: 2, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = DickeOptimizeConfig { cost_triples: 4, ..Default::default() };
        assert!(cfg.validate().is_err()); // needs tail_periods >= 5
    }

    #[test]
    fn chain_config_validation() {
        ChainOptimizeConfig::default().validate().unwrap();
        let cfg = ChainOptimizeConfig { n_periods: 9, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = ChainOptimizeConfig { n_disorder: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn dicke_cost_floor_is_one() {
        // |j_x| <= 1/2 bounds the flip term: F1 >= 1/(2 * 1/2) = 1 for any
        // trajectory, so even a short pinned-seed run can never report less
        let cfg = DickeOptimizeConfig {
            n_modes: 2,
            budget: 60,
            n_starts: 1,
            burn_in_periods: 10,
            steps_per_period: 200,
            ..Default::default()
        };
        let out = optimize_dicke(&cfg).unwrap();
        assert!(out.report.best_cost >= 1.0 - 1e-12, "best {}", out.report.best_cost);
        // and the search improved on the period-1 guess
        assert!(out.report.best_cost < out.report.trace[0].cost);
    }

    #[test]
    fn chain_zero_control_scores_the_global_minimum() {
        // θ = 0 is the perfect flip: unit subharmonic delta, F2 = 1/0.95
        let cfg = ChainOptimizeConfig {
            params: ChainParams { length: 6, ..ChainParams::default() },
            n_periods: 32,
            ..Default::default()
        };
        let disorder = cfg.disorder();
        let zero = vec![0.0; 13];
        let c = chain_objective(&cfg, &disorder, &zero);
        assert_abs_diff_eq!(c.total, 1.0 / 0.95, epsilon = 1e-9);
    }

    #[test]
    fn chain_optimize_smoke_run_improves_on_guess() {
        let cfg = ChainOptimizeConfig {
            params: ChainParams { length: 4, ..ChainParams::default() },
            sites: vec![2, 3],
            n_periods: 16,
            budget: 40,
            n_starts: 1,
            ..Default::default()
        };
        let out = optimize_chain(&cfg).unwrap();
        assert!(out.report.best_cost <= out.report.trace[0].cost);
        assert_eq!(out.optimized.gate_fraction(), 0.5);
        assert!(out.optimized.inner().a0().abs() <= cfg.a0_bound);
    }

    #[test]
    fn trace_record_json_shape() {
        let r = TraceRecord {
            eval: 3,
            coeffs: vec![0.5, -0.25],
            cost: 1.25,
            terms: [("match".to_string(), 0.0), ("penalty".to_string(), 1.25)].into(),
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(
            s,
            "{\"eval\":3,\"coeffs\":[0.5,-0.25],\"cost\":1.25,\"terms\":{\"match\":0.0,\"penalty\":1.25}}"
        );
    }
}
