use dtcforge::dicke::*;
use dtcforge::optimizer::*;
use dtcforge::pulse::{FourierPulse, Pulse, TabulatedPeriodic};
use dtcforge::spectral::{classify_dicke, ClassifierTolerances};
use std::time::Instant;

fn tols() -> ClassifierTolerances {
    ClassifierTolerances { tol_fix: 0.05, tol_flip: 0.05, conc_min: 0.4 }
}

fn classify_pulse(
    cfg: &DickeOptimizeConfig,
    pulse: &FourierPulse,
    eps: f64,
    analysis: usize,
    lambda_prep: f64,
) -> String {
    let params = DickeParams { epsilon: eps, ..cfg.params };
    let init = match prepared_state(&params, lambda_prep, cfg.branch) {
        Ok(s) => s,
        Err(e) => return format!("init failed: {e}"),
    };
    let dt = cfg.period / cfg.steps_per_period as f64;
    let horizon = (cfg.burn_in_periods + analysis) as f64 * cfg.period;
    let tab = TabulatedPeriodic::new(pulse, cfg.period, cfg.steps_per_period);
    let traj = match evolve(init, &params, &tab, horizon, dt) {
        Ok(t) => t,
        Err(e) => return format!("diverged: {e}"),
    };
    let jx = traj.component(Observable::Jx);
    let skip = cfg.burn_in_periods * cfg.steps_per_period;
    let strobes: Vec<f64> = jx.iter().step_by(cfg.steps_per_period).copied().collect();
    let tail = &strobes[cfg.burn_in_periods..];
    let c = classify_dicke(tail, &jx[skip..], dt, cfg.period, &tols()).unwrap();
    let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
    let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
    format!("{} flip={flip:.3e} d2={d2:.3e} peak={:.3}@{:.3} res={:.3}", c.label, c.peak_mag, c.peak_freq, c.residual)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(4000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let triples: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(1);
    let cfg = DickeOptimizeConfig {
        budget,
        seed,
        cost_triples: triples,
        tail_periods: 4 + triples,
        ..Default::default()
    };

    let t0 = Instant::now();
    let out = optimize_dicke(&cfg).unwrap();
    println!(
        "budget={budget} seed={seed} triples={triples}: best={:.6} evals={} restarts={} time={:.0?}",
        out.report.best_cost, out.report.n_evals, out.report.restarts_used, t0.elapsed()
    );
    println!("  lambda_prep = {:.4}", out.lambda_prep);
    println!(
        "  guess @0.05:  {}",
        classify_pulse(&cfg, &out.guess, 0.05, 64, out.lambda_prep)
    );
    for eps in [0.04, 0.05, 0.06, 0.10] {
        println!(
            "  opt @{eps}: {}",
            classify_pulse(&cfg, &out.optimized, eps, 64, out.lambda_prep)
        );
    }
}
