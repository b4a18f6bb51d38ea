use dtcforge::dicke::*;
use dtcforge::optimizer::*;
use dtcforge::pulse::{Pulse, TabulatedPeriodic};
use dtcforge::spectral::{classify_dicke, ClassifierTolerances, PhaseLabel};
use std::time::Instant;

fn classify_pulse(
    cfg: &DickeOptimizeConfig,
    pulse: &dtcforge::pulse::FourierPulse,
    eps: f64,
    analysis: usize,
) -> (PhaseLabel, f64, f64) {
    let params = DickeParams { epsilon: eps, ..cfg.params };
    let init = driven_initial_state(&params, &Pulse::Fourier(pulse.clone()), cfg.branch).unwrap();
    let dt = cfg.period / cfg.steps_per_period as f64;
    let horizon = (cfg.burn_in_periods + analysis) as f64 * cfg.period;
    let tab = TabulatedPeriodic::new(pulse, cfg.period, cfg.steps_per_period);
    let traj = evolve(init, &params, &tab, horizon, dt).unwrap();
    let jx = traj.component(Observable::Jx);
    let skip = cfg.burn_in_periods * cfg.steps_per_period;
    let dense = &jx[skip..];
    let strobes: Vec<f64> = jx.iter().step_by(cfg.steps_per_period).copied().collect();
    let strobe_tail = &strobes[cfg.burn_in_periods..];
    let c =
        classify_dicke(strobe_tail, dense, dt, cfg.period, &ClassifierTolerances::default())
            .unwrap();
    let min_flip = strobe_tail
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min);
    let max_d2 = strobe_tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
    (c.label, min_flip, max_d2)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let budget: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(2000);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let cfg = DickeOptimizeConfig { budget, seed, ..Default::default() };

    let t0 = Instant::now();
    let out = optimize_dicke(&cfg).unwrap();
    println!(
        "optimize: best={:.6e} evals={} restarts={} converged={} time={:.1?}",
        out.report.best_cost,
        out.report.n_evals,
        out.report.restarts_used,
        out.report.converged,
        t0.elapsed()
    );
    println!("guess cost (trace[0]) = {:.6e}", out.report.trace[0].cost);
    println!("optimized coeffs: {:?}", out.report.best_coeffs.iter().map(|v| (v * 1000.0).round() / 1000.0).collect::<Vec<_>>());

    let (label, flip, d2) = classify_pulse(&cfg, &out.guess, cfg.params.epsilon, 64);
    println!("guess @ eps=0.05: {label} (min_flip={flip:.3e}, max_d2={d2:.3e})");
    for eps in [0.04, 0.05, 0.06, 0.10] {
        let (label, flip, d2) = classify_pulse(&cfg, &out.optimized, eps, 64);
        println!("optimized @ eps={eps}: {label} (min_flip={flip:.3e}, max_d2={d2:.3e})");
    }
}
