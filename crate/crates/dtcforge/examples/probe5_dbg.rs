use dtcforge::cost::cost_dicke_window_avg;
use dtcforge::dicke::*;
use dtcforge::optimizer::*;
use dtcforge::pulse::*;
use dtcforge::spectral::{classify_dicke, ClassifierTolerances};

fn f1_at(pulse: &FourierPulse, eps: f64, lambda_prep: f64, s: usize, triples: usize) -> String {
    let period = pulse.period();
    let spp = 1000;
    let params = DickeParams { epsilon: eps, ..Default::default() };
    let init = prepared_state(&params, lambda_prep, Branch::Plus).unwrap();
    let dt = period / spp as f64;
    let horizon = (s + triples + 3) as f64 * period;
    let tab = TabulatedPeriodic::new(pulse, period, spp);
    let traj = evolve_strided(init, &params, &tab, horizon, dt, spp).unwrap();
    let strobes = traj.component(Observable::Jx);
    let c = cost_dicke_window_avg(&strobes, s, 1e-12, triples).unwrap();
    format!("F1(s={s},w={triples}) = {:.4} (match={:.4} penalty={:.4})", c.total, c.terms["match"], c.terms["penalty"])
}

fn square_scaled(scale: f64, period: f64) -> FourierPulse {
    let mut b = vec![0.0; 10];
    for (n, bn) in b.iter_mut().enumerate() {
        let k = n + 1;
        if k % 2 == 1 {
            *bn = (20.0 * 2.0 / (std::f64::consts::PI * k as f64)).min(10.0) * scale;
        }
    }
    FourierPulse::new(0.5 * scale, vec![0.0; 10], b, period, 10.0).unwrap()
}

fn classify_from(pulse: &FourierPulse, eps: f64, lambda_prep: f64, burn: usize) -> String {
    let period = pulse.period();
    let spp = 1000;
    let params = DickeParams { epsilon: eps, ..Default::default() };
    let init = match prepared_state(&params, lambda_prep, Branch::Plus) {
        Ok(s) => s,
        Err(e) => return format!("init failed: {e}"),
    };
    let dt = period / spp as f64;
    let horizon = (burn + 64) as f64 * period;
    let tab = TabulatedPeriodic::new(pulse, period, spp);
    let traj = evolve(init, &params, &tab, horizon, dt).unwrap();
    let jx = traj.component(Observable::Jx);
    let strobes: Vec<f64> = jx.iter().step_by(spp).copied().collect();
    let tail = &strobes[burn..];
    let c = classify_dicke(tail, &jx[burn * spp..], dt, period, &ClassifierTolerances::default())
        .unwrap();
    let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
    let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
    format!("{} flip={flip:.3e} d2={d2:.3e}", c.label)
}

fn main() {
    let period = std::f64::consts::TAU;

    println!("== razor pulse (optimized at s=200) scored at s=50 ==");
    let cfg200 = DickeOptimizeConfig { budget: 3000, seed: 7, ..Default::default() };
    let razor = optimize_dicke(&cfg200).unwrap();
    println!("razor  : {}", f1_at(&razor.optimized, 0.05, razor.lambda_prep, 50, 32));
    println!("razor  : {}", f1_at(&razor.optimized, 0.05, razor.lambda_prep, 200, 32));
    for scale in [0.7, 0.9] {
        let sq = square_scaled(scale, period);
        println!("sq {scale}: {}", f1_at(&sq, 0.05, razor.lambda_prep, 50, 32));
        println!("sq {scale}: {}", f1_at(&sq, 0.05, razor.lambda_prep, 200, 32));
    }

    println!("\n== optimize with s=50 (cost), classify with burn 200 ==");
    let cfg50 = DickeOptimizeConfig {
        budget: 3000,
        seed: 7,
        burn_in_periods: 50,
        ..Default::default()
    };
    let out = optimize_dicke(&cfg50).unwrap();
    println!("best={:.6} evals={}", out.report.best_cost, out.report.n_evals);
    println!("guess @0.05: {}", classify_from(&out.guess, 0.05, out.lambda_prep, 200));
    for eps in [0.04, 0.05, 0.06, 0.10] {
        println!("opt @{eps}: {}", classify_from(&out.optimized, eps, out.lambda_prep, 200));
    }
}
