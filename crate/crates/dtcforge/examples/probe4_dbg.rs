use dtcforge::dicke::*;
use dtcforge::optimizer::*;
use dtcforge::pulse::*;
use dtcforge::spectral::{classify_dicke, ClassifierTolerances};

fn classify_from(
    pulse: &FourierPulse,
    eps: f64,
    lambda_prep: f64,
    burn: usize,
    spp: usize,
) -> String {
    let period = pulse.period();
    let params = DickeParams { epsilon: eps, ..Default::default() };
    let init = match prepared_state(&params, lambda_prep, Branch::Plus) {
        Ok(s) => s,
        Err(e) => return format!("init failed: {e}"),
    };
    let dt = period / spp as f64;
    let horizon = (burn + 64) as f64 * period;
    let tab = TabulatedPeriodic::new(pulse, period, spp);
    let traj = match evolve(init, &params, &tab, horizon, dt) {
        Ok(t) => t,
        Err(e) => return format!("diverged: {e}"),
    };
    let jx = traj.component(Observable::Jx);
    let strobes: Vec<f64> = jx.iter().step_by(spp).copied().collect();
    let tail = &strobes[burn..];
    let c = classify_dicke(tail, &jx[burn * spp..], dt, period, &ClassifierTolerances::default())
        .unwrap();
    let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
    let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
    format!("{} flip={flip:.3e} d2={d2:.3e}", c.label)
}

fn square_approx(lambda0: f64, n_modes: usize, chi: f64, period: f64) -> FourierPulse {
    let mut b = vec![0.0; n_modes];
    for (n, bn) in b.iter_mut().enumerate() {
        let k = n + 1;
        if k % 2 == 1 {
            *bn = (2.0 * n_modes as f64 * 2.0 * lambda0 / (std::f64::consts::PI * k as f64))
                .min(chi);
        }
    }
    FourierPulse::new(lambda0 / 2.0, vec![0.0; n_modes], b, period, chi).unwrap()
}

fn main() {
    let period = std::f64::consts::TAU;

    println!("== plain square approx, eps sweep, own-mean preparation ==");
    for scale in [0.7, 0.9, 1.0] {
        let base = square_approx(1.0, 10, 10.0, period);
        let coeffs: Vec<f64> = base.coeffs().iter().map(|c| c * scale).collect();
        let p = FourierPulse::from_coeffs(&coeffs, period, 10.0).unwrap();
        let leff = on_window_mean(&Pulse::Fourier(p.clone()));
        for eps in [0.04, 0.05, 0.06, 0.10] {
            println!("scale={scale} eps={eps}: {}", classify_from(&p, eps, leff, 200, 1000));
        }
        println!();
    }

    println!("== the criterion-7 optimized pulse at eps=0.06: burn-in and basin scan ==");
    let cfg = DickeOptimizeConfig { budget: 3000, seed: 7, ..Default::default() };
    let out = optimize_dicke(&cfg).unwrap();
    println!("best={} lambda_prep={:.4}", out.report.best_cost, out.lambda_prep);
    for burn in [200, 500, 1000] {
        println!(
            "burn={burn} lp=0.8183: {}",
            classify_from(&out.optimized, 0.06, out.lambda_prep, burn, 1000)
        );
    }
    for lp in [0.55, 0.65, 0.75, 0.9, 1.0, 1.1] {
        println!("lp={lp}: {}", classify_from(&out.optimized, 0.06, lp, 200, 1000));
    }
}
