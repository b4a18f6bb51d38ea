use dtcforge::cost::cost_dicke_window_avg;
use dtcforge::dicke::*;
use dtcforge::pulse::*;
use dtcforge::spectral::{classify_dicke, ClassifierTolerances};

fn tols() -> ClassifierTolerances {
    ClassifierTolerances { tol_fix: 0.05, tol_flip: 0.05, conc_min: 0.4 }
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
    let burn = 200usize;
    let spp = 1000usize;
    let params = DickeParams::default();

    println!("== scaled square approx (scale * square(l0=1)), eps=0.05, burn=200, F1 over 32 triples ==");
    for scale in [0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.2, 1.5, 2.0] {
        let base = square_approx(1.0, 10, 10.0, period);
        let coeffs: Vec<f64> = base.coeffs().iter().map(|c| c * scale).collect();
        let p = FourierPulse::from_coeffs(&coeffs, period, 10.0).unwrap();
        let leff = (p.integral(0.0, period / 2.0) / (period / 2.0)).abs();
        let lc = lambda_critical(&params);
        if leff <= lc {
            println!("scale={scale}: leff={leff:.3} below threshold, no prepared state");
            continue;
        }
        let init = steady_states(&params, leff).select(Branch::Plus);
        let dt = period / spp as f64;
        let horizon = (burn + 64) as f64 * period;
        let tab = TabulatedPeriodic::new(&p, period, spp);
        let traj = evolve(init, &params, &tab, horizon, dt).unwrap();
        let jx = traj.component(Observable::Jx);
        let strobes: Vec<f64> = jx.iter().step_by(spp).copied().collect();
        let tail = &strobes[burn..];
        let c = classify_dicke(tail, &jx[burn * spp..], dt, period, &tols()).unwrap();
        let f1 = cost_dicke_window_avg(&strobes, burn, 1e-12, 32).unwrap();
        let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
        let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
        println!(
            "scale={scale}: leff={leff:.3} {} flip={flip:.3e} d2={d2:.3e} F1_32={:.4} (match={:.4}, penalty={:.4})",
            c.label, f1.total, f1.terms["match"], f1.terms["penalty"]
        );
    }
}
