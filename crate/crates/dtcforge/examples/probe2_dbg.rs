use dtcforge::dicke::*;
use dtcforge::pulse::*;
use dtcforge::spectral::{classify_dicke, ClassifierTolerances};

fn classify_control<C: Control>(control: &C, lambda_eff: f64, eps: f64, burn: usize) -> String {
    let period = std::f64::consts::TAU;
    let spp = 1000;
    let params = DickeParams { epsilon: eps, ..Default::default() };
    let init = steady_states(&params, lambda_eff).select(Branch::Plus);
    let dt = period / spp as f64;
    let horizon = (burn + 64) as f64 * period;
    let tab = TabulatedPeriodic::new(control, period, spp);
    match evolve(init, &params, &tab, horizon, dt) {
        Ok(traj) => {
            let jx = traj.component(Observable::Jx);
            let dense = &jx[burn * spp..];
            let strobes: Vec<f64> = jx.iter().step_by(spp).copied().collect();
            let tail = &strobes[burn..];
            let c =
                classify_dicke(tail, dense, dt, period, &ClassifierTolerances::default()).unwrap();
            let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
            let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
            format!("{} flip={flip:.3e} d2={d2:.3e}", c.label)
        }
        Err(e) => format!("diverged: {e}"),
    }
}

fn square_approx(lambda0: f64, n_modes: usize, chi: f64, period: f64) -> FourierPulse {
    // truncated Fourier series of the on/off square, coefficients clamped
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
    println!("== on-off lambda0=1, eps=0.05, burn-in scan ==");
    for burn in [50, 100, 200, 300, 500] {
        let p = OnOffPulse { lambda0: 1.0, period };
        println!("burn={burn}: {}", classify_control(&p, 1.0, 0.05, burn));
    }
    println!("== on-off stronger drives, eps=0.05, burn=50 and 200 ==");
    for l0 in [2.0, 4.0, 8.0] {
        let p = OnOffPulse { lambda0: l0, period };
        println!("l0={l0} burn=50 : {}", classify_control(&p, l0, 0.05, 50));
        println!("l0={l0} burn=200: {}", classify_control(&p, l0, 0.05, 200));
    }
    println!("== truncated square-wave CRAB approx, eps=0.05 ==");
    for l0 in [1.0, 2.0, 4.0] {
        let p = square_approx(l0, 10, 10.0, period);
        let leff = p.integral(0.0, period / 2.0) / (period / 2.0);
        for burn in [50, 200] {
            println!("l0={l0} leff={leff:.2} burn={burn}: {}", classify_control(&p, leff, 0.05, burn));
        }
    }
    println!("== square approx eps sweep at the l0 that locks ==");
    for l0 in [2.0, 4.0] {
        let p = square_approx(l0, 10, 10.0, period);
        let leff = p.integral(0.0, period / 2.0) / (period / 2.0);
        for eps in [0.04, 0.05, 0.06, 0.10] {
            println!("l0={l0} eps={eps} burn=200: {}", classify_control(&p, leff, eps, 200));
        }
    }
}
