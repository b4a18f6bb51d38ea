use dtcforge::dicke::*;
use dtcforge::pulse::*;
use dtcforge::spectral::{classify_dicke, ClassifierTolerances};

fn classify_control<C: Control>(
    control: &C,
    lambda_eff: f64,
    eps: f64,
    spp: usize,
    burn: usize,
) -> String {
    let period = std::f64::consts::TAU;
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
            let c = classify_dicke(tail, dense, dt, period, &ClassifierTolerances::default())
                .unwrap();
            let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
            let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
            format!("{} flip={flip:.3e} d2={d2:.3e} s50..s53=[{:.3},{:.3},{:.3},{:.3}]", c.label, tail[0], tail[1], tail[2], tail[3])
        }
        Err(e) => format!("diverged: {e}"),
    }
}

fn main() {
    let period = std::f64::consts::TAU;
    println!("== on-off baseline, lambda0 = 1, eps sweep ==");
    for eps in [0.04, 0.05, 0.06, 0.10] {
        let p = OnOffPulse { lambda0: 1.0, period };
        println!("eps={eps}: {}", classify_control(&p, 1.0, eps, 1000, 50));
    }
    println!("== CRAB sine approximations (A0, B1), eps=0.05 ==");
    for (a0, b1) in
        [(0.5, 10.0), (0.5, 8.0), (0.5, 6.0), (0.55, 10.0), (0.65, 10.0), (0.8, 10.0), (0.5, 12.7_f64.min(10.0))]
    {
        let p =
            FourierPulse::new(a0, vec![0.0; 10], { let mut b = vec![0.0; 10]; b[0] = b1; b }, period, 10.0)
                .unwrap();
        let leff = p.integral(0.0, period / 2.0) / (period / 2.0);
        println!("A0={a0} B1={b1} leff={leff:.3}: {}", classify_control(&p, leff, 0.05, 1000, 50));
    }
    println!("== same but eps sweep for (0.5, 10) ==");
    for eps in [0.04, 0.05, 0.06, 0.10] {
        let p =
            FourierPulse::new(0.5, vec![0.0; 10], { let mut b = vec![0.0; 10]; b[0] = 10.0; b }, period, 10.0)
                .unwrap();
        let leff = p.integral(0.0, period / 2.0) / (period / 2.0);
        println!("eps={eps}: {}", classify_control(&p, leff, eps, 1000, 50));
    }
}
