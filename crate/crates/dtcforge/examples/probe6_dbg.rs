use dtcforge::dicke::*;
use dtcforge::optimizer::*;
use dtcforge::pulse::*;
use dtcforge::spectral::{classify_dicke, ClassifierTolerances, PhaseLabel};

fn classify_from(
    pulse: &FourierPulse,
    eps: f64,
    lambda_prep: f64,
    burn: usize,
) -> (PhaseLabel, f64, f64) {
    let period = pulse.period();
    let spp = 1000;
    let params = DickeParams { epsilon: eps, ..Default::default() };
    let init = match prepared_state(&params, lambda_prep, Branch::Plus) {
        Ok(s) => s,
        Err(_) => return (PhaseLabel::Thermal, f64::NAN, f64::NAN),
    };
    let dt = period / spp as f64;
    let horizon = (burn + 64) as f64 * period;
    let tab = TabulatedPeriodic::new(pulse, period, spp);
    let traj = match evolve(init, &params, &tab, horizon, dt) {
        Ok(t) => t,
        Err(_) => return (PhaseLabel::Thermal, f64::NAN, f64::NAN),
    };
    let jx = traj.component(Observable::Jx);
    let strobes: Vec<f64> = jx.iter().step_by(spp).copied().collect();
    let tail = &strobes[burn..];
    let c = classify_dicke(tail, &jx[burn * spp..], dt, period, &ClassifierTolerances::default())
        .unwrap();
    let flip = tail.windows(2).map(|w| (w[0] - w[1]).abs()).fold(f64::INFINITY, f64::min);
    let d2 = tail.windows(3).map(|w| (w[0] - w[2]).abs()).fold(0.0f64, f64::max);
    (c.label, flip, d2)
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let burn: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(100);
    let budgets: Vec<usize> = args
        .get(2)
        .map(|s| s.split(',').map(|p| p.parse().unwrap()).collect())
        .unwrap_or_else(|| vec![600, 1000, 1500, 2000, 3000]);
    for budget in budgets {
        let cfg = DickeOptimizeConfig {
            budget,
            seed: 7,
            n_starts: 1,
            burn_in_periods: burn,
            ..Default::default()
        };
        let out = match optimize_dicke(&cfg) {
            Ok(o) => o,
            Err(e) => {
                println!("s={burn} budget={budget}: failed {e}");
                continue;
            }
        };
        let mut line = format!("s={burn} budget={budget} best={:.4}:", out.report.best_cost);
        let mut ok = true;
        for eps in [0.04, 0.05, 0.06, 0.10] {
            let (label, flip, d2) = classify_from(&out.optimized, eps, out.lambda_prep, 200);
            let short = match label {
                PhaseLabel::Dtc => "DTC",
                PhaseLabel::LimitCycle => "LC ",
                PhaseLabel::Thermal => "TH ",
                PhaseLabel::Period1 => "P1 ",
            };
            line += &format!("  {eps}:{short}(f={flip:.2},d2={d2:.1e})");
            let want_dtc = eps == 0.05 || eps == 0.06;
            let is_dtc = label == PhaseLabel::Dtc;
            if want_dtc != is_dtc && eps != 0.04 {
                ok = false;
            }
        }
        println!("{line}  {}", if ok { "<-- PROFILE OK" } else { "" });
    }
}
