// scratch probe: rho - sigma landscape and w sign structure
use hyperwehrl::ode::{bisect_ground_state, critical_points, shoot, sigma_of_beta, v_beta_and_rho, OdeParams};

fn main() {
    let presets: Vec<(&str, OdeParams)> = vec![
        ("literal kq=3", OdeParams::paper_literal(3.0, 1.0).unwrap()),
        ("literal kq=4", OdeParams::paper_literal(4.0, 1.0).unwrap()),
        ("quarter kq=3", OdeParams::extremizer_consistent(3.0, 3.0).unwrap()),
        ("quarter kq=4", OdeParams::extremizer_consistent(4.0, OdeParams::gamma_for_target_alpha(4.0, 4.0)).unwrap()),
    ];
    for (name, p) in presets {
        let astar = bisect_ground_state(&p, 1e-8).unwrap();
        println!("== {name}: alpha* = {astar:.8}, xi0 = {:.6}", critical_points(&p).xi0);
        for rel in [1.0, 1.02, 1.1, 1.3] {
            let alpha = astar * rel;
            let traj = shoot(alpha, &p, 40.0, 1e-10).unwrap();
            let bb = p.beta_bar(alpha);
            let mut min_gap = f64::INFINITY;
            let mut max_gap = f64::NEG_INFINITY;
            let mut crossings = 0;
            let mut prev: Option<f64> = None;
            let mut err = String::new();
            for i in 1..=30 {
                let beta = bb * i as f64 / 31.0;
                match (sigma_of_beta(&traj, beta), v_beta_and_rho(&traj, beta)) {
                    (Ok(s), Ok((_, r))) => {
                        let g = r - s;
                        min_gap = min_gap.min(g);
                        max_gap = max_gap.max(g);
                        if let Some(pg) = prev {
                            if (pg < 0.0) != (g < 0.0) { crossings += 1; }
                        }
                        prev = Some(g);
                    }
                    (a, b) => {
                        err = format!("beta {beta:.3}: sigma {:?} rho {:?}", a.err(), b.err());
                        break;
                    }
                }
            }
            // w sign structure
            let end = traj.analysis_end();
            let mut w_changes = 0;
            let mut first_zero = f64::NAN;
            for j in 1..traj.taus.len() {
                if traj.taus[j] > end { break; }
                if traj.w[j-1].signum() != traj.w[j].signum() {
                    if w_changes == 0 { first_zero = traj.taus[j]; }
                    w_changes += 1;
                }
            }
            println!("  a/a*={rel:.2} [{:?}] beta_bar={bb:.4} gap(min,max)=({min_gap:.4},{max_gap:.4}) crossings={crossings} w_changes={w_changes} first_w_zero={first_zero:.4} tau1={:?} analysis_end={end:.3} {err}",
                traj.classification, traj.tau1());
        }
    }
}
