// scratch probe
use hyperwehrl::functionals::fisher_integral;
use hyperwehrl::hyp_geom::QuadratureSpec;
use hyperwehrl::su11::{random_state, QuantumNumber};
use std::time::Instant;

fn main() {
    let spec = QuadratureSpec::new(96, 128, 1e-8, 5).unwrap();
    let mut worst = 0.0f64;
    let t0 = Instant::now();
    for twice_k in [3u32, 4] {
        for q in [2.0, 2.5, 3.0] {
            for seed in 1..=5u64 {
                let k = QuantumNumber::new(twice_k).unwrap();
                let psi = random_state(10, k, seed).unwrap();
                match fisher_integral(&psi, q, &spec, None) {
                    Ok(rep) => {
                        let rr = rep.relative_residual();
                        if rr > worst { worst = rr; }
                        if rr > 1e-7 {
                            println!("LARGE residual 2k={} q={} seed={}: {:.3e}", twice_k, q, seed, rr);
                        }
                    }
                    Err(e) => println!("ERR 2k={} q={} seed={}: {}", twice_k, q, seed, e),
                }
            }
        }
    }
    println!("worst relative residual: {:.3e}, elapsed {:?}", worst, t0.elapsed());
}
