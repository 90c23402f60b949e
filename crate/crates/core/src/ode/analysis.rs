//! Comparison-function diagnostics for the uniqueness analysis: the
//! auxiliary ratio `theta = -sinh(tau) u'/u`, the source term `Phi` of the
//! comparison equation, its unique sign change `sigma(beta)`, the first
//! zero `rho(beta)` of `v_beta = sinh(tau) u' + beta u`, the matching
//! parameter `beta0` with `rho = sigma`, and the admissibility signature
//! of the variation `w`.
//!
//! All zero counts are taken on the trajectory's uniform sample grid
//! within its analysis range; deviations from the predicted counts are
//! property violations, reported loudly rather than patched over.

use serde::Serialize;

use crate::error::{Error, Result};

use super::{Classification, Trajectory};

/// `theta(tau) = -sinh(tau) u'(tau) / u(tau)` on the sample grid; NaN
/// where the trajectory has left its reliable range or `u` is too small
/// to divide by.
pub fn theta_profile(traj: &Trajectory) -> Vec<f64> {
    let end = traj.analysis_end();
    let guard = 1e-12 * traj.alpha;
    traj.taus
        .iter()
        .zip(traj.u.iter().zip(&traj.u_prime))
        .map(|(&tau, (&u, &v))| {
            if tau <= end && u > guard {
                -tau.sinh() * v / u
            } else {
                f64::NAN
            }
        })
        .collect()
}

/// Source term of the comparison equation
/// `v'' + coth(tau) v' + f'(u) v = Phi(tau; beta)`:
/// `Phi = beta (u f'(u) - f(u)) - 2 cosh(tau) f(u)
///      = (2/kq) beta a u^{1+2/kq} - 2 cosh(tau) f(u)`.
pub fn capital_phi(traj: &Trajectory, beta: f64) -> Vec<f64> {
    let end = traj.analysis_end();
    let p = &traj.params;
    let pref = 2.0 / p.kq * beta * p.a_tilde;
    traj.taus
        .iter()
        .zip(&traj.u)
        .map(|(&tau, &u)| {
            if tau <= end && u >= 0.0 {
                pref * u.powf(p.exponent) - 2.0 * tau.cosh() * p.f(u)
            } else {
                f64::NAN
            }
        })
        .collect()
}

fn phi_at(traj: &Trajectory, beta: f64, tau: f64) -> f64 {
    let p = &traj.params;
    let u = traj.eval(tau)[0];
    2.0 / p.kq * beta * p.a_tilde * u.max(0.0).powf(p.exponent) - 2.0 * tau.cosh() * p.f(u)
}

/// Count sign changes of a sampled function, ignoring NaN tails.
fn sign_changes(taus: &[f64], vals: &[f64], end: f64) -> Vec<(f64, f64)> {
    let mut brackets = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for (&tau, &v) in taus.iter().zip(vals) {
        if tau > end || !v.is_finite() {
            break;
        }
        if let Some((pt, pv)) = prev {
            if pv != 0.0 && v != 0.0 && (pv < 0.0) != (v < 0.0) {
                brackets.push((pt, tau));
            }
        }
        prev = Some((tau, v));
    }
    brackets
}

fn bisect_on<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if (flo <= 0.0) == (fmid <= 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn require_n_or_near_g(traj: &Trajectory, what: &str) -> Result<()> {
    if traj.classification.is_positive() {
        return Err(Error::Parameter(format!(
            "{what} needs a trajectory in N or near the ground state, got {:?}",
            traj.classification
        )));
    }
    Ok(())
}

/// The unique sign change of `Phi(.; beta)` for `0 < beta < beta_bar`,
/// located by bracketing on the sample grid and bisection on the dense
/// output. A sign-change count other than one is a property violation.
pub fn sigma_of_beta(traj: &Trajectory, beta: f64) -> Result<f64> {
    require_n_or_near_g(traj, "sigma(beta)")?;
    let beta_bar = traj.params.beta_bar(traj.alpha);
    if !(beta > 0.0 && beta < beta_bar) {
        return Err(Error::Domain(format!(
            "beta = {beta} must lie in (0, beta_bar = {beta_bar})"
        )));
    }
    let phi = capital_phi(traj, beta);
    let brackets = sign_changes(&traj.taus, &phi, traj.analysis_end());
    if brackets.len() != 1 {
        return Err(Error::PropertyViolation(format!(
            "Phi(.; beta = {beta}) has {} sign changes on (0, {:.3}], expected exactly 1",
            brackets.len(),
            traj.analysis_end()
        )));
    }
    let (lo, hi) = brackets[0];
    Ok(bisect_on(|tau| phi_at(traj, beta, tau), lo, hi))
}

/// The comparison function `v_beta = sinh(tau) u' + beta u` on the grid
/// and its first zero `rho(beta)` (the first crossing of `theta` through
/// level `beta`). More than one zero in the analysis range is a property
/// violation. `beta = 0` gives `rho = 0` by convention.
pub fn v_beta_and_rho(traj: &Trajectory, beta: f64) -> Result<(Vec<f64>, f64)> {
    require_n_or_near_g(traj, "rho(beta)")?;
    if !(beta >= 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be >= 0")));
    }
    let end = traj.analysis_end();
    let vals: Vec<f64> = traj
        .taus
        .iter()
        .zip(traj.u.iter().zip(&traj.u_prime))
        .map(|(&tau, (&u, &up))| {
            if tau <= end {
                tau.sinh() * up + beta * u
            } else {
                f64::NAN
            }
        })
        .collect();
    if beta == 0.0 {
        return Ok((vals, 0.0));
    }
    let brackets = sign_changes(&traj.taus, &vals, end);
    if brackets.len() > 1 {
        return Err(Error::PropertyViolation(format!(
            "v_beta (beta = {beta}) has {} zeros on (0, {end:.3}], expected at most 1",
            brackets.len()
        )));
    }
    let Some(&(lo, hi)) = brackets.first() else {
        return Err(Error::Search(format!(
            "v_beta (beta = {beta}) does not cross zero before tau = {end:.3}"
        )));
    };
    let rho = bisect_on(
        |tau| {
            let y = traj.eval(tau);
            tau.sinh() * y[1] + beta * y[0]
        },
        lo,
        hi,
    );
    Ok((vals, rho))
}

/// Find `beta0 in (0, beta_bar)` with `rho(beta0) = sigma(beta0)` by
/// bisection on the sign of `rho - sigma` (`rho` increases from 0,
/// `sigma` decreases from `tau1`), stopping once `|rho - sigma| < tol`.
pub fn find_beta0(traj: &Trajectory, tol: f64) -> Result<f64> {
    require_n_or_near_g(traj, "beta0")?;
    let beta_bar = traj.params.beta_bar(traj.alpha);
    if !(beta_bar > 0.0) {
        return Err(Error::Domain(format!(
            "beta_bar = {beta_bar} must be positive (alpha above xi1)"
        )));
    }
    let gap = |beta: f64| -> Result<f64> {
        let sigma = sigma_of_beta(traj, beta)?;
        let (_, rho) = v_beta_and_rho(traj, beta)?;
        Ok(rho - sigma)
    };
    let mut lo = 1e-4 * beta_bar;
    let mut hi = (1.0 - 1e-4) * beta_bar;
    let glo = gap(lo)?;
    let ghi = gap(hi)?;
    if !(glo < 0.0 && ghi > 0.0) {
        return Err(Error::PropertyViolation(format!(
            "rho - sigma does not change sign on (0, beta_bar): endpoints {glo:.3e}, {ghi:.3e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = gap(mid)?;
        if g.abs() < tol {
            return Ok(mid);
        }
        if g < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Search(format!(
        "beta0 bisection did not reach |rho - sigma| < {tol:e}"
    )))
}

/// Admissibility signature of a trajectory's variation `w`:
/// sign-change count, the Lemma-style placement of the first zero before
/// `tau1`, the endpoint sign for N, and the growth ratio for near-ground
/// trajectories. `violations` lists every failed assertion; the full
/// trajectory rides along for dumping.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    pub alpha: f64,
    pub classification: Classification,
    pub w_sign_changes: usize,
    pub first_w_zero: Option<f64>,
    pub tau1: Option<f64>,
    /// N only: `w(b(alpha))`, required negative.
    pub w_at_b: Option<f64>,
    /// Near-G only: `|w(tau_end)| / |w at its first extremum|`, required
    /// above 1e3.
    pub growth_ratio: Option<f64>,
    pub u_prime_negative: bool,
    pub violations: Vec<String>,
    pub trajectory: Trajectory,
}

impl AdmissibilityReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Shoot at `alpha` and check the admissibility signature. `alpha` must
/// classify as N or run out the horizon next to the ground state
/// (Undetermined); P inputs are rejected.
///
/// Integrates at tolerance 1e-12: near the ground state the faithful
/// tracking horizon grows like `|ln tol| / lambda_+`, and the growth-ratio
/// check needs the trajectory to stay on the ground-state ridge out to
/// `tau_max`.
pub fn admissibility_report(
    alpha: f64,
    params: &super::OdeParams,
    tau_max: f64,
) -> Result<AdmissibilityReport> {
    let traj = super::shoot(alpha, params, tau_max, 1e-12)?;
    require_n_or_near_g(&traj, "admissibility")?;
    let end = traj.analysis_end();
    let mut violations = Vec::new();

    // Sign changes of w on (0, end].
    let brackets = sign_changes(&traj.taus, &traj.w, end);
    let w_sign_changes = brackets.len();
    let first_w_zero = brackets
        .first()
        .map(|&(lo, hi)| traj_dense_zero(&traj, 2, lo, hi));
    if w_sign_changes != 1 {
        violations.push(format!(
            "w has {w_sign_changes} sign changes on (0, {end:.3}], expected exactly 1"
        ));
    }

    // First zero of w must come before tau1 (u = xi1).
    let tau1 = traj.tau1();
    match (first_w_zero, tau1) {
        (Some(wz), Some(t1)) => {
            if wz >= t1 {
                violations.push(format!(
                    "first zero of w at {wz:.6} is not before tau1 = {t1:.6}"
                ));
            }
        }
        (None, _) => violations.push("w never changes sign".into()),
        (_, None) => violations.push("trajectory never reaches xi1".into()),
    }

    let u_prime_negative = traj.u_prime_negative();
    if !u_prime_negative {
        violations.push("u' is not strictly negative on (0, analysis end)".into());
    }

    let mut w_at_b = None;
    let mut growth_ratio = None;
    match traj.classification {
        Classification::Negative { b_alpha } => {
            let wb = traj.eval(b_alpha)[2];
            w_at_b = Some(wb);
            if wb >= 0.0 {
                violations.push(format!("w(b(alpha)) = {wb:.3e} is not negative"));
            }
        }
        Classification::Undetermined { .. } => {
            // First extremum of w: first sign change of w'; the start
            // (w' = 0 there) if none.
            let wp_brackets = sign_changes(&traj.taus, &traj.w_prime, end);
            let first_ext = wp_brackets
                .first()
                .map(|&(lo, hi)| traj_dense_zero(&traj, 3, lo, hi))
                .unwrap_or(traj.tau0);
            let w_ext = traj.eval(first_ext)[2].abs().max(1e-300);
            let w_end = traj.eval(traj.tau_end)[2].abs();
            let ratio = w_end / w_ext;
            growth_ratio = Some(ratio);
            if ratio <= 1e3 {
                violations.push(format!(
                    "near-G variation growth ratio {ratio:.3e} not above 1e3"
                ));
            }
        }
        Classification::Positive { .. } => unreachable!("rejected above"),
    }

    Ok(AdmissibilityReport {
        alpha,
        classification: traj.classification,
        w_sign_changes,
        first_w_zero,
        tau1,
        w_at_b,
        growth_ratio,
        u_prime_negative,
        violations,
        trajectory: traj,
    })
}

fn traj_dense_zero(traj: &Trajectory, component: usize, lo: f64, hi: f64) -> f64 {
    bisect_on(|tau| traj.eval(tau)[component], lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode::{bisect_ground_state, critical_points, shoot, OdeParams};

    fn ground_state_traj() -> Trajectory {
        let params = OdeParams::extremizer_consistent(3.0, 3.0).unwrap();
        shoot(1.0, &params, 40.0, 1e-12).unwrap()
    }

    #[test]
    fn theta_matches_exact_ground_state() {
        // theta = (3/2) sinh(tau) tanh(tau/2) for u = sech^3(tau/2),
        // compared inside the analysis range (u above the detection
        // floor, tau <~ 4.4).
        let traj = ground_state_traj();
        let theta = theta_profile(&traj);
        for (i, &tau) in traj.taus.iter().enumerate() {
            if !(0.05..=4.0).contains(&tau) {
                continue;
            }
            let exact = 1.5 * tau.sinh() * (tau / 2.0).tanh();
            assert!(
                (theta[i] - exact).abs() < 1e-6,
                "tau {tau}: {} vs {exact}",
                theta[i]
            );
        }
        // theta(1) = 1.5 sinh(1) tanh(0.5).
        let i = traj
            .taus
            .iter()
            .position(|&t| (t - 1.0).abs() < 6e-3)
            .unwrap();
        assert!((theta[i] - 0.8147).abs() < 1e-3);
        // Nonnegative and non-decreasing along the reliable range.
        let end = traj.analysis_end();
        let mut prev = 0.0;
        for (i, &tau) in traj.taus.iter().enumerate() {
            if tau > end {
                break;
            }
            assert!(theta[i] >= -1e-12, "theta negative at {tau}");
            assert!(theta[i] >= prev - 1e-9, "theta decreased at {tau}");
            prev = theta[i];
        }
    }

    #[test]
    fn phi_sign_structure() {
        let traj = ground_state_traj();
        // beta = 0: the only zero of Phi sits at tau1.
        let phi0 = capital_phi(&traj, 0.0);
        let brackets = sign_changes(&traj.taus, &phi0, traj.analysis_end());
        assert_eq!(brackets.len(), 1);
        let t1 = traj.tau1().unwrap();
        assert!(
            brackets[0].0 <= t1 && t1 <= brackets[0].1 + 0.02,
            "zero near {:?} vs tau1 = {t1}",
            brackets[0]
        );
        // Exact tau1 for sech^3: u = xi1 = (1/3)^{3/2} at
        // cosh(tau/2) = 3^{1/2}.
        let exact_t1 = 2.0 * 3.0f64.sqrt().acosh();
        assert!((t1 - exact_t1).abs() < 1e-6, "{t1} vs {exact_t1}");
        // Phi(0) < 0 for beta below beta_bar.
        let beta_bar = traj.params.beta_bar(traj.alpha);
        assert!((beta_bar - 2.0).abs() < 1e-12);
        let phi = capital_phi(&traj, 0.5 * beta_bar);
        assert!(phi[0] < 0.0);
    }

    #[test]
    fn sigma_moves_left_with_beta() {
        let traj = ground_state_traj();
        let beta_bar = traj.params.beta_bar(traj.alpha);
        let t1 = traj.tau1().unwrap();
        let mut prev = t1;
        for i in 1..=20 {
            let beta = beta_bar * i as f64 / 21.0;
            let sigma = sigma_of_beta(&traj, beta).unwrap();
            assert!(sigma < prev, "beta {beta}: sigma {sigma} !< {prev}");
            assert!(sigma > 0.0 && sigma < t1);
            prev = sigma;
        }
        // beta -> 0+: sigma -> tau1.
        let sigma = sigma_of_beta(&traj, 1e-6 * beta_bar).unwrap();
        assert!((sigma - t1).abs() < 1e-3, "{sigma} vs {t1}");
        // Out-of-range beta rejected.
        assert!(sigma_of_beta(&traj, 0.0).is_err());
        assert!(sigma_of_beta(&traj, beta_bar).is_err());
    }

    #[test]
    fn rho_from_exact_theta() {
        let traj = ground_state_traj();
        // rho(beta) solves (3/2) sinh(tau) tanh(tau/2) = beta.
        for beta in [0.3, 0.8, 1.5] {
            let (_, rho) = v_beta_and_rho(&traj, beta).unwrap();
            let theta_rho = 1.5 * rho.sinh() * (rho / 2.0).tanh();
            assert!((theta_rho - beta).abs() < 1e-6, "beta {beta}: {theta_rho}");
        }
        // beta = 0 -> rho = 0; rho increases with beta.
        let (_, rho0) = v_beta_and_rho(&traj, 0.0).unwrap();
        assert_eq!(rho0, 0.0);
        let mut prev = 0.0;
        for i in 1..=10 {
            let beta = 0.19 * i as f64;
            let (_, rho) = v_beta_and_rho(&traj, beta).unwrap();
            assert!(rho > prev, "beta {beta}");
            prev = rho;
        }
    }

    #[test]
    fn beta0_exists_on_literal_preset() {
        // On the literal constant the matching parameter exists: rho runs
        // up from 0 while sigma falls to 0 as beta -> beta_bar.
        let params = OdeParams::paper_literal(3.0, 1.0).unwrap();
        let alpha_star = bisect_ground_state(&params, 1e-8).unwrap();
        let traj = shoot(1.02 * alpha_star, &params, 40.0, 1e-10).unwrap();
        assert!(traj.classification.is_negative());
        let beta0 = find_beta0(&traj, 1e-6).unwrap();
        let beta_bar = traj.params.beta_bar(traj.alpha);
        assert!(beta0 > 0.0 && beta0 < beta_bar);
        let sigma = sigma_of_beta(&traj, beta0).unwrap();
        let (_, rho) = v_beta_and_rho(&traj, beta0).unwrap();
        assert!((rho - sigma).abs() < 1e-6, "rho {rho} vs sigma {sigma}");
        // Determinism.
        let again = find_beta0(&traj, 1e-6).unwrap();
        assert_eq!(beta0, again);
    }

    #[test]
    fn beta0_absent_on_quarter_constant() {
        // On the quarter constant sigma(beta_bar-) stays away from the
        // origin (the closed form on the exact ground state at kq = 3 is
        // cosh^2(sigma/2) = (7 + sqrt(25 - 8 beta))/4, ending at ~2.06
        // while rho(beta_bar) ~ 1.49), so rho - sigma never changes sign
        // and the search reports the violation instead of inventing a
        // crossing.
        let traj = ground_state_traj();
        // Closed-form check of sigma itself.
        for beta in [0.25, 1.0, 1.75] {
            let sigma = sigma_of_beta(&traj, beta).unwrap();
            let exact = 2.0 * (((7.0 + (25.0 - 8.0 * beta).sqrt()) / 4.0).sqrt()).acosh();
            assert!((sigma - exact).abs() < 1e-6, "beta {beta}: {sigma} vs {exact}");
        }
        match find_beta0(&traj, 1e-6) {
            Err(crate::error::Error::PropertyViolation(msg)) => {
                assert!(msg.contains("does not change sign"), "{msg}");
            }
            other => panic!("expected a no-crossing report, got {other:?}"),
        }
    }

    #[test]
    fn admissibility_near_ground_state_and_in_n() {
        let params = OdeParams::extremizer_consistent(3.0, 3.0).unwrap();
        // The exact ground state amplitude: near-G (Undetermined)
        // signature with the unbounded-growth ratio.
        let rep = admissibility_report(1.0, &params, 40.0).unwrap();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        assert_eq!(rep.w_sign_changes, 1);
        assert!(rep.classification.is_undetermined());
        assert!(rep.growth_ratio.unwrap() > 1e3);
        // 5% above: N signature with w(b) < 0 and the zero before tau1.
        let rep = admissibility_report(1.05, &params, 40.0).unwrap();
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        assert!(rep.classification.is_negative());
        assert!(rep.w_at_b.unwrap() < 0.0);
        assert!(rep.first_w_zero.unwrap() < rep.tau1.unwrap());
        // P inputs are rejected.
        let cp = critical_points(&params);
        assert!(admissibility_report(cp.xi0, &params, 40.0).is_err());
    }

    #[test]
    fn admissibility_near_ground_state_literal_preset() {
        // No closed-form alpha*: bisect at tight tolerances so the
        // midpoint trajectory genuinely runs out the horizon.
        let params = OdeParams::paper_literal(3.0, 1.0).unwrap();
        let alpha_star =
            crate::ode::bisect_ground_state_with_tol(&params, 1e-11, 1e-12).unwrap();
        let horizon = crate::ode::near_ground_horizon(&params);
        let rep = admissibility_report(alpha_star, &params, horizon).unwrap();
        assert!(
            rep.classification.is_undetermined(),
            "{:?}",
            rep.classification
        );
        assert!(rep.ok(), "violations: {:?}", rep.violations);
        assert!(rep.growth_ratio.unwrap() > 1e3);
    }

    #[test]
    fn b_alpha_shrinks_while_w_at_b_negative() {
        let params = OdeParams::extremizer_consistent(3.0, 3.0).unwrap();
        let b_at = |alpha: f64| match shoot(alpha, &params, 40.0, 1e-10)
            .unwrap()
            .classification
        {
            Classification::Negative { b_alpha } => b_alpha,
            other => panic!("alpha {alpha}: {other:?}"),
        };
        assert!(b_at(1.5) < b_at(1.05));
    }
}
