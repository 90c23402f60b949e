//! Norms, entropies, and Fisher information of coherent-state transforms.
//!
//! Everything here integrates functions of `L psi` against `d nu`. The
//! gradient integral uses the analytic integrand that the Cauchy–Riemann
//! structure of the holomorphic factor provides: with
//! `u = (1-r^2)^{kq/2} |Phi|^{q/2}` and away from zeros of `Phi`,
//!
//! ```text
//! |grad u|^2_eucl = u^2 [ k^2 q^2 r^2/(1-r^2)^2
//!                        - (k q^2/(1-r^2)) Re(z Phi'/Phi)
//!                        + (q^2/4) |Phi'/Phi|^2 ],
//! ```
//!
//! and the hyperbolic gradient squared is `((1-r^2)^2/4)` times that. At
//! zeros of `Phi` the integrand extends continuously: the factored form
//! carries `|Phi|^{q-2}`, which vanishes for q > 2 and equals 1 for q = 2.
//!
//! Rényi entropies follow the standard convention
//! `S_r = (1/(1-r)) ln int rho^r d nu`, which tends to the Wehrl entropy
//! as r -> 1 (an alternative printed convention with the opposite sign
//! prefactor does not have that limit; the standard one is used
//! throughout).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyp_geom::{disk_integral_nu, DiskPoint, QuadratureSpec};
use crate::su11::{transform_eval, StateVector, TransformEvaluator};

/// How a state was produced; echoed into serialized reports so a run can
/// be reproduced from its artifacts alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateDescriptor {
    Coherent { re: f64, im: f64 },
    Basis { m: usize },
    Random { seed: u64, m_max: usize },
    Custom,
}

/// Wehrl and Rényi entropies of one transform.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EntropyReport {
    pub twice_k: u32,
    /// Wehrl entropy in nats.
    pub wehrl: f64,
    /// `(r, S_r)` pairs, ascending in r.
    pub renyi: Vec<(f64, f64)>,
    /// `int |L psi|^2 d nu`; equals 1 (to quadrature accuracy) for
    /// normalized inputs.
    pub l2_norm_sq: f64,
    pub spec: QuadratureSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDescriptor>,
}

/// Both sides of the Fisher identity
/// `int |grad |L psi|^{q/2}|^2 d nu = (kq/4) int |L psi|^q d nu`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FisherReport {
    pub twice_k: u32,
    pub q: f64,
    /// `int |grad |L psi|^{q/2}|^2 d nu` via the analytic integrand.
    pub gradient_integral: f64,
    /// `int |L psi|^q d nu`.
    pub q_norm_integral: f64,
    /// `gradient_integral - (kq/4) q_norm_integral`.
    pub residual: f64,
    pub spec: QuadratureSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<StateDescriptor>,
}

impl FisherReport {
    /// Residual relative to the gradient integral.
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.gradient_integral.abs().max(1e-300)
    }
}

fn require_normalized(psi: &StateVector) -> Result<()> {
    if !psi.is_normalized(1e-8) {
        return Err(Error::Parameter(format!(
            "state must be normalized (|psi|^2 = {})",
            psi.norm_sq()
        )));
    }
    Ok(())
}

/// `int |L psi(zeta)|^p d nu(zeta)`.
///
/// Requires `kp >= 2`. For `kp > 2` the integrand vanishes at the
/// boundary; at `kp = 2` it stays bounded because the holomorphic factor
/// of a finite state is a polynomial, so the isometry case `p = 2, k = 1`
/// is admitted.
pub fn lp_norm_q(psi: &StateVector, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    let k = psi.k.k();
    if k * p < 2.0 {
        return Err(Error::Domain(format!(
            "lp norm requires k*p >= 2, got k = {k}, p = {p}"
        )));
    }
    let kp = k * p;
    let half_p = p / 2.0;
    let ev = TransformEvaluator::new(psi);
    disk_integral_nu(
        |pt| {
            let tv = ev.eval(pt);
            let om = 1.0 - pt.abs_sq();
            let m2 = tv.holo.norm_sqr();
            let m2p = if half_p == 1.0 { m2 } else { m2.powf(half_p) };
            om.powf(kp) * m2p
        },
        psi.k,
        spec,
    )
}

/// Harmonic number `H_n = sum_{j=1..n} 1/j`, `H_0 = 0`.
fn harmonic(n: u64) -> f64 {
    (1..=n).map(|j| 1.0 / j as f64).sum()
}

/// Wehrl entropy `-int rho ln rho d nu` with `rho = |L psi|^2`, the
/// integrand extended by 0 where `rho = 0`.
///
/// The factor `ln rho = 2k ln(1-t) + ln |Phi|^2` splits the integral. The
/// `ln(1-t)` piece would give Gauss–Legendre a bare logarithmic endpoint
/// singularity, but against the angular average of `|Phi|^2` (a polynomial
/// in `t` by orthogonality) it reduces exactly, term by term, through
/// `int_0^1 t^m (1-t)^{2k-2} ln(1-t) dt = B(m+1, 2k-1) (H_{2k-2} - H_{m+2k-1})`
/// and the same Beta-integral cancellation as the isometry, to
/// `sum_m |a_m|^2 (H_{2k-2} - H_{m+2k-1})`. Only the smooth
/// `rho ln |Phi|^2` remainder is integrated numerically.
pub fn wehrl_entropy(psi: &StateVector, spec: &QuadratureSpec) -> Result<f64> {
    require_normalized(psi)?;
    let tk = u64::from(psi.k.twice_k());
    let h_base = harmonic(tk - 2);
    let log_part: f64 = psi
        .coeffs
        .iter()
        .enumerate()
        .map(|(m, a)| a.norm_sqr() * (harmonic(m as u64 + tk - 1) - h_base))
        .sum();
    let twice_k_i = psi.k.twice_k() as i32;
    let ev = TransformEvaluator::new(psi);
    let phi_part = disk_integral_nu(
        |pt| {
            let tv = ev.eval(pt);
            let om = 1.0 - pt.abs_sq();
            let m2 = tv.holo.norm_sqr();
            if m2 > 0.0 {
                om.powi(twice_k_i) * m2 * m2.ln()
            } else {
                0.0
            }
        },
        psi.k,
        spec,
    )?;
    Ok(psi.k.two_k() * log_part - phi_part)
}

/// Rényi entropy of order `r > 1`:
/// `(1/(1-r)) ln int |L psi|^{2r} d nu`.
pub fn renyi_entropy(psi: &StateVector, r: f64, spec: &QuadratureSpec) -> Result<f64> {
    require_normalized(psi)?;
    let two_k = psi.k.two_k();
    if r <= 1.0 {
        return Err(Error::Domain(format!("Renyi order must satisfy r > 1, got {r}")));
    }
    if two_k * r <= 2.0 {
        return Err(Error::Domain(format!(
            "Renyi order requires 2kr > 2, got 2k = {two_k}, r = {r}"
        )));
    }
    let norm = lp_norm_q(psi, 2.0 * r, spec)?;
    Ok(norm.ln() / (1.0 - r))
}

/// Full entropy report for one state.
pub fn entropy_report(
    psi: &StateVector,
    renyi_orders: &[f64],
    spec: &QuadratureSpec,
    state: Option<StateDescriptor>,
) -> Result<EntropyReport> {
    let wehrl = wehrl_entropy(psi, spec)?;
    let l2 = lp_norm_q(psi, 2.0, spec)?;
    let mut renyi = Vec::with_capacity(renyi_orders.len());
    for &r in renyi_orders {
        renyi.push((r, renyi_entropy(psi, r, spec)?));
    }
    Ok(EntropyReport {
        twice_k: psi.k.twice_k(),
        wehrl,
        renyi,
        l2_norm_sq: l2,
        spec: *spec,
        state,
    })
}

fn grad_u_sq_eucl_ev(ev: &TransformEvaluator, q: f64, p: DiskPoint) -> f64 {
    let k = ev.k().k();
    let tv = ev.eval(p);
    let t = p.abs_sq();
    let om = 1.0 - t;
    let m2 = tv.holo.norm_sqr();
    // |Phi|^{q-2} with the 0^0 = 1 convention covers both branches of the
    // continuous extension.
    let m2_pow = m2.powf((q - 2.0) / 2.0);
    let cross = (p.to_complex() * tv.holo_deriv * tv.holo.conj()).re;
    let d2 = tv.holo_deriv.norm_sqr();
    om.powf(k * q)
        * (k * k * q * q * t * (m2_pow * m2) / (om * om)
            - k * q * q / om * m2_pow * cross
            + 0.25 * q * q * m2_pow * d2)
}

/// Euclidean `|grad u|^2` of `u = (1-r^2)^{kq/2} |Phi|^{q/2}` at a disk
/// point, via the analytic log-derivative form. Continuous extension at
/// zeros of `Phi` (returns 0 for q > 2, the `|Phi'|^2` form for q = 2).
pub fn grad_u_sq_eucl(psi: &StateVector, q: f64, p: DiskPoint) -> f64 {
    grad_u_sq_eucl_ev(&TransformEvaluator::new(psi), q, p)
}

/// `int |grad |L psi|^{q/2}|^2 d nu` (hyperbolic gradient) by the
/// analytic integrand. Requires `kq > 2`.
pub fn transform_gradient_norm_sq(
    psi: &StateVector,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let k = psi.k.k();
    if k * q <= 2.0 {
        return Err(Error::Domain(format!(
            "gradient norm requires kq > 2, got k = {k}, q = {q}"
        )));
    }
    let ev = TransformEvaluator::new(psi);
    // Hyperbolic gradient squared = ((1-r^2)^2/4) * euclidean.
    disk_integral_nu(
        |p| {
            let om = 1.0 - p.abs_sq();
            0.25 * om * om * grad_u_sq_eucl_ev(&ev, q, p)
        },
        psi.k,
        spec,
    )
}

/// Fisher identity report: the gradient side is integrated with the
/// analytic integrand, the norm side with `lp_norm_q`, and the residual
/// `gradient - (kq/4) * norm` quantifies how exactly the identity holds.
pub fn fisher_integral(
    psi: &StateVector,
    q: f64,
    spec: &QuadratureSpec,
    state: Option<StateDescriptor>,
) -> Result<FisherReport> {
    require_normalized(psi)?;
    let k = psi.k.k();
    let gradient_integral = transform_gradient_norm_sq(psi, q, spec)?;
    let q_norm_integral = lp_norm_q(psi, q, spec)?;
    let residual = gradient_integral - 0.25 * k * q * q_norm_integral;
    Ok(FisherReport {
        twice_k: psi.k.twice_k(),
        q,
        gradient_integral,
        q_norm_integral,
        residual,
        spec: *spec,
        state,
    })
}

/// Relative difference between the analytic `|grad u|^2_eucl` and central
/// finite differences of `u` at step 1e-6. Away from zeros of `Phi` the
/// contract is a relative difference below 1e-6; at (near-)zeros the
/// comparison is undefined and a skip signal is returned.
pub fn gradient_fd_check(psi: &StateVector, q: f64, p: DiskPoint) -> Result<f64> {
    let k = psi.k.k();
    if k * q <= 2.0 {
        return Err(Error::Domain(format!(
            "gradient check requires kq > 2, got k = {k}, q = {q}"
        )));
    }
    let tv = transform_eval(psi, p);
    if tv.holo.norm() < 1e-10 * (1.0 + tv.holo_deriv.norm()) {
        return Err(Error::HoloZero);
    }
    let u = |pt: DiskPoint| {
        let t = transform_eval(psi, pt);
        let om = 1.0 - pt.abs_sq();
        om.powf(k * q / 2.0) * t.holo.norm().powf(q / 2.0)
    };
    let h = 1e-6;
    let ux = (u(DiskPoint::new(p.re + h, p.im)?) - u(DiskPoint::new(p.re - h, p.im)?)) / (2.0 * h);
    let uy = (u(DiskPoint::new(p.re, p.im + h)?) - u(DiskPoint::new(p.re, p.im - h)?)) / (2.0 * h);
    let fd = ux * ux + uy * uy;
    let analytic = grad_u_sq_eucl(psi, q, p);
    Ok((analytic - fd).abs() / analytic.abs().max(1e-300))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_geom::DiskPoint;
    use crate::su11::{coherent_coeffs, random_state, QuantumNumber, StateVector};

    fn qn(twice_k: u32) -> QuantumNumber {
        QuantumNumber::new(twice_k).unwrap()
    }

    #[test]
    fn coherent_lp_norms_match_beta_integrals() {
        let spec = QuadratureSpec::default();
        // Coherent state at the origin: int |L|^p d nu = (2k-1)/(kp-1).
        for (twice_k, p) in [(2u32, 3.0), (2, 4.0), (3, 2.5), (4, 2.0), (5, 3.0)] {
            let k = qn(twice_k);
            let psi = StateVector::basis(k, 0);
            let got = lp_norm_q(&psi, p, &spec).unwrap();
            let want = (k.two_k() - 1.0) / (k.k() * p - 1.0);
            assert!(
                (got - want).abs() < 1e-10 * want,
                "2k={twice_k}, p={p}: {got} vs {want}"
            );
        }
        // k = 1, p = 3 -> 1/2 exactly.
        let v = lp_norm_q(&StateVector::basis(qn(2), 0), 3.0, &spec).unwrap();
        assert!((v - 0.5).abs() < 1e-10);
    }

    #[test]
    fn lp_norm_isometry_at_p_two() {
        let spec = QuadratureSpec::default();
        for seed in [1u64, 5, 9] {
            let psi = random_state(10, qn(2), seed).unwrap();
            let v = lp_norm_q(&psi, 2.0, &spec).unwrap();
            assert!((v - 1.0).abs() < 1e-8, "seed {seed}: {v}");
        }
        assert!(lp_norm_q(&StateVector::basis(qn(2), 0), 1.5, &spec).is_err());
    }

    #[test]
    fn coherent_wehrl_entropy() {
        let spec = QuadratureSpec::default();
        for twice_k in [2u32, 3, 4, 10] {
            let k = qn(twice_k);
            let psi = StateVector::basis(k, 0);
            let got = wehrl_entropy(&psi, &spec).unwrap();
            let want = k.two_k() / (k.two_k() - 1.0);
            assert!(
                (got - want).abs() < 1e-8,
                "2k = {twice_k}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn e1_wehrl_entropy_closed_form() {
        // rho = 2t(1-t)^2 at k = 1: S = 7/2 - ln 2 by hand integration.
        let spec = QuadratureSpec::default();
        let psi = StateVector::basis(qn(2), 1);
        let got = wehrl_entropy(&psi, &spec).unwrap();
        let want = 3.5 - std::f64::consts::LN_2;
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        // Above the entropy lower bound 2k ln(1 + 1/(2k-1)) = 2 ln 2.
        assert!(got >= 2.0 * std::f64::consts::LN_2);
    }

    #[test]
    fn entropy_independent_of_center() {
        let spec = QuadratureSpec::default();
        for twice_k in [2u32, 3] {
            let k = qn(twice_k);
            let want = k.two_k() / (k.two_k() - 1.0);
            for (re, im) in [(0.5, 0.0), (0.3, 0.4)] {
                let z0 = DiskPoint::new(re, im).unwrap();
                let psi = coherent_coeffs(z0, k, 96).state;
                let got = wehrl_entropy(&psi, &spec).unwrap();
                assert!(
                    (got - want).abs() < 1e-8,
                    "2k = {twice_k}, center ({re},{im}): {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn coherent_renyi_entropy() {
        let spec = QuadratureSpec::default();
        // (1/(1-r)) ln((2k-1)/(2kr-1)); k = 1, r = 3/2 gives 2 ln 2.
        let psi = StateVector::basis(qn(2), 0);
        let got = renyi_entropy(&psi, 1.5, &spec).unwrap();
        assert!((got - 2.0 * std::f64::consts::LN_2).abs() < 1e-9, "{got}");
        for (twice_k, r) in [(3u32, 2.0), (4, 1.25), (2, 3.0)] {
            let k = qn(twice_k);
            let psi = StateVector::basis(k, 0);
            let got = renyi_entropy(&psi, r, &spec).unwrap();
            let want = ((k.two_k() - 1.0) / (k.two_k() * r - 1.0)).ln() / (1.0 - r);
            assert!((got - want).abs() < 1e-9, "2k={twice_k}, r={r}");
        }
        assert!(renyi_entropy(&psi, 1.0, &spec).is_err());
        assert!(renyi_entropy(&psi, 0.5, &spec).is_err());
    }

    #[test]
    fn renyi_limits_to_wehrl() {
        // Quadratic extrapolation of r in {1.1, 1.05, 1.025} to r = 1.
        let spec = QuadratureSpec::new(128, 128, 1e-5, 5).unwrap();
        let psi = random_state(8, qn(2), 4).unwrap();
        let rs = [1.1, 1.05, 1.025];
        let vals: Vec<f64> = rs
            .iter()
            .map(|&r| renyi_entropy(&psi, r, &spec).unwrap())
            .collect();
        // Lagrange extrapolation at r = 1.
        let mut extrap = 0.0;
        for i in 0..3 {
            let mut w = 1.0;
            for j in 0..3 {
                if i != j {
                    w *= (1.0 - rs[j]) / (rs[i] - rs[j]);
                }
            }
            extrap += w * vals[i];
        }
        let wehrl = wehrl_entropy(&psi, &QuadratureSpec::default()).unwrap();
        assert!(
            (extrap - wehrl).abs() < 1e-3,
            "extrapolated {extrap} vs Wehrl {wehrl}"
        );
    }

    #[test]
    fn log_norm_is_convex_in_p() {
        // ln int |L psi|^p d nu has nonnegative second differences in p.
        let spec = QuadratureSpec::corpus();
        for seed in [3u64, 8, 21] {
            let psi = random_state(8, qn(3), seed).unwrap();
            let ps: Vec<f64> = (0..=8).map(|i| 2.0 + 0.25 * i as f64).collect();
            let phis: Vec<f64> = ps
                .iter()
                .map(|&p| lp_norm_q(&psi, p, &spec).unwrap().ln())
                .collect();
            for w in phis.windows(3) {
                let dd = w[2] - 2.0 * w[1] + w[0];
                assert!(dd >= -1e-9, "seed {seed}: second difference {dd}");
            }
        }
    }

    #[test]
    fn fisher_identity_exact_cases() {
        let spec = QuadratureSpec::default();
        // Any normalized state, q = 2, k = 3/2: gradient integral = 3/4.
        let psi = random_state(8, qn(3), 13).unwrap();
        let rep = fisher_integral(&psi, 2.0, &spec, None).unwrap();
        assert!(
            (rep.gradient_integral - 0.75).abs() < 1e-8,
            "{}",
            rep.gradient_integral
        );
        // Coherent state, q = 3, k = 1: (3/4) * (1/2) = 3/8.
        let psi = StateVector::basis(qn(2), 0);
        let rep = fisher_integral(&psi, 3.0, &spec, None).unwrap();
        assert!(
            (rep.gradient_integral - 0.375).abs() < 1e-9,
            "{}",
            rep.gradient_integral
        );
        // e1 at k = 2, q = 2: relative residual below 1e-8.
        let psi = StateVector::basis(qn(4), 1);
        let rep = fisher_integral(&psi, 2.0, &spec, None).unwrap();
        assert!(rep.relative_residual() < 1e-8, "{}", rep.relative_residual());
        // kq <= 2 rejected.
        assert!(fisher_integral(&StateVector::basis(qn(2), 0), 2.0, &spec, None).is_err());
    }

    #[test]
    fn fisher_identity_random_sample() {
        // Smaller in-module sample; the acceptance suite runs the full
        // 50-state corpus.
        let spec = QuadratureSpec::corpus();
        for twice_k in [3u32, 4] {
            for q in [2.0, 2.5, 3.0] {
                for seed in [1u64, 2, 3, 4, 5] {
                    let psi = random_state(10, qn(twice_k), seed).unwrap();
                    let rep = fisher_integral(&psi, q, &spec, None).unwrap();
                    assert!(
                        rep.relative_residual() < 1e-7,
                        "2k={twice_k}, q={q}, seed={seed}: {}",
                        rep.relative_residual()
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_fd_agreement() {
        // Coherent state, q = 2 and a random state, q = 3.
        let psi = StateVector::basis(qn(4), 0);
        let p = DiskPoint::new(0.3, 0.0).unwrap();
        let rel = gradient_fd_check(&psi, 2.0, p).unwrap();
        assert!(rel < 1e-6, "coherent rel {rel}");

        let psi = random_state(10, qn(3), 7).unwrap();
        let p = DiskPoint::new(0.2, 0.1).unwrap();
        let rel = gradient_fd_check(&psi, 3.0, p).unwrap();
        assert!(rel < 1e-6, "random rel {rel}");
    }

    #[test]
    fn gradient_rotation_covariance_for_radial_states() {
        // Basis states have radial |Phi|; the gradient magnitude at a
        // rotated point is unchanged.
        let psi = StateVector::basis(qn(4), 2);
        let r = 0.37;
        let a = grad_u_sq_eucl(&psi, 2.0, DiskPoint::new(r, 0.0).unwrap());
        for phi in [0.7, 2.1, 4.4] {
            let p = DiskPoint::new(r * f64::cos(phi), r * f64::sin(phi)).unwrap();
            let b = grad_u_sq_eucl(&psi, 2.0, p);
            assert!((a - b).abs() < 1e-12 * a.abs(), "phi {phi}: {a} vs {b}");
        }
    }

    #[test]
    fn gradient_fd_skip_at_holo_zero() {
        // e1 has Phi proportional to z, vanishing at the origin.
        let psi = StateVector::basis(qn(4), 1);
        match gradient_fd_check(&psi, 2.0, DiskPoint::ORIGIN) {
            Err(Error::HoloZero) => {}
            other => panic!("expected skip signal, got {other:?}"),
        }
    }

    #[test]
    fn reports_serialize_with_inputs() {
        let spec = QuadratureSpec::corpus();
        let psi = random_state(6, qn(3), 42).unwrap();
        let rep = entropy_report(
            &psi,
            &[1.5, 2.0],
            &spec,
            Some(StateDescriptor::Random { seed: 42, m_max: 6 }),
        )
        .unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"seed\":42"));
        assert!(json.contains("\"twice_k\":3"));
        assert!((rep.l2_norm_sq - 1.0).abs() < 1e-8);
        let back: EntropyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.renyi.len(), 2);
    }
}
