//! Shooting-method study of the radial ground-state equation
//!
//! ```text
//! u'' + coth(tau) u' + f(u) = 0,   f(u) = a u^{1+2/(kq)} - b u,
//! u(0) = alpha > 0,  u'(0) = 0,
//! ```
//!
//! together with the variation `w = du/d alpha` (same equation with
//! `f'(u)` as the zeroth-order coefficient, `w(0) = 1, w'(0) = 0`), an
//! energy function that is non-increasing along trajectories, an N/P/G
//! style classifier, ground-state bisection, and the comparison-function
//! diagnostics in [`analysis`].
//!
//! Two presets tie `(a, b)` to `kq`:
//!
//! * `paper_literal`: `b = kq(kq-2)`, `a = gamma * kq(kq-2)`;
//! * `extremizer_consistent`: `b = kq(kq-2)/4`, `a = gamma * kq(kq-2)/4`.
//!
//! Under the radial hyperbolic Laplacian `d^2/dtau^2 + coth(tau) d/dtau`
//! only the quarter constant annihilates the profile
//! `alpha sech^{kq}(tau/2)` (with `gamma = (kq/(kq-2)) alpha^{-2/kq}`);
//! the literal constant leaves an O(1) residual. Both presets are kept so
//! the discrepancy stays measurable; quantitative exact-solution checks
//! use the quarter constant.

pub mod analysis;
pub mod dopri;

use serde::Serialize;

use crate::error::{Error, Result};
use dopri::{integrate, DenseSolution, Dopri5Options, StepOutcome};

pub use analysis::{
    admissibility_report, capital_phi, find_beta0, sigma_of_beta, theta_profile, v_beta_and_rho,
    AdmissibilityReport,
};

/// How `(a, b)` were derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    PaperLiteral,
    ExtremizerConsistent,
    Custom,
}

/// Nonlinearity parameters and shooting controls.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct OdeParams {
    pub a_tilde: f64,
    pub b_tilde: f64,
    /// `1 + 2/(kq)`.
    pub exponent: f64,
    pub kq: f64,
    pub preset: Preset,
}

impl OdeParams {
    fn build(a_tilde: f64, b_tilde: f64, kq: f64, preset: Preset) -> Result<Self> {
        if !(kq > 2.0) {
            return Err(Error::Parameter(format!("requires kq > 2, got {kq}")));
        }
        if !(a_tilde > 0.0) || !(b_tilde > 0.0) {
            return Err(Error::Parameter(format!(
                "requires a, b > 0, got a = {a_tilde}, b = {b_tilde}"
            )));
        }
        Ok(Self {
            a_tilde,
            b_tilde,
            exponent: 1.0 + 2.0 / kq,
            kq,
            preset,
        })
    }

    /// `b = kq(kq-2)`, `a = gamma b`.
    pub fn paper_literal(kq: f64, gamma: f64) -> Result<Self> {
        let b = kq * (kq - 2.0);
        Self::build(gamma * b, b, kq, Preset::PaperLiteral)
    }

    /// `b = kq(kq-2)/4`, `a = gamma b`: the constant under which
    /// `alpha sech^{kq}(tau/2)` solves the equation exactly when
    /// `gamma = (kq/(kq-2)) alpha^{-2/kq}`.
    pub fn extremizer_consistent(kq: f64, gamma: f64) -> Result<Self> {
        let b = kq * (kq - 2.0) / 4.0;
        Self::build(gamma * b, b, kq, Preset::ExtremizerConsistent)
    }

    pub fn custom(a_tilde: f64, b_tilde: f64, kq: f64) -> Result<Self> {
        Self::build(a_tilde, b_tilde, kq, Preset::Custom)
    }

    /// The `gamma` that puts the exact profile amplitude at `alpha`.
    pub fn gamma_for_target_alpha(kq: f64, alpha: f64) -> f64 {
        kq / (kq - 2.0) * alpha.powf(-2.0 / kq)
    }

    /// `f(u) = a u^{1+2/kq} - b u`, extended oddly to `u < 0` (only the
    /// sign-crossing detection ever sees negative values).
    pub fn f(&self, u: f64) -> f64 {
        self.a_tilde * u.signum() * u.abs().powf(self.exponent) - self.b_tilde * u
    }

    /// `f'(u) = a (1+2/kq) |u|^{2/kq} - b` (even extension).
    pub fn f_prime(&self, u: f64) -> f64 {
        self.a_tilde * self.exponent * u.abs().powf(self.exponent - 1.0) - self.b_tilde
    }

    /// `F(u) = int_0^u f = a |u|^{2+2/kq}/(2+2/kq) - b u^2/2`.
    pub fn potential(&self, u: f64) -> f64 {
        self.a_tilde * u.abs().powf(self.exponent + 1.0) / (self.exponent + 1.0)
            - 0.5 * self.b_tilde * u * u
    }

    /// `E = u'^2/2 + F(u)`; non-increasing along trajectories
    /// (`E' = -coth(tau) u'^2`).
    pub fn energy(&self, u: f64, v: f64) -> f64 {
        0.5 * v * v + self.potential(u)
    }

    /// Upper limit on the comparison parameter:
    /// `beta_bar = kq [1 - b/(a alpha^{2/kq})]`.
    pub fn beta_bar(&self, alpha: f64) -> f64 {
        self.kq * (1.0 - self.b_tilde / (self.a_tilde * alpha.powf(2.0 / self.kq)))
    }
}

/// The structural points of `f`: `xi2 < xi1 < xi0` with `f'(xi2) = 0`,
/// `f(xi1) = 0`, `int_0^{xi0} f = 0`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalPoints {
    pub xi0: f64,
    pub xi1: f64,
    pub xi2: f64,
}

pub fn critical_points(params: &OdeParams) -> CriticalPoints {
    let s = params.kq;
    let ratio = params.b_tilde / params.a_tilde;
    CriticalPoints {
        xi0: (ratio * (s + 1.0) / s).powf(s / 2.0),
        xi1: ratio.powf(s / 2.0),
        xi2: (ratio / params.exponent).powf(s / 2.0),
    }
}

/// Trajectory classification.
///
/// `Negative` (N): the solution crossed zero at `b_alpha`. `Positive`
/// (P): the energy went negative while `u` stayed positive, or `u'`
/// turned nonnegative below `xi0` — either way the solution can never
/// reach zero. `Undetermined`: neither fired by `tau_max`; ground-state
/// candidates always land here (G has measure zero and is never claimed
/// exactly).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Classification {
    Negative { b_alpha: f64 },
    Positive { tau_detected: f64 },
    Undetermined { tau_max: f64 },
}

impl Classification {
    pub fn is_negative(&self) -> bool {
        matches!(self, Classification::Negative { .. })
    }
    pub fn is_positive(&self) -> bool {
        matches!(self, Classification::Positive { .. })
    }
    pub fn is_undetermined(&self) -> bool {
        matches!(self, Classification::Undetermined { .. })
    }
}

/// Detection floors, relative to `alpha`. Double precision cannot track a
/// ground-state trajectory below the unstable-mode noise (local errors of
/// size ~1e-12 grow like `e^{tau/2}` once `u < xi2`), so N/P need `|u|` to
/// clear a floor before they fire; the crossing itself is then refined on
/// the dense output, so `b(alpha)` does not depend on the floor.
const DETECT_FLOOR_REL: f64 = 1e-2;

/// Dense ODE solution with classification and sampled diagnostic arrays.
#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub params: OdeParams,
    pub alpha: f64,
    /// Start of integration (series initialization point).
    pub tau0: f64,
    /// Last integrated tau.
    pub tau_end: f64,
    pub classification: Classification,
    /// Uniform sample grid on `[tau0, tau_end]`.
    pub taus: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prime: Vec<f64>,
    pub w: Vec<f64>,
    pub w_prime: Vec<f64>,
    pub energy: Vec<f64>,
    #[serde(skip)]
    dense: DenseSolution<4>,
}

impl Trajectory {
    /// Evaluate `(u, u', w, w')` anywhere in `[tau0, tau_end]`.
    pub fn eval(&self, tau: f64) -> [f64; 4] {
        self.dense.eval(tau)
    }

    /// End of the range on which pointwise analyses of `u` are reliable:
    /// up to `b(alpha)` for N, otherwise up to the last sample where `u`
    /// clears the detection floor (beyond that the trajectory is noise).
    pub fn analysis_end(&self) -> f64 {
        match self.classification {
            Classification::Negative { b_alpha } => b_alpha,
            _ => {
                let floor = DETECT_FLOOR_REL * self.alpha;
                let mut end = self.tau0;
                for (i, &u) in self.u.iter().enumerate() {
                    if u >= floor {
                        end = self.taus[i];
                    } else {
                        break;
                    }
                }
                end
            }
        }
    }

    /// First `tau` with `u(tau) = xi1` (unique on monotone trajectories),
    /// refined on the dense output.
    pub fn tau1(&self) -> Option<f64> {
        let xi1 = critical_points(&self.params).xi1;
        if self.alpha <= xi1 {
            return None;
        }
        let mut prev = (self.taus[0], self.u[0] - xi1);
        for (&tau, &u) in self.taus.iter().zip(&self.u).skip(1) {
            let val = u - xi1;
            if prev.1 > 0.0 && val <= 0.0 {
                // Bisect u - xi1 on the dense output.
                let (mut lo, mut hi) = (prev.0, tau);
                for _ in 0..100 {
                    if hi - lo <= 1e-12 {
                        break;
                    }
                    let mid = 0.5 * (lo + hi);
                    if self.dense.eval_component(mid, 0) - xi1 > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return Some(0.5 * (lo + hi));
            }
            prev = (tau, val);
        }
        None
    }

    /// Largest per-step energy increase relative to the trajectory energy
    /// scale (should be ~0: E is non-increasing).
    pub fn worst_energy_jump(&self) -> f64 {
        let scale = self
            .energy
            .iter()
            .fold(self.params.b_tilde * self.alpha * self.alpha, |m, e| {
                m.max(e.abs())
            });
        let mut worst = 0.0f64;
        for pair in self.energy.windows(2) {
            worst = worst.max(pair[1] - pair[0]);
        }
        worst / scale
    }

    /// Energy monotone within `1e-10` of the energy scale, per step.
    pub fn energy_monotone(&self) -> bool {
        self.worst_energy_jump() <= 1e-10
    }

    /// `u' < 0` on the decreasing range (strictly after the start, up to
    /// the analysis end).
    pub fn u_prime_negative(&self) -> bool {
        let end = self.analysis_end();
        self.taus
            .iter()
            .zip(&self.u_prime)
            .skip(1)
            .take_while(|(t, _)| **t < end)
            .all(|(_, v)| *v < 0.0)
    }

    /// Plot-ready CSV: `tau,u,u_prime,w,w_prime,E,theta` (theta blank
    /// where guarded).
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "tau,u,u_prime,w,w_prime,E,theta")?;
        let guard = 1e-12 * self.alpha;
        for i in 0..self.taus.len() {
            let theta = if self.u[i] > guard {
                format!("{:.15e}", -self.taus[i].sinh() * self.u_prime[i] / self.u[i])
            } else {
                "nan".to_string()
            };
            writeln!(
                out,
                "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{:.15e},{}",
                self.taus[i],
                self.u[i],
                self.u_prime[i],
                self.w[i],
                self.w_prime[i],
                self.energy[i],
                theta
            )?;
        }
        Ok(())
    }
}

/// Integrate the shooting problem from `u(0) = alpha` with the variation
/// equation attached, classify, and sample diagnostics.
///
/// Starts at `tau0 = 1e-4` from the regular series
/// `u = alpha - f(alpha) tau^2/4`, `w = 1 - f'(alpha) tau^2/4`
/// (the `coth` singularity is removable on this branch). `tol` is the
/// integrator's relative tolerance (absolute = tol/100); classification
/// events are refined on the dense output to 1e-12.
pub fn shoot(alpha: f64, params: &OdeParams, tau_max: f64, tol: f64) -> Result<Trajectory> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be > 0")));
    }
    if !(tau_max > 0.1) {
        return Err(Error::Domain(format!("tau_max = {tau_max} too small")));
    }
    let p = *params;
    let tau0 = 1e-4;
    let fa = p.f(alpha);
    let fpa = p.f_prime(alpha);
    let y0 = [
        alpha - fa * tau0 * tau0 / 4.0,
        -fa * tau0 / 2.0,
        1.0 - fpa * tau0 * tau0 / 4.0,
        -fpa * tau0 / 2.0,
    ];
    let rhs = move |tau: f64, y: &[f64; 4]| {
        let coth = 1.0 / tau.tanh();
        [
            y[1],
            -coth * y[1] - p.f(y[0]),
            y[3],
            -coth * y[3] - p.f_prime(y[0]) * y[2],
        ]
    };

    let floor = DETECT_FLOOR_REL * alpha;
    let e_floor = 1e-11 * (1.0 + p.b_tilde * alpha * alpha);
    let xi0 = critical_points(&p).xi0;
    let mut classification: Option<Classification> = None;
    let mut crossed = false;

    let opts = Dopri5Options {
        rel_tol: tol,
        abs_tol: tol * 1e-2,
        ..Dopri5Options::default()
    };
    let dense = integrate(rhs, tau0, tau_max, y0, &opts, |tau, y| {
        let (u, v) = (y[0], y[1]);
        if !u.is_finite() || u.abs() > 1e8 * alpha {
            return StepOutcome::Stop;
        }
        if u <= -floor {
            crossed = true;
            return StepOutcome::Stop;
        }
        if classification.is_none() && u > floor {
            let e = p.energy(u, v);
            if e < -e_floor || (v >= 0.0 && u < xi0 && tau > tau0 * 4.0) {
                classification = Some(Classification::Positive { tau_detected: tau });
            }
        }
        StepOutcome::Continue
    })?;

    let tau_end = dense.t_end();
    let classification = if crossed {
        // Locate the first sign change of u across the recorded steps and
        // refine it.
        let mut b_alpha = tau_end;
        let mut prev_t = tau0;
        let mut prev_u = y0[0];
        'search: for step in &dense.steps {
            // Sample each step a few times so a crossing inside a long
            // step is still bracketed.
            for j in 1..=4 {
                let t = step.t0 + step.h * j as f64 / 4.0;
                let u = step.eval(t)[0];
                if prev_u > 0.0 && u <= 0.0 {
                    b_alpha = dense.refine_zero(0, prev_t, t);
                    break 'search;
                }
                prev_t = t;
                prev_u = u;
            }
        }
        Classification::Negative { b_alpha }
    } else if let Some(c) = classification {
        c
    } else {
        Classification::Undetermined { tau_max }
    };

    // Uniform diagnostic sampling, step ~0.01.
    let n_out = (((tau_end - tau0) / 0.01).ceil() as usize).clamp(200, 8000) + 1;
    let mut taus = Vec::with_capacity(n_out);
    let mut u = Vec::with_capacity(n_out);
    let mut u_prime = Vec::with_capacity(n_out);
    let mut w = Vec::with_capacity(n_out);
    let mut w_prime = Vec::with_capacity(n_out);
    let mut energy = Vec::with_capacity(n_out);
    for i in 0..n_out {
        let tau = tau0 + (tau_end - tau0) * i as f64 / (n_out - 1) as f64;
        let y = dense.eval(tau);
        taus.push(tau);
        u.push(y[0]);
        u_prime.push(y[1]);
        w.push(y[2]);
        w_prime.push(y[3]);
        energy.push(p.energy(y[0], y[1]));
    }

    Ok(Trajectory {
        params: p,
        alpha,
        tau0,
        tau_end,
        classification,
        taus,
        u,
        u_prime,
        w,
        w_prime,
        energy,
        dense,
    })
}

/// Default horizon for classification runs. Sized for the linearized tail
/// `u'' + u' - b u ~ 0` of the presets in scope; for very small `b` grow
/// it like `1/sqrt(b)`.
pub const DEFAULT_TAU_MAX: f64 = 40.0;

/// Growth rate of the unstable tail mode: the positive root of
/// `lambda^2 + lambda - b = 0`.
pub fn unstable_rate(params: &OdeParams) -> f64 {
    0.5 * (-1.0 + (1.0 + 4.0 * params.b_tilde).sqrt())
}

/// Horizon up to which a double-precision trajectory launched on the
/// ground state stays on the ridge: integration noise of size ~1e-12
/// grows like `e^{lambda_+ tau}` and must remain below the detection
/// floor. Use this as `tau_max` for near-ground admissibility runs.
pub fn near_ground_horizon(params: &OdeParams) -> f64 {
    3.0 + 0.75 * (1e9f64).ln() / unstable_rate(params)
}

/// Ground-state amplitude by bisection between P- and N-classified
/// initial values: scan `alpha = xi0 * 2^j` for an N-witness (`xi0`
/// itself is in P), then bisect until the bracket width drops below
/// `tol_alpha`. Undetermined midpoints count to the positive side, so the
/// estimate approaches the N/not-N boundary; its width is the certificate.
pub fn bisect_ground_state(params: &OdeParams, tol_alpha: f64) -> Result<f64> {
    bisect_ground_state_with_tol(params, tol_alpha, 1e-10)
}

/// [`bisect_ground_state`] with an explicit integrator tolerance.
/// Classifications within `|alpha - alpha*|` of roughly `30 * shoot_tol`
/// are driven by integration noise rather than the true trajectory, so
/// push `shoot_tol` down when the bracket must be trusted below ~1e-9.
pub fn bisect_ground_state_with_tol(
    params: &OdeParams,
    tol_alpha: f64,
    shoot_tol: f64,
) -> Result<f64> {
    if !(tol_alpha > 0.0) {
        return Err(Error::Parameter(format!("tol_alpha = {tol_alpha} must be > 0")));
    }
    let xi0 = critical_points(params).xi0;
    let mut lo = xi0;
    let mut hi = None;
    for j in 1..=40 {
        let alpha = xi0 * f64::powi(2.0, j);
        let traj = shoot(alpha, params, DEFAULT_TAU_MAX, shoot_tol)?;
        if traj.classification.is_negative() {
            hi = Some(alpha);
            break;
        }
        lo = alpha;
    }
    let mut hi = hi.ok_or_else(|| {
        Error::Search("no N-witness found below the overflow cap (alpha = xi0 * 2^40)".into())
    })?;
    while hi - lo > tol_alpha {
        let mid = 0.5 * (lo + hi);
        let traj = shoot(mid, params, DEFAULT_TAU_MAX, shoot_tol)?;
        if traj.classification.is_negative() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
