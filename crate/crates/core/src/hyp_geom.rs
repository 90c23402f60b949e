//! Coordinates, measures, and quadrature on the Poincaré disk and the
//! upper half-plane.
//!
//! The disk model carries two measures:
//!
//! * the coherent-state measure
//!   `d nu = ((2k-1)/pi) (1-|zeta|^2)^{-2} d^2 zeta`, and
//! * the standard hyperbolic measure
//!   `d mu = 4 (1-|zeta|^2)^{-2} d^2 zeta`,
//!
//! related by `d nu = ((2k-1)/(4 pi)) d mu`. Radial integrands are reduced
//! through the substitution `t = |zeta|^2`, which turns every radial
//! integral into a 1-D integral on (0,1) and doubles the effective
//! polynomial exactness of the Gauss rule. The boundary weight
//! `(1-t)^{-2}` is never integrated bare: callers must supply integrands
//! that carry at least `(1-t)^{2+delta}` decay (every caller in this crate
//! guarantees `kq > 2`, which is exactly that condition).
//!
//! The upper half-plane carries `d mu = dt dy / y^2`; its integrals are
//! compactified via `t = tan(theta)`, `y = exp(s)` with the s-range grown
//! adaptively until boundary samples are negligible.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::su11::QuantumNumber;

/// A point of the open unit disk, `zeta = re + i im`, `|zeta| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub re: f64,
    pub im: f64,
}

impl DiskPoint {
    /// Construct a disk point; rejects points on or outside the unit circle.
    pub fn new(re: f64, im: f64) -> Result<Self> {
        let r2 = re * re + im * im;
        if !(r2 < 1.0) {
            return Err(Error::Domain(format!(
                "|zeta|^2 = {r2} must be < 1 (zeta = {re} + {im}i)"
            )));
        }
        Ok(Self { re, im })
    }

    pub const ORIGIN: DiskPoint = DiskPoint { re: 0.0, im: 0.0 };

    pub fn abs_sq(&self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn to_hyperbolic(self) -> HyperbolicPoint {
        disk_to_hyperbolic(self)
    }
}

/// Geodesic polar coordinates: `zeta = tanh(tau/2) e^{i phi}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicPoint {
    /// Radial coordinate, the hyperbolic distance from the origin (>= 0).
    pub tau: f64,
    /// Angle in [0, 2 pi).
    pub phi: f64,
}

impl HyperbolicPoint {
    pub fn new(tau: f64, phi: f64) -> Result<Self> {
        if !(tau >= 0.0) {
            return Err(Error::Domain(format!("tau = {tau} must be >= 0")));
        }
        Ok(Self {
            tau,
            phi: normalize_angle(phi),
        })
    }

    pub fn to_disk(self) -> DiskPoint {
        let r = (self.tau / 2.0).tanh();
        DiskPoint {
            re: r * self.phi.cos(),
            im: r * self.phi.sin(),
        }
    }
}

fn normalize_angle(phi: f64) -> f64 {
    let mut a = phi % std::f64::consts::TAU;
    if a < 0.0 {
        a += std::f64::consts::TAU;
    }
    // The wrap can land exactly on 2 pi for tiny negative inputs.
    if a >= std::f64::consts::TAU {
        a = 0.0;
    }
    a
}

/// `zeta = tanh(tau/2) e^{i phi}` inverted: `tau = 2 atanh(|zeta|)`,
/// `phi = arg(zeta)` normalized to [0, 2 pi).
pub fn disk_to_hyperbolic(p: DiskPoint) -> HyperbolicPoint {
    let r = p.abs_sq().sqrt();
    let tau = 2.0 * r.atanh();
    let phi = if r == 0.0 {
        0.0
    } else {
        normalize_angle(p.im.atan2(p.re))
    };
    HyperbolicPoint { tau, phi }
}

/// Hyperbolic distance between two disk points (curvature -1 metric,
/// `ds^2 = 4 |d zeta|^2 / (1-|zeta|^2)^2`), so `d(0, zeta) = tau(zeta)`.
pub fn hyperbolic_distance(a: DiskPoint, b: DiskPoint) -> f64 {
    let za = a.to_complex();
    let zb = b.to_complex();
    let m = ((za - zb) / (Complex64::new(1.0, 0.0) - za.conj() * zb)).norm();
    2.0 * m.atanh()
}

/// Density of `d nu` against Cartesian area measure, as a function of
/// `t = |zeta|^2`: `(2k-1)/pi * (1-t)^{-2}`.
pub fn nu_density(t: f64, k: QuantumNumber) -> Result<f64> {
    let two_k = k.two_k();
    if two_k <= 1.0 {
        return Err(Error::Parameter(format!(
            "nu density requires 2k > 1, got 2k = {two_k}"
        )));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::Domain(format!("t = {t} must lie in [0, 1)")));
    }
    let om = 1.0 - t;
    Ok((two_k - 1.0) / std::f64::consts::PI / (om * om))
}

/// Node counts, refinement policy, and tolerances for the disk and
/// half-plane integrals. Refinement doubles both node counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub rel_tol: f64,
    pub max_refinements: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            radial_nodes: 256,
            angular_nodes: 256,
            rel_tol: 1e-10,
            max_refinements: 4,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        radial_nodes: usize,
        angular_nodes: usize,
        rel_tol: f64,
        max_refinements: usize,
    ) -> Result<Self> {
        let spec = Self {
            radial_nodes,
            angular_nodes,
            rel_tol,
            max_refinements,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Cheaper settings for corpus sweeps where inequality margins are
    /// large (hundreds of states at ~1e-8 accuracy). The extra refinement
    /// headroom is for states whose holomorphic factor has zeros inside
    /// the disk, where the gradient integrand is only Hölder there.
    pub fn corpus() -> Self {
        Self {
            radial_nodes: 96,
            angular_nodes: 128,
            rel_tol: 1e-8,
            max_refinements: 5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 16 {
            return Err(Error::Parameter(format!(
                "radial_nodes = {} must be >= 16",
                self.radial_nodes
            )));
        }
        if self.angular_nodes < 8 {
            return Err(Error::Parameter(format!(
                "angular_nodes = {} must be >= 8",
                self.angular_nodes
            )));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::Parameter(format!(
                "rel_tol = {} must be > 0",
                self.rel_tol
            )));
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1], cached per order.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, Arc::clone(&rule));
    rule
}

/// Newton iteration on the Legendre polynomial recurrence. Nodes are
/// accurate to ~1e-15; symmetric pairs are mirrored exactly.
fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Fixed-order Gauss–Legendre approximation of `int_a^b g`.
fn gauss_on_interval(n: usize, a: f64, b: f64, g: &mut dyn FnMut(f64) -> f64) -> f64 {
    let rule = gauss_legendre(n);
    let (nodes, weights) = (&rule.0, &rule.1);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * g(mid + half * x);
    }
    acc * half
}

/// Doubles resolution until two successive estimates agree to `rel_tol`;
/// returns the finer estimate, or an accuracy error carrying the last two.
/// With `max_refinements = 0` the base estimate is returned unchecked.
fn refine<F: FnMut(usize) -> f64>(spec: &QuadratureSpec, mut eval: F) -> Result<f64> {
    spec.validate()?;
    let mut previous = eval(0);
    for level in 1..=spec.max_refinements {
        let latest = eval(level);
        let scale = latest.abs().max(previous.abs()).max(1e-300);
        if (latest - previous).abs() <= spec.rel_tol * scale {
            return Ok(latest);
        }
        if level == spec.max_refinements {
            return Err(Error::Accuracy {
                latest,
                previous,
                refinements: spec.max_refinements,
            });
        }
        previous = latest;
    }
    Ok(previous)
}

/// `int g d nu` for a radial integrand given as a function of `t = |zeta|^2`:
/// computes `(2k-1) int_0^1 g(t) (1-t)^{-2} dt` by Gauss–Legendre with
/// refinement.
///
/// The integrand must supply the boundary decay itself (at least
/// `(1-t)^{2+delta}`); the weight is never integrated bare.
pub fn radial_integral_nu<F: Fn(f64) -> f64>(
    g: F,
    k: QuantumNumber,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let two_k = k.two_k();
    if two_k <= 1.0 {
        return Err(Error::Parameter(format!(
            "radial integral requires 2k > 1, got 2k = {two_k}"
        )));
    }
    let pref = two_k - 1.0;
    refine(spec, |level| {
        let n = spec.radial_nodes << level;
        gauss_on_interval(n, 0.0, 1.0, &mut |t| {
            let om = 1.0 - t;
            pref * g(t) / (om * om)
        })
    })
}

/// Shared tensor engine for the disk integrals: Gauss–Legendre in
/// `t = |zeta|^2`, uniform (periodic trapezoid) in `phi`, against an area
/// weight `w(t)` per unit Cartesian area.
fn disk_tensor<F: Fn(DiskPoint) -> f64, W: Fn(f64) -> f64>(
    g: &F,
    weight: &W,
    spec: &QuadratureSpec,
) -> Result<f64> {
    refine(spec, |level| {
        let nr = spec.radial_nodes << level;
        let na = spec.angular_nodes << level;
        let dphi = std::f64::consts::TAU / na as f64;
        let directions: Vec<(f64, f64)> = (0..na)
            .map(|j| {
                let phi = dphi * j as f64;
                (phi.cos(), phi.sin())
            })
            .collect();
        gauss_on_interval(nr, 0.0, 1.0, &mut |t| {
            let r = t.sqrt();
            let mut ang = 0.0;
            for (c, s) in &directions {
                ang += g(DiskPoint {
                    re: r * c,
                    im: r * s,
                });
            }
            // Angular mean times 2 pi, times the area weight; the radial
            // substitution d^2 zeta = pi dt dphi/(2 pi) is folded in.
            ang / na as f64 * std::f64::consts::PI * weight(t)
        })
    })
}

/// `int g d nu` over the disk for a general integrand: 2-D tensor
/// quadrature (Gauss–Legendre in `t`, uniform trapezoid in `phi`).
pub fn disk_integral_nu<F: Fn(DiskPoint) -> f64>(
    g: F,
    k: QuantumNumber,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let two_k = k.two_k();
    if two_k <= 1.0 {
        return Err(Error::Parameter(format!(
            "disk integral requires 2k > 1, got 2k = {two_k}"
        )));
    }
    let pref = (two_k - 1.0) / std::f64::consts::PI;
    disk_tensor(&g, &|t| pref / ((1.0 - t) * (1.0 - t)), spec)
}

/// `int g d mu` over the disk against the standard hyperbolic measure
/// `d mu = 4 (1-|zeta|^2)^{-2} d^2 zeta` (k-independent).
pub fn disk_integral_mu<F: Fn(DiskPoint) -> f64>(g: F, spec: &QuadratureSpec) -> Result<f64> {
    disk_tensor(&g, &|t| 4.0 / ((1.0 - t) * (1.0 - t)), spec)
}

/// `int int g(t, y) dt dy / y^2` over the upper half-plane
/// `(t, y) in R x (0, inf)`.
///
/// Compactification: `t = tan(theta)` on (-pi/2, pi/2) and `y = exp(s)`
/// with `s` on [-S, S]; `S` starts at 40 and grows until the boundary rows
/// contribute nothing at the requested tolerance (integrands in scope decay
/// polynomially in `(t, y)`, i.e. exponentially in `s`).
pub fn halfplane_integral_mu<F: Fn(f64, f64) -> f64>(g: F, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    let mut s_max = 40.0;
    loop {
        // Transformed integrand: g(tan th, e^s) sec^2(th) e^{-s}.
        let h = |theta: f64, s: f64| {
            let sec = 1.0 / theta.cos();
            g(theta.tan(), s.exp()) * sec * sec * (-s).exp()
        };
        // Boundary check on a coarse angular sample.
        let probe = gauss_legendre(64);
        let mut boundary: f64 = 0.0;
        let mut interior: f64 = 0.0;
        for x in probe.0.iter() {
            let theta = x * (std::f64::consts::FRAC_PI_2 - 1e-12);
            boundary = boundary.max(h(theta, s_max).abs()).max(h(theta, -s_max).abs());
            interior = interior.max(h(theta, 0.0).abs()).max(h(theta, 2.0).abs());
        }
        if boundary > spec.rel_tol * 1e-3 * interior.max(1e-300) && s_max < 400.0 {
            s_max *= 1.5;
            continue;
        }

        return refine(spec, |level| {
            let ns = spec.radial_nodes << level;
            let nt = spec.angular_nodes << level;
            gauss_on_interval(ns, -s_max, s_max, &mut |s| {
                gauss_on_interval(nt, -std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2, &mut |theta| {
                    h(theta, s)
                })
            })
        });
    }
}
