//! Discrete-series representation data: basis coefficients, finite state
//! vectors, coherent states, and the coherent-state transform.
//!
//! A state is a finite sequence of complex coefficients `a_m` against the
//! orthonormal basis of the representation labeled by the half-integer
//! quantum number `k`. Its transform is the disk function
//!
//! ```text
//! L psi(zeta) = (1 - |zeta|^2)^k  sum_m  c_m(k) conj(a_m) zeta^m,
//! c_m(k) = sqrt(Gamma(m + 2k) / (m! Gamma(2k))),
//! ```
//!
//! an isometry onto a subspace of L^2(d nu). Coherent states enter either
//! through the closed-form reproducing kernel (exact) or as truncated
//! coefficient sequences with a certified tail bound.
//!
//! `k` is restricted to `k >= 1`: the measure `d nu` carries the factor
//! `2k - 1`, and every downstream check assumes `kq > 2`, so `k = 1/2`
//! would only produce boundary-divergent integrals.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyp_geom::DiskPoint;
use crate::rng::SplitMix64;
use crate::special::ln_gamma;

/// The half-integer `k` labeling the discrete-series representation,
/// stored as `2k` to keep it exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuantumNumber {
    twice_k: u32,
}

impl QuantumNumber {
    /// `twice_k = 2k >= 2`, i.e. `k >= 1` in half-integer steps.
    pub fn new(twice_k: u32) -> Result<Self> {
        if twice_k < 2 {
            return Err(Error::Parameter(format!(
                "quantum number requires 2k >= 2, got 2k = {twice_k}"
            )));
        }
        Ok(Self { twice_k })
    }

    /// Parse a half-integer written as `1`, `1.5`, `3/2`, ...
    pub fn from_half_integer(k: f64) -> Result<Self> {
        let twice = 2.0 * k;
        if (twice - twice.round()).abs() > 1e-9 {
            return Err(Error::Parameter(format!("k = {k} is not a half-integer")));
        }
        let r = twice.round();
        if !(2.0..=u32::MAX as f64).contains(&r) {
            return Err(Error::Parameter(format!("k = {k} out of range (k >= 1)")));
        }
        Self::new(r as u32)
    }

    pub fn twice_k(&self) -> u32 {
        self.twice_k
    }

    pub fn k(&self) -> f64 {
        f64::from(self.twice_k) / 2.0
    }

    pub fn two_k(&self) -> f64 {
        f64::from(self.twice_k)
    }
}

impl std::fmt::Display for QuantumNumber {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice_k % 2 == 0 {
            write!(f, "{}", self.twice_k / 2)
        } else {
            write!(f, "{}/2", self.twice_k)
        }
    }
}

/// Natural log of the basis coefficient,
/// `(1/2)(ln Gamma(m + 2k) - ln Gamma(m+1) - ln Gamma(2k))`.
///
/// Always finite (no intermediate overflow) for m up to 10^6 at k up to
/// 100; use this form for extreme (m, k) where the coefficient itself
/// exceeds f64 range.
pub fn ln_basis_coeff(m: usize, k: QuantumNumber) -> f64 {
    let two_k = k.two_k();
    let mf = m as f64;
    0.5 * (ln_gamma(mf + two_k) - ln_gamma(mf + 1.0) - ln_gamma(two_k))
}

/// Normalized basis coefficient `sqrt(Gamma(m + 2k) / (m! Gamma(2k)))`,
/// evaluated in the log domain.
pub fn basis_coeff(m: usize, k: QuantumNumber) -> f64 {
    ln_basis_coeff(m, k).exp()
}

/// A finite coefficient sequence `(a_m), m = 0..=M` for the representation
/// labeled by `k`.
///
/// Serialized as `{"twice_k": int, "coeffs": [[re, im], ...]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub k: QuantumNumber,
    pub coeffs: Vec<Complex64>,
}

impl StateVector {
    pub fn new(k: QuantumNumber, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Parameter(
                "a state vector needs at least one coefficient".into(),
            ));
        }
        Ok(Self { k, coeffs })
    }

    /// The basis state `e_m` (a single unit coefficient at index m).
    pub fn basis(k: QuantumNumber, m: usize) -> Self {
        let mut coeffs = vec![Complex64::ZERO; m + 1];
        coeffs[m] = Complex64::new(1.0, 0.0);
        Self { k, coeffs }
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescale so that `sum |a_m|^2 = 1`.
    pub fn normalize(&mut self) {
        let n = self.norm_sq().sqrt();
        if n > 0.0 {
            for c in &mut self.coeffs {
                *c /= n;
            }
        }
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm_sq() - 1.0).abs() <= tol
    }

    /// Highest retained index M.
    pub fn max_index(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            twice_k: u32,
            coeffs: Vec<[f64; 2]>,
            #[serde(skip)]
            _marker: std::marker::PhantomData<&'a ()>,
        }
        Repr {
            twice_k: self.k.twice_k(),
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            _marker: std::marker::PhantomData,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            twice_k: u32,
            coeffs: Vec<[f64; 2]>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let k = QuantumNumber::new(repr.twice_k).map_err(D::Error::custom)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        StateVector::new(k, coeffs).map_err(D::Error::custom)
    }
}

/// The transform at one disk point, split into the boundary factor and the
/// holomorphic part: `value = (1 - |zeta|^2)^k * holo`, with the termwise
/// derivative of the holomorphic series (plumbing for analytic gradients).
#[derive(Debug, Clone, Copy)]
pub struct TransformValue {
    /// `L psi(zeta)`
    pub value: Complex64,
    /// `Phi(zeta) = sum_m c_m(k) conj(a_m) zeta^m`
    pub holo: Complex64,
    /// `d Phi / d zeta`
    pub holo_deriv: Complex64,
}

/// A state prepared for repeated evaluation: the Horner coefficients
/// `c_m(k) conj(a_m)` are computed once, so quadrature loops do not pay
/// for log-gamma at every node.
#[derive(Debug, Clone)]
pub struct TransformEvaluator {
    k: QuantumNumber,
    terms: Vec<Complex64>,
}

impl TransformEvaluator {
    pub fn new(psi: &StateVector) -> Self {
        let terms = psi
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, a)| basis_coeff(m, psi.k) * a.conj())
            .collect();
        Self { k: psi.k, terms }
    }

    pub fn k(&self) -> QuantumNumber {
        self.k
    }

    /// Horner evaluation of the holomorphic series, its termwise
    /// derivative, and the full transform value.
    pub fn eval(&self, p: DiskPoint) -> TransformValue {
        let z = p.to_complex();
        let mut holo = Complex64::ZERO;
        let mut deriv = Complex64::ZERO;
        for b in self.terms.iter().rev() {
            // deriv runs one Horner step ahead: d/dz (holo) term-by-term.
            deriv = deriv * z + holo;
            holo = holo * z + b;
        }
        let pref = (1.0 - p.abs_sq()).powf(self.k.k());
        TransformValue {
            value: pref * holo,
            holo,
            holo_deriv: deriv,
        }
    }
}

/// Evaluate the coherent-state transform of `psi` at a single disk point.
/// For quadrature loops build a [`TransformEvaluator`] once instead.
pub fn transform_eval(psi: &StateVector, p: DiskPoint) -> TransformValue {
    TransformEvaluator::new(psi).eval(p)
}

/// Closed form of the transform of the coherent state centered at `z0`,
/// evaluated at `p`:
///
/// ```text
/// <z0 | p> = (1-|z0|^2)^k (1-|p|^2)^k (1 - conj(z0) p)^{-2k}
/// ```
///
/// Agrees with `transform_eval` of the truncated coherent coefficient
/// sequence as the truncation index grows.
pub fn coherent_kernel(z0: DiskPoint, p: DiskPoint, k: QuantumNumber) -> Complex64 {
    let a = (1.0 - z0.abs_sq()).powf(k.k());
    let b = (1.0 - p.abs_sq()).powf(k.k());
    let base = Complex64::new(1.0, 0.0) - z0.to_complex().conj() * p.to_complex();
    a * b * base.powi(-(k.twice_k() as i32))
}

/// A truncated coherent state with its tail report.
#[derive(Debug, Clone)]
pub struct CoherentTruncation {
    pub state: StateVector,
    /// Weight `sum_{m > M} |a_m|^2` dropped by the truncation, relative to
    /// the full (unit) norm.
    pub tail: f64,
    /// Set when the tail exceeds 1e-10 at the requested truncation index.
    pub tail_warning: bool,
}

/// Coefficients of the coherent state centered at `z0`, truncated at index
/// `m_max` and normalized: `a_m` proportional to `c_m(k) z0^m`, so that
/// `transform_eval` reproduces `coherent_kernel(z0, .)` (the transform
/// conjugates the coefficients internally).
pub fn coherent_coeffs(z0: DiskPoint, k: QuantumNumber, m_max: usize) -> CoherentTruncation {
    let z = z0.to_complex();
    let pref = (1.0 - z0.abs_sq()).powf(k.k());
    let mut coeffs = Vec::with_capacity(m_max + 1);
    let mut zp = Complex64::new(1.0, 0.0);
    let mut kept = 0.0;
    for m in 0..=m_max {
        let a = pref * basis_coeff(m, k) * zp;
        kept += a.norm_sqr();
        coeffs.push(a);
        zp *= z;
    }
    // The untruncated sequence has exactly unit norm:
    // sum_m c_m^2 |z0|^{2m} = (1 - |z0|^2)^{-2k}.
    let tail = (1.0 - kept).max(0.0);
    let state = StateVector { k, coeffs }.normalized();
    CoherentTruncation {
        state,
        tail,
        tail_warning: tail > 1e-10,
    }
}

/// Decay rate of the seeded random coefficient sequences.
const RANDOM_STATE_DECAY: f64 = 0.7;

/// A reproducible pseudo-random state: `a_m = (g1 + i g2) * 0.7^m` with
/// `g1, g2` standard normals drawn from SplitMix64 at the given seed, then
/// normalized. Same seed, same state, on every platform.
pub fn random_state(m_max: usize, k: QuantumNumber, seed: u64) -> Result<StateVector> {
    if m_max < 1 {
        return Err(Error::Parameter(format!(
            "random state requires M >= 1, got {m_max}"
        )));
    }
    let mut gen = SplitMix64::new(seed);
    let mut coeffs = Vec::with_capacity(m_max + 1);
    let mut s = 1.0;
    for _ in 0..=m_max {
        let (g1, g2) = gen.next_normal_pair();
        coeffs.push(Complex64::new(g1, g2) * s);
        s *= RANDOM_STATE_DECAY;
    }
    Ok(StateVector { k, coeffs }.normalized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyp_geom::{disk_integral_nu, hyperbolic_distance, QuadratureSpec};

    fn qn(twice_k: u32) -> QuantumNumber {
        QuantumNumber::new(twice_k).unwrap()
    }

    #[test]
    fn quantum_number_bounds() {
        assert!(QuantumNumber::new(1).is_err());
        assert!(QuantumNumber::new(2).is_ok());
        assert_eq!(QuantumNumber::from_half_integer(1.5).unwrap().twice_k(), 3);
        assert!(QuantumNumber::from_half_integer(0.5).is_err());
        assert!(QuantumNumber::from_half_integer(1.3).is_err());
    }

    #[test]
    fn basis_coeff_exact_values() {
        // m = 0: Gamma(2k)/Gamma(2k) = 1 for every k.
        for twice_k in [2, 3, 4, 11] {
            assert!((basis_coeff(0, qn(twice_k)) - 1.0).abs() < 1e-14);
        }
        // m = 1, k = 1: Gamma(3)/(1! Gamma(2)) = 2.
        assert!((basis_coeff(1, qn(2)) - 2f64.sqrt()).abs() < 1e-13);
        // m = 2, k = 3/2: Gamma(5)/(2! Gamma(3)) = 6.
        assert!((basis_coeff(2, qn(3)) - 6f64.sqrt()).abs() < 1e-13);
        // The log-domain form never overflows across the contract range.
        assert!(ln_basis_coeff(1_000_000, qn(200)).is_finite());
        assert!(basis_coeff(1_000_000, qn(6)).is_finite());
        // Exact binomial cross-check: bc(m, k)^2 = C(m + 2k - 1, m).
        assert!((basis_coeff(4, qn(4)).powi(2) - 35.0).abs() < 1e-10);
    }

    #[test]
    fn transform_single_term() {
        // psi = e0: L psi(zeta) = (1-|zeta|^2)^k.
        for twice_k in [2, 3, 4] {
            let k = qn(twice_k);
            let psi = StateVector::basis(k, 0);
            let p = DiskPoint::new(0.3, 0.0).unwrap();
            let got = transform_eval(&psi, p).value;
            let want = (1.0 - 0.09f64).powf(k.k());
            assert!((got.re - want).abs() < 1e-14 && got.im.abs() < 1e-15);
            let origin = transform_eval(&psi, DiskPoint::ORIGIN).value;
            assert!((origin.re - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn transform_e1_value() {
        // e1 at k = 1, zeta = 0.5: (0.75) * sqrt(2) * 0.5.
        let psi = StateVector::basis(qn(2), 1);
        let p = DiskPoint::new(0.5, 0.0).unwrap();
        let got = transform_eval(&psi, p).value;
        let want = 0.75 * 2f64.sqrt() * 0.5;
        assert!((got.re - want).abs() < 1e-14, "{got} vs {want}");
        assert!((want - 0.5303300858899107).abs() < 1e-12);
    }

    #[test]
    fn transform_is_linear() {
        let k = qn(3);
        let s1 = random_state(8, k, 11).unwrap();
        let s2 = random_state(8, k, 12).unwrap();
        let (alpha, beta) = (Complex64::new(0.3, -0.7), Complex64::new(-1.1, 0.2));
        let mut combo = Vec::new();
        for m in 0..=8 {
            combo.push(alpha * s1.coeffs[m] + beta * s2.coeffs[m]);
        }
        let psi = StateVector::new(k, combo).unwrap();
        for p in [
            DiskPoint::new(0.2, 0.1).unwrap(),
            DiskPoint::new(-0.6, 0.3).unwrap(),
        ] {
            let lhs = transform_eval(&psi, p).value;
            // The transform conjugates coefficients, so scalars conjugate
            // on the way through.
            let rhs = alpha.conj() * transform_eval(&s1, p).value
                + beta.conj() * transform_eval(&s2, p).value;
            assert!((lhs - rhs).norm() < 1e-12, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn kernel_special_values() {
        let k = qn(2);
        // Centered at 0 the kernel collapses to the boundary factor.
        let p = DiskPoint::new(0.4, -0.2).unwrap();
        let got = coherent_kernel(DiskPoint::ORIGIN, p, k);
        let want = (1.0 - p.abs_sq()).powf(k.k());
        assert!((got - Complex64::new(want, 0.0)).norm() < 1e-14);
        // |<z0|z0>| = 1.
        let z0 = DiskPoint::new(0.5, 0.0).unwrap();
        assert!((coherent_kernel(z0, z0, k).norm() - 1.0).abs() < 1e-14);
        // k = 1, z0 = zeta = 0.5 -> 1; at zeta = 0 -> 0.75.
        let k1 = qn(2);
        assert!((coherent_kernel(z0, z0, k1).norm() - 1.0).abs() < 1e-14);
        let at0 = coherent_kernel(z0, DiskPoint::ORIGIN, k1);
        assert!((at0.re - 0.75).abs() < 1e-14 && at0.im.abs() < 1e-15);
    }

    #[test]
    fn kernel_matches_truncated_series() {
        let k = qn(4);
        let z0 = DiskPoint::new(0.5, 0.2).unwrap();
        let trunc = coherent_coeffs(z0, k, 200);
        assert!(trunc.tail < 1e-13, "tail {}", trunc.tail);
        for p in [
            DiskPoint::new(0.3, -0.4).unwrap(),
            DiskPoint::new(-0.1, 0.6).unwrap(),
        ] {
            let series = transform_eval(&trunc.state, p).value;
            let exact = coherent_kernel(z0, p, k);
            assert!((series - exact).norm() < 1e-11, "{series} vs {exact}");
        }
    }

    #[test]
    fn kernel_modulus_depends_only_on_distance() {
        // |<z0|z>| = sech^{2k}(d/2): compare random pairs against
        // distance-matched axis pairs.
        let k = qn(3);
        let mut g = crate::rng::SplitMix64::new(99);
        for _ in 0..50 {
            let mut pt = || {
                let r = 0.9 * g.next_f64().sqrt();
                let phi = std::f64::consts::TAU * g.next_f64();
                DiskPoint {
                    re: r * phi.cos(),
                    im: r * phi.sin(),
                }
            };
            let (a, b) = (pt(), pt());
            let d = hyperbolic_distance(a, b);
            let got = coherent_kernel(a, b, k).norm();
            // Distance-matched pair on the real axis: (0, tanh(d/2)).
            let axis = DiskPoint::new((d / 2.0).tanh(), 0.0).unwrap();
            let matched = coherent_kernel(DiskPoint::ORIGIN, axis, k).norm();
            assert!(
                (got - matched).abs() < 1e-12,
                "distance {d}: {got} vs {matched}"
            );
        }
    }

    #[test]
    fn coherent_tail_reporting() {
        let k = qn(2);
        let near = coherent_coeffs(DiskPoint::new(0.5, 0.0).unwrap(), k, 100);
        assert!(near.tail < 1e-10 && !near.tail_warning, "tail {}", near.tail);
        let far = coherent_coeffs(DiskPoint::new(0.9, 0.0).unwrap(), k, 100);
        assert!(far.tail > 1e-10 && far.tail_warning, "tail {}", far.tail);
        // Center 0 is exactly e0.
        let origin = coherent_coeffs(DiskPoint::ORIGIN, k, 5);
        assert_eq!(origin.tail, 0.0);
        assert!((origin.state.coeffs[0].re - 1.0).abs() < 1e-15);
        assert!(origin.state.coeffs[1..].iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn random_state_contract() {
        let k = qn(2);
        let a = random_state(12, k, 1).unwrap();
        let b = random_state(12, k, 1).unwrap();
        let c = random_state(12, k, 2).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
        assert_ne!(a.coeffs, c.coeffs);
        assert!(a.is_normalized(1e-12));
        assert!(random_state(0, k, 1).is_err());
    }

    #[test]
    fn holo_deriv_matches_finite_differences() {
        let k = qn(3);
        let psi = random_state(10, k, 7).unwrap();
        let h = 1e-6;
        for p in [
            DiskPoint::new(0.25, 0.1).unwrap(),
            DiskPoint::new(-0.3, 0.45).unwrap(),
        ] {
            let tv = transform_eval(&psi, p);
            let fp = transform_eval(&psi, DiskPoint::new(p.re + h, p.im).unwrap()).holo;
            let fm = transform_eval(&psi, DiskPoint::new(p.re - h, p.im).unwrap()).holo;
            let fd = (fp - fm) / (2.0 * h);
            let rel = (tv.holo_deriv - fd).norm() / tv.holo_deriv.norm().max(1e-12);
            assert!(rel < 1e-6, "rel {rel}");
        }
    }

    #[test]
    fn basis_isometry_against_closed_form() {
        // int |L e_m|^2 d nu = 1 for every basis vector (checked here for a
        // few; the acceptance suite sweeps m <= 20).
        let spec = QuadratureSpec::default();
        for twice_k in [2, 3, 4, 10] {
            let k = qn(twice_k);
            for m in [0usize, 1, 3, 7] {
                let psi = StateVector::basis(k, m);
                let v = disk_integral_nu(
                    |p| transform_eval(&psi, p).value.norm_sqr(),
                    k,
                    &spec,
                )
                .unwrap();
                assert!(
                    (v - 1.0).abs() < 1e-10,
                    "2k = {twice_k}, m = {m}: {v}"
                );
            }
        }
    }

    #[test]
    fn state_vector_json_round_trip() {
        let k = qn(3);
        let psi = random_state(5, k, 3).unwrap();
        let json = serde_json::to_string(&psi).unwrap();
        assert!(json.contains("\"twice_k\":3"));
        let back: StateVector = serde_json::from_str(&json).unwrap();
        assert_eq!(psi, back);
    }
}
