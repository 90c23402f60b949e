//! Numerical laboratory for SU(1,1) coherent-state transforms on the
//! hyperbolic plane.
//!
//! The crate is organised around the objects it computes with:
//!
//! * [`hyp_geom`] — coordinates, invariant measures and quadrature on the
//!   Poincaré disk and on the upper half-plane.
//! * [`su11`] — discrete-series representation data: basis coefficients,
//!   finite state vectors, coherent states and the coherent-state transform.
//! * [`functionals`] — norms, Wehrl/Rényi entropies and the Fisher
//!   information of transforms, with analytic gradient integrands.
//! * [`inequalities`] — verifiers for the sharp Sobolev inequality, the
//!   norm estimate, entropy bounds, the entropy–energy function and a
//!   direct minimizer of the Sobolev functional.
//! * [`ode`] — shooting-method study of the radial Euler–Lagrange equation
//!   `u'' + coth(tau) u' + f(u) = 0` with N/P/G classification and the
//!   admissibility diagnostics used in the uniqueness analysis.
//!
//! All floating-point work is `f64`. Every public operation is a pure
//! function of its inputs; summation orders are fixed so repeated runs are
//! bit-identical.

pub mod error;
pub mod functionals;
pub mod hyp_geom;
pub mod inequalities;
pub mod ode;
pub mod rng;
pub mod special;
pub mod su11;

pub use error::{Error, Result};
pub use hyp_geom::{DiskPoint, HyperbolicPoint, QuadratureSpec};
pub use su11::{QuantumNumber, StateVector, TransformValue};
