//! Closed-form constants, mode-by-mode linear analysis, and phase-plane
//! dynamics for the conformally-scaled Laplace problem on product-sphere
//! cones, with a numerical verification layer.
//!
//! The crate is organized along the pipeline:
//!
//! * [`geometry`]: the cone over `S^p(r_p) x S^q(r_q)`: curvature factor,
//!   `mu^2`, volume density, sphere spectra, extremal analysis, and the
//!   plus/minus dichotomy.
//! * [`spectral`]: per-mode coupling constants, indicial exponents, power
//!   series solutions, and Sobolev membership of each branch.
//! * [`dynamics`]: the autonomous planar reduction of the radial nonlinear
//!   problem: coefficients, equilibria, the eleven-case classification, and
//!   solution families with exponents and verdicts.
//! * [`ode`]: adaptive integration, separatrix shooting, exponent
//!   regression, first-integral drift, portrait sampling.
//! * [`scenario`]: the built-in reference parameter sets and the
//!   `key=value` configuration format.
//!
//! All functions are pure; nothing holds shared mutable state, so every API
//! is safe to call concurrently.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod ode;
pub mod scenario;
pub mod spectral;

pub use error::{Error, Result};
