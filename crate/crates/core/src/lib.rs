//! Floquet data and critical-point classification for periodic
//! Sturm–Liouville operators `(1/ω)(-d²/dx² + q)` whose weight ω changes
//! sign.
//!
//! The modules follow the computation pipeline:
//!
//! - [`coeffs`]: piecewise coefficient models, turning points
//! - [`transfer`]: fundamental solutions, monodromy, discriminant Δ and Δ•
//! - [`floquet`]: multipliers, Weyl coefficients, Floquet solutions
//! - [`bands`]: Dirichlet, periodic and antiperiodic eigenvalues, bands
//! - [`criticality`]: J-positivity, the critical points 0 and ∞, similarity
//! - [`resolvent`]: finite-difference probe of resolvent-norm growth
//! - [`cli`]: command-line front end and serialization

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bands;
pub mod cli;
pub mod coeffs;
pub mod criticality;
pub mod error;
pub mod floquet;
pub mod integrator;
mod linalg;
pub mod resolvent;
pub mod roots;
pub mod transfer;

pub use coeffs::{builtin_model, PeriodicCoefficients};
pub use error::{Error, Result};
pub use num_complex::Complex64;
