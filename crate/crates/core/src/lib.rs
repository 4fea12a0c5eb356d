//! Numerical laboratory for corrections to the stochastic limit.
//!
//! The crate is organised bottom-up:
//!
//! * [`quad`] adaptive Gauss–Kronrod quadrature and Plemelj (`x ∓ i0`) integrals,
//! * [`funcspace`] Gaussian×polynomial test functions and spectral densities,
//! * [`oscint`] rescaled oscillatory integrals and their distributional expansions,
//! * [`coeffs`] white/dipole noise strengths and spin-boson constants,
//! * [`fock`] the indefinite-metric one-particle space and truncated Fock space,
//! * [`models`] vacuum expectations of the linear, RWA and spin-boson models,
//! * [`oracle`] independent verification routes used by the test suites.

pub mod coeffs;
pub mod error;
pub mod fock;
pub mod funcspace;
pub mod models;
pub mod oracle;
pub mod oscint;
pub mod quad;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand for building a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
