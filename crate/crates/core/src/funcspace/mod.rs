//! Closed-form test functions and spectral densities.

pub mod corpus;
mod gausspoly;
mod jet;
mod poly;
mod profile;

pub use gausspoly::{DerivativeLimit, GaussPoly, GaussPolySum, DEFAULT_MAX_ORDER};
pub use jet::Jet;
pub use profile::{unit_sphere_area, Dispersion, SpectralProfile};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, QuadOptions};

/// `φ(t) = Σ φᵢ(t) Θ_[0,aᵢ](t)` on the half-line `t ≥ 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PiecewiseC1 {
    pieces: Vec<(GaussPolySum, f64)>,
}

impl PiecewiseC1 {
    pub fn new(pieces: Vec<(GaussPolySum, f64)>) -> Result<Self> {
        for (_, cut) in &pieces {
            if !(*cut > 0.0) {
                return Err(Error::InvalidArgument(format!("cutoff must be positive, got {cut}")));
            }
        }
        Ok(Self { pieces })
    }

    /// One smooth piece on `[0, cutoff]`.
    pub fn single(phi: GaussPolySum, cutoff: f64) -> Result<Self> {
        Self::new(vec![(phi, cutoff)])
    }

    pub fn pieces(&self) -> &[(GaussPolySum, f64)] {
        &self.pieces
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        if t < 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.pieces
            .iter()
            .filter(|(_, cut)| t <= *cut)
            .map(|(p, _)| p.eval(t))
            .sum()
    }

    /// Left limit `φ(a)`, i.e. the pairing with `δ₊(· − a)`.
    pub fn left_value(&self, a: f64) -> Complex64 {
        self.eval(a)
    }

    /// Left derivative `φ'_L(a)`; the pairing with `δ₊'(· − a)` is its negative.
    pub fn left_derivative(&self, a: f64) -> Complex64 {
        if a <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        self.pieces
            .iter()
            .filter(|(_, cut)| a <= *cut)
            .map(|(p, _)| p.derivative().eval(a))
            .sum()
    }

    /// Largest finite cutoff (the point beyond which `φ` vanishes), if any.
    pub fn last_cutoff(&self) -> f64 {
        self.pieces.iter().map(|(_, c)| *c).fold(0.0, f64::max)
    }
}

/// Which half of the real line a moment is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Negative,
    Positive,
}

/// Integral value with an absolute error bound (quadrature + tail).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moment {
    pub value: Complex64,
    pub error: f64,
}

/// `∫ y^m f(y) dy` over one half-line.
///
/// The infinite end is truncated where the analytic Gaussian tail bound drops
/// below a tenth of `tol`; the remainder is adaptive Gauss–Kronrod.
pub fn half_line_moment(f: &GaussPolySum, m: usize, side: Side, tol: f64) -> Result<Moment> {
    DerivativeLimit::default().check(m)?;
    if f.is_zero() {
        return Ok(Moment {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let g = f.mul_monomial(m);
    let tail_eps = 0.1 * tol;
    let (lo, hi) = g.effective_support(tail_eps);
    let tail: f64 = tail_eps;
    let (a, b) = match side {
        Side::Negative => (lo.min(0.0), 0.0),
        Side::Positive => (0.0, hi.max(0.0)),
    };
    let breaks: Vec<f64> = g.terms().iter().map(|t| t.center()).collect();
    let opts = QuadOptions {
        abs_tol: 0.5 * tol,
        rel_tol: 0.0,
        max_intervals: 4000,
    };
    let est = quad::integrate_with_breaks(|y| g.eval(y), a, b, &breaks, &opts).map_err(|e| match e {
        Error::Accuracy { achieved, .. } => Error::accuracy("half-line moment", tol, achieved + tail),
        other => other,
    })?;
    let error = est.error + tail;
    if error > tol {
        return Err(Error::accuracy("half-line moment", tol, error));
    }
    Ok(Moment { value: est.value, error })
}
