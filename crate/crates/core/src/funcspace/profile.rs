//! Spectral densities `ρ(ω)`: either given directly or obtained by radial
//! reduction of `|g(k)|² dk` under a dispersion law `ω(|k|)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::gausspoly::{DerivativeLimit, GaussPolySum};
use super::jet::Jet;
use crate::error::{Error, Result};

/// Density values below this fraction of the mass are treated as outside the
/// effective support.
const SUPPORT_EPS: f64 = 1e-17;

/// Radial dispersion laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dispersion {
    /// `ω = |k|`
    Massless,
    /// `ω = √(|k|² + m²)`
    Massive { mass: f64 },
}

impl Dispersion {
    pub fn omega(&self, r: f64) -> f64 {
        match *self {
            Dispersion::Massless => r,
            Dispersion::Massive { mass } => (r * r + mass * mass).sqrt(),
        }
    }

    pub fn slope(&self, r: f64) -> f64 {
        match *self {
            Dispersion::Massless => 1.0,
            Dispersion::Massive { mass } => r / (r * r + mass * mass).sqrt(),
        }
    }

    /// Inverse `r(ω)`, defined for `ω` above the threshold.
    pub fn radius(&self, omega: f64) -> f64 {
        match *self {
            Dispersion::Massless => omega,
            Dispersion::Massive { mass } => (omega * omega - mass * mass).max(0.0).sqrt(),
        }
    }

    pub fn threshold(&self) -> f64 {
        match *self {
            Dispersion::Massless => 0.0,
            Dispersion::Massive { mass } => mass.abs(),
        }
    }

    /// Checks strict monotonicity in `r` on `(0, r_max]` by sampling the
    /// closed-form slope.
    fn check_monotone(&self, r_max: f64) -> Result<()> {
        if let Dispersion::Massive { mass } = *self {
            if !(mass > 0.0 && mass.is_finite()) {
                return Err(Error::Unsupported(format!(
                    "massive dispersion needs a positive finite mass, got {mass}"
                )));
            }
        }
        let n = 256;
        for i in 1..=n {
            let r = r_max * i as f64 / n as f64;
            if self.slope(r) <= 0.0 {
                return Err(Error::Unsupported(format!(
                    "dispersion is not strictly monotone at r = {r}; piecewise-monotone splitting is not implemented"
                )));
            }
        }
        Ok(())
    }
}

/// Area of the unit sphere `S^{d−1}` in `ℝ^d` (`S⁰` = two points).
pub fn unit_sphere_area(d: u32) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Density {
    /// `ρ` given directly (real part of the sum), optionally cut below `lower`.
    Direct {
        rho: GaussPolySum,
        derivs: Vec<GaussPolySum>,
        lower: Option<f64>,
    },
    /// Massive radial reduction: `ρ(ω) = S ω r^{d−2} |g(r)|²`.
    Massive {
        mass: f64,
        dim: u32,
        area: f64,
        /// `|g|²` and its derivatives in `r`.
        g2_derivs: Vec<GaussPolySum>,
    },
}

/// Density of states with an effective support interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    density: Density,
    weight: f64,
    lo: f64,
    hi: f64,
    /// Whether `lo` is a genuine edge of the support (as opposed to a
    /// truncation point of a Gaussian tail).
    hard_lower: bool,
    limit: DerivativeLimit,
}

fn derivative_table(f: &GaussPolySum, limit: DerivativeLimit) -> Vec<GaussPolySum> {
    let mut out = Vec::with_capacity(limit.0 + 2);
    let mut g = f.clone();
    for _ in 0..=limit.0 + 1 {
        let next = g.derivative();
        out.push(g);
        g = next;
    }
    out
}

impl SpectralProfile {
    /// Profile given directly by a real-valued Gaussian×polynomial density.
    pub fn synthetic(rho: GaussPolySum) -> Self {
        Self::build_direct(rho, None)
    }

    /// Direct density restricted to `ω > lower`.
    pub fn synthetic_above(rho: GaussPolySum, lower: f64) -> Self {
        Self::build_direct(rho, Some(lower))
    }

    pub fn zero() -> Self {
        Self::synthetic(GaussPolySum::zero())
    }

    fn build_direct(rho: GaussPolySum, lower: Option<f64>) -> Self {
        let limit = DerivativeLimit::default();
        let (mut lo, hi) = if rho.is_zero() {
            (0.0, 0.0)
        } else {
            rho.effective_support(SUPPORT_EPS)
        };
        let mut hard_lower = false;
        if let Some(l) = lower {
            if l >= lo {
                lo = l;
                hard_lower = true;
            }
        }
        let hi = hi.max(lo);
        Self {
            density: Density::Direct {
                derivs: derivative_table(&rho, limit),
                rho,
                lower,
            },
            weight: 1.0,
            lo,
            hi,
            hard_lower,
            limit,
        }
    }

    /// Reduce `|g(k)|² dk` over `ℝ^d` to `ρ(ω) dω` for a radial formfactor
    /// `g(|k|)` and dispersion `ω(|k|)`:
    /// `ρ(ω) = S_{d−1} r^{d−1} |g(r)|² / ω'(r)` with `r = r(ω)`.
    ///
    /// `one_ray` (only for `d = 1`) integrates over `k > 0` alone.
    pub fn radial_reduce(dispersion: Dispersion, formfactor: &GaussPolySum, dim: u32, one_ray: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if one_ray && dim != 1 {
            return Err(Error::InvalidArgument("one_ray applies only to d = 1".into()));
        }
        let g2 = formfactor.mul(&formfactor.conj());
        let area = if one_ray { 1.0 } else { unit_sphere_area(dim) };
        let r_max = if g2.is_zero() {
            1.0
        } else {
            // Include the Jacobian growth in the truncation radius.
            let jac = (0..dim.max(2)).fold(g2.clone(), |acc, _| acc.mul_poly(&[Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]));
            jac.effective_support(SUPPORT_EPS).1.max(0.0)
        };
        dispersion.check_monotone(r_max.max(1.0))?;
        match dispersion {
            Dispersion::Massless => {
                // ρ(ω) = S ω^{d−1} |g(ω)|² on ω > 0: still Gaussian×polynomial.
                let mut mono = vec![Complex64::new(0.0, 0.0); dim as usize];
                mono[dim as usize - 1] = Complex64::new(area, 0.0);
                let rho = g2.mul_poly(&mono);
                let mut p = Self::build_direct(rho, Some(0.0));
                p.lo = 0.0;
                p.hi = p.hi.max(r_max);
                p.hard_lower = true;
                Ok(p)
            }
            Dispersion::Massive { mass } => {
                let limit = DerivativeLimit::default();
                Ok(Self {
                    density: Density::Massive {
                        mass,
                        dim,
                        area,
                        g2_derivs: derivative_table(&g2, limit),
                    },
                    weight: 1.0,
                    lo: mass,
                    hi: dispersion.omega(r_max),
                    hard_lower: true,
                    limit,
                })
            }
        }
    }

    /// Scale the density by `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            weight: self.weight * s,
            ..self.clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.density {
            Density::Direct { rho, .. } => rho.is_zero() || self.weight == 0.0,
            Density::Massive { g2_derivs, .. } => g2_derivs[0].is_zero() || self.weight == 0.0,
        }
    }

    /// Effective support `[lo, hi]`; outside it the density integrates to
    /// less than ~1e-17.
    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// `true` when the lower end of [`support`](Self::support) is a genuine edge.
    pub fn has_hard_lower_edge(&self) -> bool {
        self.hard_lower
    }

    /// Number of analytic derivatives available at interior points.
    pub fn smoothness(&self) -> usize {
        self.limit.0
    }

    fn inside(&self, omega: f64) -> bool {
        match &self.density {
            Density::Direct { lower, .. } => lower.map_or(true, |l| omega > l),
            Density::Massive { mass, .. } => omega > *mass,
        }
    }

    pub fn density(&self, omega: f64) -> f64 {
        if !self.inside(omega) {
            return 0.0;
        }
        let v = match &self.density {
            Density::Direct { rho, .. } => rho.eval(omega).re,
            Density::Massive {
                mass,
                dim,
                area,
                g2_derivs,
            } => {
                let r = (omega * omega - mass * mass).sqrt();
                area * omega * r.powi(*dim as i32 - 2) * g2_derivs[0].eval(r).re
            }
        };
        self.weight * v
    }

    /// `ρ'(ω)`, analytic.
    pub fn density_derivative(&self, omega: f64) -> f64 {
        if !self.inside(omega) {
            return 0.0;
        }
        match &self.density {
            Density::Direct { derivs, .. } => self.weight * derivs[1].eval(omega).re,
            Density::Massive { .. } => self.jet(omega, 1).map(|j| j.derivative(1)).unwrap_or(0.0),
        }
    }

    /// Taylor jet of `ρ` about an interior point.
    pub fn jet(&self, omega: f64, order: usize) -> Result<Jet> {
        self.limit.check(order)?;
        if !self.inside(omega) {
            return Ok(Jet::constant(0.0, order));
        }
        let jet = match &self.density {
            Density::Direct { derivs, .. } => {
                let mut fact = 1.0;
                let coeffs = (0..=order)
                    .map(|k| {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        derivs[k].eval(omega).re / fact
                    })
                    .collect();
                Jet::from_coeffs(coeffs)
            }
            Density::Massive {
                mass,
                dim,
                area,
                g2_derivs,
            } => {
                let w = Jet::variable(omega, order);
                let r = w.mul(&w).add(&Jet::constant(-mass * mass, order)).sqrt();
                let r0 = r.value();
                let mut fact = 1.0;
                let outer: Vec<f64> = (0..=order)
                    .map(|k| {
                        if k > 0 {
                            fact *= k as f64;
                        }
                        g2_derivs[k].eval(r0).re / fact
                    })
                    .collect();
                let g2 = r.compose(&outer);
                w.mul(&r.powi(*dim as i32 - 2)).mul(&g2).scale(*area)
            }
        };
        Ok(jet.scale(self.weight))
    }

    /// `ρ⁽ⁿ⁾(ω)`; capability error above the configured smoothness.
    pub fn derivative(&self, omega: f64, n: usize) -> Result<f64> {
        Ok(self.jet(omega, n)?.derivative(n))
    }

    /// Natural length scale for Plemelj windows.
    pub fn window_scale(&self) -> f64 {
        match &self.density {
            Density::Direct { rho, .. } => rho
                .terms()
                .iter()
                .map(|t| (1.0 / t.width()).sqrt())
                .fold(f64::INFINITY, f64::min)
                .min(1.0),
            Density::Massive { .. } => 0.5,
        }
    }

    /// Break points useful for quadrature over the support (centres of the
    /// Gaussian terms).
    pub fn landmarks(&self) -> Vec<f64> {
        match &self.density {
            Density::Direct { rho, .. } => rho.terms().iter().map(|t| t.center()).collect(),
            Density::Massive { .. } => Vec::new(),
        }
    }
}
