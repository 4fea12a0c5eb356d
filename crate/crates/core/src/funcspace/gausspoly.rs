//! Gaussian×polynomial test functions.
//!
//! A [`GaussPoly`] is `q(x - c) · exp(-a (x - c)²) · exp(i s x)` with `a > 0`.
//! The family is closed under differentiation, multiplication, dilation,
//! reflection and the Fourier transform `f̃(τ) = ∫ e^{ixτ} f(x) dx`, so every
//! derivative and transform used by the expansion checks is exact.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::poly;
use crate::error::{Error, Result};

/// Highest derivative order served by [`GaussPolySum::derivative_at`] unless
/// a different [`DerivativeLimit`] is supplied.
pub const DEFAULT_MAX_ORDER: usize = 8;

/// Configured ceiling on derivative orders.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivativeLimit(pub usize);

impl Default for DerivativeLimit {
    fn default() -> Self {
        DerivativeLimit(DEFAULT_MAX_ORDER)
    }
}

impl DerivativeLimit {
    pub fn check(self, n: usize) -> Result<()> {
        if n > self.0 {
            Err(Error::Capability(format!(
                "derivative order {n} exceeds configured maximum {}",
                self.0
            )))
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussPoly {
    /// Coefficients of `q` in powers of `(x - center)`.
    coeffs: Vec<Complex64>,
    width: f64,
    center: f64,
    /// Modulation frequency `s` of the factor `e^{isx}`.
    freq: f64,
}

impl GaussPoly {
    pub fn new(coeffs: Vec<Complex64>, width: f64, center: f64) -> Result<Self> {
        Self::modulated(coeffs, width, center, 0.0)
    }

    pub fn modulated(coeffs: Vec<Complex64>, width: f64, center: f64, freq: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "Gaussian width must be positive and finite, got {width}"
            )));
        }
        if !center.is_finite() || !freq.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite GaussPoly parameter".into()));
        }
        Ok(Self {
            coeffs: poly::trim(coeffs),
            width,
            center,
            freq,
        })
    }

    /// `exp(-a (x - c)²)`
    pub fn gaussian(width: f64, center: f64) -> Result<Self> {
        Self::new(vec![Complex64::new(1.0, 0.0)], width, center)
    }

    /// A bare polynomial in `x` (flat envelope). Only meaningful where the
    /// function is evaluated on bounded intervals, e.g. as a piece of a
    /// [`PiecewiseC1`](super::PiecewiseC1); tails and Fourier transforms of
    /// such a term are not Schwartz-class.
    pub fn polynomial(coeffs: &[f64]) -> Self {
        Self {
            coeffs: poly::trim(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect()),
            width: f64::MIN_POSITIVE,
            center: 0.0,
            freq: 0.0,
        }
    }

    /// True for the envelope-free terms built by [`GaussPoly::polynomial`].
    pub fn is_flat(&self) -> bool {
        self.width <= f64::MIN_POSITIVE
    }

    /// Real polynomial (in powers of `x - c`) times a Gaussian.
    pub fn from_real(coeffs: &[f64], width: f64, center: f64) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), width, center)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn center(&self) -> f64 {
        self.center
    }
    pub fn freq(&self) -> f64 {
        self.freq
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn with_coeffs(&self, coeffs: Vec<Complex64>) -> Self {
        Self {
            coeffs: poly::trim(coeffs),
            ..self.clone()
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        if self.is_zero() {
            return poly::zero();
        }
        let u = x - self.center;
        let envelope = Complex64::new(-self.width * u * u, self.freq * x).exp();
        poly::eval_real(&self.coeffs, u) * envelope
    }

    /// `d/dx`: `q ← q' + (i s - 2 a u) q`.
    pub fn derivative(&self) -> Self {
        let dq = poly::derivative(&self.coeffs);
        let a = if self.is_flat() { 0.0 } else { self.width };
        let lin = [Complex64::new(0.0, self.freq), Complex64::new(-2.0 * a, 0.0)];
        let prod = poly::mul(&lin, &self.coeffs);
        self.with_coeffs(poly::add(&dq, &prod))
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |g, _| g.derivative())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_coeffs(poly::scale(&self.coeffs, s))
    }

    pub fn conj(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
            freq: -self.freq,
            ..self.clone()
        }
    }

    /// `x ↦ f(-x)`
    pub fn reflect(&self) -> Self {
        let q = poly::dilate(&self.coeffs, -1.0);
        Self {
            coeffs: q,
            center: -self.center,
            freq: -self.freq,
            width: self.width,
        }
    }

    /// `x ↦ f(k x)` for `k > 0`.
    pub fn dilate(&self, k: f64) -> Self {
        assert!(k > 0.0, "dilation factor must be positive");
        Self {
            coeffs: poly::dilate(&self.coeffs, k),
            width: self.width * k * k,
            center: self.center / k,
            freq: self.freq * k,
        }
    }

    /// Multiply by a polynomial given in powers of `x`.
    pub fn mul_poly(&self, p: &[Complex64]) -> Self {
        let shifted = poly::shift(p, self.center);
        self.with_coeffs(poly::mul(&shifted, &self.coeffs))
    }

    /// Pointwise product (widths add, centres combine).
    pub fn mul(&self, other: &GaussPoly) -> Self {
        let a = self.width + other.width;
        let c = (self.width * self.center + other.width * other.center) / a;
        let d = self.center - other.center;
        let k = (-self.width * other.width / a * d * d).exp();
        let p1 = poly::shift(&self.coeffs, c - self.center);
        let p2 = poly::shift(&other.coeffs, c - other.center);
        let q = poly::scale(&poly::mul(&p1, &p2), Complex64::new(k, 0.0));
        Self {
            coeffs: poly::trim(q),
            width: a,
            center: c,
            freq: self.freq + other.freq,
        }
    }

    /// Closed-form Fourier transform `f̃(τ) = ∫ e^{ixτ} f(x) dx`.
    pub fn fourier(&self) -> Self {
        let a = self.width;
        // R_m(ω) with (-i ∂_ω)^m e^{-ω²/4a} = R_m(ω) e^{-ω²/4a}
        let mut r = vec![Complex64::new(1.0, 0.0)];
        let mut acc: Vec<Complex64> = Vec::new();
        let lin = [poly::zero(), Complex64::new(-1.0 / (2.0 * a), 0.0)];
        for &q in &self.coeffs {
            acc = poly::add(&acc, &poly::scale(&r, q));
            let next = poly::add(&poly::derivative(&r), &poly::mul(&lin, &r));
            r = poly::scale(&next, Complex64::new(0.0, -1.0));
        }
        let pref = Complex64::new(0.0, self.center * self.freq).exp() * (PI / a).sqrt();
        Self {
            coeffs: poly::trim(poly::scale(&acc, pref)),
            width: 1.0 / (4.0 * a),
            center: -self.freq,
            freq: self.center,
        }
    }

    /// `(1/2π) ∫ e^{-ixτ} g(τ) dτ`
    pub fn inverse_fourier(&self) -> Self {
        self.fourier().reflect().scale(Complex64::new(1.0 / (2.0 * PI), 0.0))
    }

    /// `∫_ℝ f(x) dx`, exact.
    pub fn integral(&self) -> Complex64 {
        if self.is_zero() {
            return poly::zero();
        }
        self.fourier().eval(0.0)
    }

    /// Upper bound on `sup |f|`.
    pub fn sup_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let peak = if k == 0 {
                    1.0
                } else {
                    (k as f64 / (2.0 * self.width * std::f64::consts::E)).powf(k as f64 / 2.0)
                };
                c.norm() * peak
            })
            .sum()
    }

    /// Upper bound on `sup |f|` over `[lo, hi]`.
    pub fn sup_bound_on(&self, lo: f64, hi: f64) -> f64 {
        let reach = (lo - self.center).abs().max((hi - self.center).abs());
        let global = if self.width > 1e-100 { self.sup_bound() } else { f64::INFINITY };
        let local: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * reach.powi(k as i32))
            .sum();
        local.min(global)
    }

    /// Upper bound on `∫_{|x - c| > r} |f(x)| dx`.
    pub fn tail_bound(&self, r: f64) -> f64 {
        let a = self.width;
        let mut total = 0.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let km1 = k as f64 - 1.0;
            let gauss = (-a * r * r).exp();
            let one_side = if k <= 1 {
                r.powf(km1) * gauss / (2.0 * a)
            } else {
                let denom = 2.0 * a - km1 / (r * r);
                if denom <= 0.0 {
                    f64::INFINITY
                } else {
                    r.powf(km1) * gauss / denom
                }
            };
            total += 2.0 * c.norm() * one_side;
        }
        total
    }

    /// Radius `r` about the centre beyond which the absolute tail integral is
    /// below `eps`.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut r = (1.0 / self.width).sqrt();
        while self.tail_bound(r) > eps {
            r *= 1.25;
            if r > 1e12 {
                break;
            }
        }
        r
    }
}

/// Finite sum of [`GaussPoly`] terms; the empty sum is the zero function.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GaussPolySum {
    terms: Vec<GaussPoly>,
}

impl From<GaussPoly> for GaussPolySum {
    fn from(g: GaussPoly) -> Self {
        Self { terms: vec![g] }
    }
}

impl GaussPolySum {
    pub fn new(terms: Vec<GaussPoly>) -> Self {
        Self {
            terms: terms.into_iter().filter(|t| !t.is_zero()).collect(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &[GaussPoly] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn map(&self, f: impl Fn(&GaussPoly) -> GaussPoly) -> Self {
        Self::new(self.terms.iter().map(f).collect())
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    pub fn derivative(&self) -> Self {
        self.map(GaussPoly::derivative)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        self.map(|t| t.nth_derivative(n))
    }

    /// Exact `f⁽ⁿ⁾(x0)` from the polynomial recurrence; no finite differences.
    pub fn derivative_at(&self, n: usize, x0: f64) -> Result<Complex64> {
        self.derivative_at_limited(n, x0, DerivativeLimit::default())
    }

    pub fn derivative_at_limited(&self, n: usize, x0: f64, limit: DerivativeLimit) -> Result<Complex64> {
        limit.check(n)?;
        Ok(self.nth_derivative(n).eval(x0))
    }

    /// Taylor coefficients `f⁽ᵏ⁾(x0)/k!` for `k = 0..=order`.
    pub fn taylor(&self, x0: f64, order: usize) -> Vec<Complex64> {
        let mut g = self.clone();
        let mut fact = 1.0;
        let mut out = Vec::with_capacity(order + 1);
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
                g = g.derivative();
            }
            out.push(g.eval(x0) / fact);
        }
        out
    }

    pub fn fourier(&self) -> Self {
        self.map(GaussPoly::fourier)
    }

    pub fn inverse_fourier(&self) -> Self {
        self.map(GaussPoly::inverse_fourier)
    }

    pub fn conj(&self) -> Self {
        self.map(GaussPoly::conj)
    }

    pub fn reflect(&self) -> Self {
        self.map(GaussPoly::reflect)
    }

    pub fn dilate(&self, k: f64) -> Self {
        self.map(|t| t.dilate(k))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        if s == poly::zero() {
            return Self::zero();
        }
        self.map(|t| t.scale(s))
    }

    pub fn mul_poly(&self, p: &[Complex64]) -> Self {
        self.map(|t| t.mul_poly(p))
    }

    /// Multiply by the monomial `x^m`.
    pub fn mul_monomial(&self, m: usize) -> Self {
        let mut p = vec![poly::zero(); m + 1];
        p[m] = Complex64::new(1.0, 0.0);
        self.mul_poly(&p)
    }

    pub fn add(&self, other: &GaussPolySum) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::new(terms)
    }

    pub fn mul(&self, other: &GaussPolySum) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.mul(b));
            }
        }
        Self::new(terms)
    }

    pub fn integral(&self) -> Complex64 {
        self.terms.iter().map(GaussPoly::integral).sum()
    }

    pub fn sup_bound(&self) -> f64 {
        self.terms.iter().map(GaussPoly::sup_bound).sum()
    }

    pub fn sup_bound_on(&self, lo: f64, hi: f64) -> f64 {
        self.terms.iter().map(|t| t.sup_bound_on(lo, hi)).sum()
    }

    /// Interval outside of which `∫ |f|` is below `eps`.
    pub fn effective_support(&self, eps: f64) -> (f64, f64) {
        if self.terms.is_empty() {
            return (0.0, 0.0);
        }
        let share = eps / self.terms.len() as f64;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for t in &self.terms {
            let r = t.tail_radius(share);
            lo = lo.min(t.center - r);
            hi = hi.max(t.center + r);
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn gauss() -> GaussPolySum {
        GaussPoly::gaussian(1.0, 0.0).unwrap().into()
    }

    #[test]
    fn derivatives_of_unit_gaussian() {
        let f = gauss();
        assert_abs_diff_eq!(f.derivative_at(0, 0.0).unwrap().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.derivative_at(1, 0.0).unwrap().norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f.derivative_at(2, 0.0).unwrap().re, -2.0, epsilon = 1e-15);
        // cross-check f'' by central difference, h = 1e-4
        let h = 1e-4;
        let fd = (f.eval(h) - 2.0 * f.eval(0.0) + f.eval(-h)).re / (h * h);
        assert!((fd + 2.0).abs() < 1e-6);
    }

    #[test]
    fn derivative_order_is_capped() {
        let err = gauss().derivative_at(9, 0.0).unwrap_err();
        assert!(matches!(err, Error::Capability(_)));
        assert!(gauss().derivative_at_limited(9, 0.0, DerivativeLimit(12)).is_ok());
    }

    #[test]
    fn fourier_of_gaussians() {
        let ft = gauss().fourier();
        for &tau in &[0.0, 1.0, 2.0] {
            let expect = PI.sqrt() * (-tau * tau / 4.0f64).exp();
            assert!((ft.eval(tau) - expect).norm() < 1e-14);
        }
        let c = 0.7;
        let shifted: GaussPolySum = GaussPoly::gaussian(1.0, c).unwrap().into();
        let ft = shifted.fourier();
        for &tau in &[0.0, 1.0, 2.0] {
            let expect = Complex64::new(0.0, c * tau).exp() * PI.sqrt() * (-tau * tau / 4.0f64).exp();
            assert!((ft.eval(tau) - expect).norm() < 1e-14);
        }
        assert!(GaussPolySum::zero().fourier().is_zero());
    }

    #[test]
    fn product_and_integral() {
        let a = GaussPoly::from_real(&[1.0, 2.0], 0.5, 0.3).unwrap();
        let b = GaussPoly::modulated(vec![Complex64::new(0.0, 1.0)], 1.5, -0.4, 0.8).unwrap();
        let p = a.mul(&b);
        for &x in &[-1.0, 0.0, 0.37, 2.0] {
            assert!((p.eval(x) - a.eval(x) * b.eval(x)).norm() < 1e-14);
        }
        // ∫ e^{-x²} x² dx = √π/2
        let f = GaussPolySum::from(GaussPoly::gaussian(1.0, 0.0).unwrap()).mul_monomial(2);
        assert_abs_diff_eq!(f.integral().re, PI.sqrt() / 2.0, epsilon = 1e-14);
    }

    #[test]
    fn tail_bound_dominates_tail() {
        let g = GaussPoly::from_real(&[0.5, -1.0, 2.0, 0.3], 0.7, 1.0).unwrap();
        let r = g.tail_radius(1e-12);
        assert!(g.tail_bound(r) <= 1e-12);
        assert!(g.eval(g.center() + r).norm() < 1e-10);
    }

    #[test]
    fn taylor_matches_derivatives() {
        let f = GaussPolySum::from(GaussPoly::from_real(&[1.0, 0.4], 1.3, 0.2).unwrap());
        let t = f.taylor(0.5, 4);
        assert!((t[3] * 6.0 - f.derivative_at(3, 0.5).unwrap()).norm() < 1e-13);
    }
}
