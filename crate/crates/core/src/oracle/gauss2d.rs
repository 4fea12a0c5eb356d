//! Closed-form integrals `∫∫ P(z) exp(−zᵀSz + bᵀz + c) d²z` over ℝ².
//!
//! Valid whenever `Re S` is positive definite. The value is
//! `π/√det S · exp(c + ¼ bᵀS⁻¹b) · E[P]` where the "expectation" is taken
//! under the complex Gaussian with mean `½S⁻¹b` and covariance `½S⁻¹`;
//! moments follow from Stein's identity
//! `E[zₖ P] = μₖ E[P] + Σⱼ Σₖⱼ E[∂ⱼ P]`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::GaussPoly;

type C = Complex64;

fn zero() -> C {
    C::new(0.0, 0.0)
}

/// Bivariate polynomial, `coeffs[i][j]` multiplies `z₁ⁱ z₂ʲ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BiPoly {
    coeffs: Vec<Vec<C>>,
}

impl BiPoly {
    pub fn constant(c: C) -> Self {
        Self { coeffs: vec![vec![c]] }
    }

    /// `α₁z₁ + α₂z₂ + β`
    pub fn linear(alpha: [f64; 2], beta: f64) -> Self {
        Self {
            coeffs: vec![
                vec![C::new(beta, 0.0), C::new(alpha[1], 0.0)],
                vec![C::new(alpha[0], 0.0), zero()],
            ],
        }
    }

    fn degree(&self) -> (usize, usize) {
        let di = self.coeffs.len();
        let dj = self.coeffs.iter().map(Vec::len).max().unwrap_or(0);
        (di, dj)
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        let (a1, a2) = self.degree();
        let (b1, b2) = other.degree();
        let mut out = vec![vec![zero(); a2 + b2]; a1 + b1];
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if x == zero() {
                    continue;
                }
                for (k, orow) in other.coeffs.iter().enumerate() {
                    for (l, &y) in orow.iter().enumerate() {
                        out[i + k][j + l] += x * y;
                    }
                }
            }
        }
        BiPoly { coeffs: out }
    }

    pub fn add_scaled(&mut self, other: &BiPoly, s: C) {
        let (b1, b2) = other.degree();
        if self.coeffs.len() < b1 {
            self.coeffs.resize(b1, Vec::new());
        }
        for row in self.coeffs.iter_mut() {
            if row.len() < b2 {
                row.resize(b2, zero());
            }
        }
        for (i, orow) in other.coeffs.iter().enumerate() {
            for (j, &y) in orow.iter().enumerate() {
                self.coeffs[i][j] += s * y;
            }
        }
    }

    /// `q(u)` with `u = α·z + β`.
    pub fn compose(q: &[C], alpha: [f64; 2], beta: f64) -> BiPoly {
        let u = BiPoly::linear(alpha, beta);
        let mut acc = BiPoly::constant(zero());
        let mut pow = BiPoly::constant(C::new(1.0, 0.0));
        for &c in q {
            acc.add_scaled(&pow, c);
            pow = pow.mul(&u);
        }
        acc
    }
}

/// Exponent `−zᵀSz + bᵀz + c` times a polynomial.
#[derive(Debug, Clone)]
pub struct Gauss2 {
    s: [[C; 2]; 2],
    b: [C; 2],
    c: C,
    poly: BiPoly,
}

impl Default for Gauss2 {
    fn default() -> Self {
        Self::new()
    }
}

impl Gauss2 {
    pub fn new() -> Self {
        Self {
            s: [[zero(); 2]; 2],
            b: [zero(); 2],
            c: zero(),
            poly: BiPoly::constant(C::new(1.0, 0.0)),
        }
    }

    /// Multiply by `exp(κ z₁ z₂)`.
    pub fn bilinear(mut self, kappa: C) -> Self {
        self.s[0][1] -= 0.5 * kappa;
        self.s[1][0] -= 0.5 * kappa;
        self
    }

    /// Multiply by `exp(β₁z₁ + β₂z₂)`.
    pub fn linear(mut self, beta: [C; 2]) -> Self {
        self.b[0] += beta[0];
        self.b[1] += beta[1];
        self
    }

    /// Multiply by `g(α·z + β)`.
    pub fn factor(mut self, g: &GaussPoly, alpha: [f64; 2], beta: f64) -> Result<Self> {
        if g.is_flat() {
            return Err(Error::InvalidArgument("closed-form oracle needs a Gaussian envelope on every term".into()));
        }
        let a = g.width();
        let d = beta - g.center();
        let s = g.freq();
        // −a(α·z + d)² + i s (α·z + β)
        for i in 0..2 {
            for j in 0..2 {
                self.s[i][j] += C::new(a * alpha[i] * alpha[j], 0.0);
            }
            self.b[i] += C::new(-2.0 * a * d * alpha[i], s * alpha[i]);
        }
        self.c += C::new(-a * d * d, s * beta);
        self.poly = self.poly.mul(&BiPoly::compose(g.coeffs(), alpha, d));
        Ok(self)
    }

    pub fn scale(mut self, k: C) -> Self {
        let p = BiPoly::constant(k);
        self.poly = self.poly.mul(&p);
        self
    }

    /// The integral over ℝ².
    pub fn integrate(&self) -> Result<C> {
        let [[s11, s12], [s21, s22]] = self.s;
        let (r11, r22) = (s11.re, s22.re);
        let rdet = r11 * r22 - 0.25 * (s12.re + s21.re).powi(2);
        if !(r11 > 0.0 && rdet > 0.0) {
            return Err(Error::InvalidArgument("real part of the quadratic form is not positive definite".into()));
        }
        let det = s11 * s22 - s12 * s21;
        let inv = [[s22 / det, -s12 / det], [-s21 / det, s11 / det]];
        let root = continued_sqrt_det(&self.s);
        let b = self.b;
        let quad = b[0] * (inv[0][0] * b[0] + inv[0][1] * b[1]) + b[1] * (inv[1][0] * b[0] + inv[1][1] * b[1]);
        let norm = C::new(std::f64::consts::PI, 0.0) / root * (self.c + 0.25 * quad).exp();
        let mu = [0.5 * (inv[0][0] * b[0] + inv[0][1] * b[1]), 0.5 * (inv[1][0] * b[0] + inv[1][1] * b[1])];
        let sigma = [[0.5 * inv[0][0], 0.5 * inv[0][1]], [0.5 * inv[1][0], 0.5 * inv[1][1]]];
        let (d1, d2) = self.poly.degree();
        let m = moments(mu, sigma, d1, d2);
        let mut e = zero();
        for (i, row) in self.poly.coeffs.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                e += c * m[i][j];
            }
        }
        Ok(norm * e)
    }
}

/// `√det S` continued from `√det Re S > 0` along `Re S + θ·i Im S`.
fn continued_sqrt_det(s: &[[C; 2]; 2]) -> C {
    let det_at = |th: f64| {
        let m = |z: C| C::new(z.re, th * z.im);
        m(s[0][0]) * m(s[1][1]) - m(s[0][1]) * m(s[1][0])
    };
    let mut root = det_at(0.0).sqrt();
    let steps = 256;
    for k in 1..=steps {
        let cand = det_at(k as f64 / steps as f64).sqrt();
        root = if (cand - root).norm() <= (cand + root).norm() { cand } else { -cand };
    }
    root
}

/// `E[z₁ⁱ z₂ʲ]` for `i < d1`, `j < d2`.
fn moments(mu: [C; 2], sigma: [[C; 2]; 2], d1: usize, d2: usize) -> Vec<Vec<C>> {
    let mut m = vec![vec![zero(); d2.max(1)]; d1.max(1)];
    m[0][0] = C::new(1.0, 0.0);
    for j in 1..d2 {
        let prev2 = if j >= 2 { m[0][j - 2] } else { zero() };
        m[0][j] = mu[1] * m[0][j - 1] + sigma[1][1] * (j - 1) as f64 * prev2;
    }
    for i in 1..d1 {
        for j in 0..d2.max(1) {
            let a = m[i - 1][j];
            let b = if i >= 2 { m[i - 2][j] } else { zero() };
            let c = if j >= 1 { m[i - 1][j - 1] } else { zero() };
            m[i][j] = mu[0] * a + sigma[0][0] * (i - 1) as f64 * b + sigma[0][1] * j as f64 * c;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn product_gaussian() {
        let g = GaussPoly::gaussian(1.0, 0.0).unwrap();
        let v = Gauss2::new().factor(&g, [1.0, 0.0], 0.0).unwrap().factor(&g, [0.0, 1.0], 0.0).unwrap().integrate().unwrap();
        assert_abs_diff_eq!(v.re, PI, epsilon = 1e-14);
    }

    #[test]
    fn second_moments() {
        // ∫∫ x² y e^{-x²-(y-1)²} = (√π/2)·√π
        let g0 = GaussPoly::new(vec![C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)], 1.0, 0.0).unwrap();
        let g1 = GaussPoly::new(vec![C::new(1.0, 0.0), C::new(1.0, 0.0)], 1.0, 1.0).unwrap();
        let v = Gauss2::new().factor(&g0, [1.0, 0.0], 0.0).unwrap().factor(&g1, [0.0, 1.0], 0.0).unwrap().integrate().unwrap();
        assert_abs_diff_eq!(v.re, 0.5 * PI, epsilon = 1e-13);
    }

    #[test]
    fn oscillatory_kernel() {
        // λ⁻² ∫∫ e^{ixt/λ²} e^{-x²} e^{-t²} = 2π/√(1+4λ⁴)
        let g = GaussPoly::gaussian(1.0, 0.0).unwrap();
        for l in [0.2f64, 0.5, 1.0] {
            let v = Gauss2::new()
                .factor(&g, [1.0, 0.0], 0.0)
                .unwrap()
                .factor(&g, [0.0, 1.0], 0.0)
                .unwrap()
                .bilinear(C::new(0.0, 1.0 / (l * l)))
                .scale(C::new(1.0 / (l * l), 0.0))
                .integrate()
                .unwrap();
            assert_abs_diff_eq!(v.re, 2.0 * PI / (1.0 + 4.0 * l.powi(4)).sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }
}
