//! Truncated Taylor arithmetic: `coeffs[k] = f⁽ᵏ⁾(x0) / k!`.
//!
//! Used to differentiate spectral densities that are compositions of
//! closed-form pieces (e.g. `|g(r(ω))|²` with `r = √(ω² − m²)`).

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The identity function expanded about `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `n`-th derivative at the expansion point.
    pub fn derivative(&self, n: usize) -> f64 {
        let fact: f64 = (1..=n).map(|k| k as f64).product();
        self.coeffs[n] * fact
    }

    pub fn add(&self, other: &Jet) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let n = self.coeffs.len().min(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * other.coeffs[k - j]).sum())
            .collect();
        Jet { coeffs }
    }

    pub fn recip(&self) -> Jet {
        let a = &self.coeffs;
        let mut b = vec![0.0; a.len()];
        b[0] = 1.0 / a[0];
        for k in 1..a.len() {
            let s: f64 = (1..=k).map(|j| a[j] * b[k - j]).sum();
            b[k] = -s / a[0];
        }
        Jet { coeffs: b }
    }

    pub fn sqrt(&self) -> Jet {
        let a = &self.coeffs;
        let mut s = vec![0.0; a.len()];
        s[0] = a[0].sqrt();
        for k in 1..a.len() {
            let cross: f64 = (1..k).map(|j| s[j] * s[k - j]).sum();
            s[k] = (a[k] - cross) / (2.0 * s[0]);
        }
        Jet { coeffs: s }
    }

    pub fn powi(&self, n: i32) -> Jet {
        let base = if n < 0 { self.recip() } else { self.clone() };
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `outer ∘ self`, where `outer` holds Taylor coefficients about
    /// `self.value()`.
    pub fn compose(&self, outer: &[f64]) -> Jet {
        let mut delta = self.clone();
        delta.coeffs[0] = 0.0;
        let order = self.order();
        let mut acc = Jet::constant(0.0, order);
        for &c in outer.iter().take(order + 1).rev() {
            acc = acc.mul(&delta);
            acc.coeffs[0] += c;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sqrt_of_shifted_square() {
        // r(ω) = √(ω² − 1) at ω = 2: r' = ω/r, r'' = −1/r³
        let w = Jet::variable(2.0, 3);
        let r = w.mul(&w).add(&Jet::constant(-1.0, 3)).sqrt();
        let r0 = 3.0f64.sqrt();
        assert_abs_diff_eq!(r.value(), r0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.derivative(1), 2.0 / r0, epsilon = 1e-14);
        assert_abs_diff_eq!(r.derivative(2), -1.0 / r0.powi(3), epsilon = 1e-14);
    }

    #[test]
    fn compose_exp_with_square() {
        // exp(x²) about x = 0.5: first derivative 2x e^{x²}
        let x = Jet::variable(0.5, 2);
        let sq = x.mul(&x);
        let e = 0.25f64.exp();
        let out = sq.compose(&[e, e, e / 2.0]);
        assert_abs_diff_eq!(out.derivative(1), 1.0 * e, epsilon = 1e-14);
        assert_abs_diff_eq!(out.derivative(2), (2.0 + 4.0 * 0.25) * e, epsilon = 1e-13);
    }

    #[test]
    fn recip_and_powi() {
        let x = Jet::variable(2.0, 2);
        let inv = x.powi(-1);
        assert_abs_diff_eq!(inv.derivative(1), -0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.derivative(2), 2.0 / 8.0, epsilon = 1e-15);
    }
}
