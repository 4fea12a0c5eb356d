//! Vacuum amplitude of a field with two discrete modes, linearly coupled to
//! a scalar system operator, by exponentiation on a truncated Fock space.
//!
//! In the frame rotating with `ω₀` the Hamiltonian is
//! `H = Σⱼ νⱼ aⱼ⁺aⱼ + λ (i D Σⱼ gⱼ aⱼ⁺ − i D̄ Σⱼ ḡⱼ aⱼ)` with detunings
//! `νⱼ = ωⱼ − ω₀`, and the interaction-picture vacuum amplitude is
//! `⟨0|e^{−iHT}|0⟩` because the free part annihilates the vacuum.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitude shift tolerated when the cutoff is raised by two.
pub const CUTOFF_TOLERANCE: f64 = 1e-8;

/// Two-mode coupling data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeField {
    pub couplings: [Complex64; 2],
    pub detunings: [f64; 2],
}

impl TwoModeField {
    /// Rows of `H` as sparse `(column, value)` lists.
    fn hamiltonian(&self, d: Complex64, lambda: f64, cutoff: usize) -> Vec<Vec<(usize, Complex64)>> {
        let n = cutoff + 1;
        let idx = |a: usize, b: usize| a * n + b;
        let mut h = vec![Vec::new(); n * n];
        let i = Complex64::new(0.0, 1.0);
        for a in 0..n {
            for b in 0..n {
                let k = idx(a, b);
                h[k].push((k, Complex64::new(self.detunings[0] * a as f64 + self.detunings[1] * b as f64, 0.0)));
                // creation parts, the annihilation parts follow by hermiticity
                if a + 1 < n {
                    let amp = lambda * i * d * self.couplings[0] * ((a + 1) as f64).sqrt();
                    h[idx(a + 1, b)].push((k, amp));
                    h[k].push((idx(a + 1, b), amp.conj()));
                }
                if b + 1 < n {
                    let amp = lambda * i * d * self.couplings[1] * ((b + 1) as f64).sqrt();
                    h[idx(a, b + 1)].push((k, amp));
                    h[k].push((idx(a, b + 1), amp.conj()));
                }
            }
        }
        h
    }

    fn amplitude_at(&self, d: Complex64, lambda: f64, t: f64, cutoff: usize) -> Complex64 {
        let big_t = t / (lambda * lambda);
        let h = self.hamiltonian(d, lambda, cutoff);
        let norm = h.iter().map(|row| row.iter().map(|(_, z)| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        // e^{−iHT}|0⟩ in steps with ‖H‖ dt ≤ 1/2, each a Taylor series summed to rounding level
        let steps = ((norm * big_t) / 0.5).ceil().max(1.0) as usize;
        let scale = Complex64::new(0.0, -big_t / steps as f64);
        let mut v = vec![Complex64::new(0.0, 0.0); h.len()];
        v[0] = Complex64::new(1.0, 0.0);
        for _ in 0..steps {
            let mut term = v.clone();
            for k in 1..60 {
                let c = scale / k as f64;
                term = h.iter().map(|row| row.iter().map(|&(j, z)| z * term[j]).sum::<Complex64>() * c).collect();
                let tn = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
                for (x, y) in v.iter_mut().zip(&term) {
                    *x += y;
                }
                if tn < 1e-18 {
                    break;
                }
            }
        }
        v[0]
    }

    /// `⟨U_λ(t/λ²)⟩`; the cutoff is accepted only if raising it by two moves
    /// the amplitude by less than [`CUTOFF_TOLERANCE`].
    pub fn vacuum_amplitude(&self, d: Complex64, lambda: f64, t: f64, cutoff: usize) -> Result<Complex64> {
        if cutoff < 4 {
            return Err(Error::InvalidArgument(format!("fock cutoff must be at least 4, got {cutoff}")));
        }
        if !(lambda > 0.0) || t < 0.0 {
            return Err(Error::InvalidArgument("need λ > 0 and t ≥ 0".into()));
        }
        let v = self.amplitude_at(d, lambda, t, cutoff);
        let w = self.amplitude_at(d, lambda, t, cutoff + 2);
        let shift = (v - w).norm();
        if shift > CUTOFF_TOLERANCE {
            return Err(Error::Truncation { level: cutoff, max: cutoff + 2 });
        }
        Ok(v)
    }
}

/// Convenience form of [`TwoModeField::vacuum_amplitude`].
pub fn two_mode_propagator(couplings: [Complex64; 2], detunings: [f64; 2], d: Complex64, lambda: f64, t: f64, cutoff: usize) -> Result<Complex64> {
    TwoModeField { couplings, detunings }.vacuum_amplitude(d, lambda, t, cutoff)
}

/// `exp(A)` by scaling to norm ≤ 1/2, a Taylor series summed to rounding
/// level, and repeated squaring.
pub fn expm_taylor(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let mut s = 0;
    while norm1 / 2f64.powi(s) > 0.5 {
        s += 1;
    }
    let scaled = a * Complex64::new(2f64.powi(-s), 0.0);
    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = sum.clone();
    for k in 1..60 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        sum += &term;
        let tn = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn decoupled_field_is_trivial() {
        let v = two_mode_propagator([c(0.0, 0.0); 2], [1.0, 2.0], c(1.0, 0.0), 1.0, 1.0, 4).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn single_mode_displaced_oscillator() {
        // exp(−|λ g D|² (−iT/ν + (1 − e^{−iνT})/ν²))
        let (g, nu, d, lambda, t) = (c(0.3, 0.1), 0.7, c(0.8, -0.2), 1.0, 1.0);
        let v = two_mode_propagator([g, c(0.0, 0.0)], [nu, 0.0], d, lambda, t, 6).unwrap();
        let big_t = t / (lambda * lambda);
        let k = c(0.0, -big_t / nu) + (c(1.0, 0.0) - c(0.0, -nu * big_t).exp()) / (nu * nu);
        let expect = (-(lambda * g * d).norm_sqr() * k).exp();
        assert!((v - expect).norm() < 1e-8, "{v} vs {expect}");
    }

    #[test]
    fn cutoff_check() {
        let v4 = TwoModeField {
            couplings: [c(0.2, 0.0), c(0.1, 0.1)],
            detunings: [0.5, -0.4],
        };
        assert!(v4.vacuum_amplitude(c(1.0, 0.0), 1.0, 1.0, 4).is_ok());
        let strong = TwoModeField {
            couplings: [c(3.0, 0.0), c(3.0, 0.0)],
            detunings: [0.5, -0.4],
        };
        assert!(matches!(strong.vacuum_amplitude(c(1.0, 0.0), 1.0, 1.0, 4), Err(Error::Truncation { .. })));
    }

    #[test]
    fn taylor_exponential_of_rotation() {
        let mut a = DMatrix::<Complex64>::zeros(2, 2);
        a[(0, 1)] = c(-3.0, 0.0);
        a[(1, 0)] = c(3.0, 0.0);
        let e = expm_taylor(&a);
        assert!((e[(0, 0)] - c(3f64.cos(), 0.0)).norm() < 1e-14);
        assert!((e[(1, 0)] - c(3f64.sin(), 0.0)).norm() < 1e-14);
    }
}
