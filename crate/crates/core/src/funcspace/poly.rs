//! Dense complex polynomial helpers (coefficients in increasing powers).

use num_complex::Complex64;

pub(crate) fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub(crate) fn eval_real(p: &[Complex64], x: f64) -> Complex64 {
    p.iter().rev().fold(zero(), |acc, &c| acc * x + c)
}

pub(crate) fn derivative(p: &[Complex64]) -> Vec<Complex64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * k as f64)
        .collect()
}

pub(crate) fn mul(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut out = vec![zero(); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

pub(crate) fn add(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| p.get(k).copied().unwrap_or_else(zero) + q.get(k).copied().unwrap_or_else(zero))
        .collect()
}

pub(crate) fn scale(p: &[Complex64], s: Complex64) -> Vec<Complex64> {
    p.iter().map(|&c| c * s).collect()
}

/// Coefficients of `p(x + h)`.
pub(crate) fn shift(p: &[Complex64], h: f64) -> Vec<Complex64> {
    // Repeated synthetic division (Horner-Taylor shift).
    let mut out = p.to_vec();
    let n = out.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let next = out[j + 1];
            out[j] += next * h;
        }
    }
    out
}

/// Coefficients of `p(k x)`.
pub(crate) fn dilate(p: &[Complex64], k: f64) -> Vec<Complex64> {
    let mut pow = 1.0;
    p.iter()
        .map(|&c| {
            let v = c * pow;
            pow *= k;
            v
        })
        .collect()
}

pub(crate) fn trim(mut p: Vec<Complex64>) -> Vec<Complex64> {
    while matches!(p.last(), Some(c) if *c == zero()) {
        p.pop();
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn shift_matches_direct_evaluation() {
        let p = vec![c(1.0), c(-2.0), c(0.5), c(3.0)];
        let h = 0.7;
        let q = shift(&p, h);
        for &x in &[-1.3, 0.0, 0.4, 2.2] {
            let lhs = eval_real(&q, x);
            let rhs = eval_real(&p, x + h);
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_and_product() {
        let p = vec![c(1.0), c(1.0)];
        let q = mul(&p, &p);
        assert_eq!(q, vec![c(1.0), c(2.0), c(1.0)]);
        assert_eq!(derivative(&q), vec![c(2.0), c(2.0)]);
    }
}
