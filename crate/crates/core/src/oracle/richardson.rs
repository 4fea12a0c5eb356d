//! Least-squares extraction of power-series coefficients in λ.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fits with a larger (column-equilibrated) condition number are refused.
pub const MAX_CONDITION: f64 = 1e8;

/// Result of fitting `v(λ) ≈ Σ_p c_p λ^p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichardsonFit {
    pub lambdas: Vec<f64>,
    pub values: Vec<Complex64>,
    pub powers: Vec<i32>,
    pub coefficients: Vec<Complex64>,
    /// Euclidean norm of the fit residual.
    pub residual: f64,
    pub condition: f64,
}

impl RichardsonFit {
    /// Coefficient of `λ^p`, if that power was fitted.
    pub fn coefficient(&self, p: i32) -> Option<Complex64> {
        self.powers.iter().position(|&q| q == p).map(|i| self.coefficients[i])
    }
}

/// Least-squares fit over the requested powers.
pub fn richardson_extract(lambdas: &[f64], values: &[Complex64], powers: &[i32]) -> Result<RichardsonFit> {
    if lambdas.len() != values.len() {
        return Err(Error::Shape(format!("{} lambdas for {} values", lambdas.len(), values.len())));
    }
    if powers.is_empty() {
        return Err(Error::InvalidArgument("no powers requested".into()));
    }
    if lambdas.len() < powers.len() + 2 {
        return Err(Error::InsufficientData(format!(
            "{} samples for {} powers; need at least {}",
            lambdas.len(),
            powers.len(),
            powers.len() + 2
        )));
    }
    let (m, n) = (lambdas.len(), powers.len());
    let mut a = DMatrix::<f64>::from_fn(m, n, |i, j| lambdas[i].powi(powers[j]));
    let scales: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
    for (j, &s) in scales.iter().enumerate() {
        if s == 0.0 {
            return Err(Error::IllConditioned(f64::INFINITY));
        }
        a.column_mut(j).unscale_mut(s);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > MAX_CONDITION {
        return Err(Error::IllConditioned(condition));
    }
    let solve = |rhs: DVector<f64>| -> Result<DVector<f64>> {
        svd.solve(&rhs, 0.0).map_err(|e| Error::InvalidArgument(e.to_string()))
    };
    let re = solve(DVector::from_iterator(m, values.iter().map(|v| v.re)))?;
    let im = solve(DVector::from_iterator(m, values.iter().map(|v| v.im)))?;
    let coefficients: Vec<Complex64> = (0..n).map(|j| Complex64::new(re[j], im[j]) / scales[j]).collect();
    let residual = lambdas
        .iter()
        .zip(values)
        .map(|(&l, &v)| {
            let fit: Complex64 = powers.iter().zip(&coefficients).map(|(&p, &c)| c * l.powi(p)).sum();
            (v - fit).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    Ok(RichardsonFit {
        lambdas: lambdas.to_vec(),
        values: values.to_vec(),
        powers: powers.to_vec(),
        coefficients,
        residual,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid() -> Vec<f64> {
        vec![0.3, 0.25, 0.2, 0.15, 0.1, 0.07, 0.05]
    }

    #[test]
    fn exact_polynomial() {
        let l = grid();
        let v: Vec<Complex64> = l.iter().map(|&x: &f64| Complex64::new(3.0 + 2.0 * x * x + 0.5 * x.powi(4), 0.0)).collect();
        let fit = richardson_extract(&l, &v, &[0, 2, 4]).unwrap();
        assert_abs_diff_eq!(fit.coefficients[0].re, 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficients[1].re, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(fit.coefficients[2].re, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn noisy_values() {
        let l = grid();
        let v: Vec<Complex64> = l
            .iter()
            .enumerate()
            .map(|(i, &x)| Complex64::new(3.0 + 2.0 * x * x + 0.5 * x.powi(4) + 1e-10 * if i % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect();
        let fit = richardson_extract(&l, &v, &[0, 2, 4]).unwrap();
        assert!((fit.coefficients[0].re - 3.0).abs() < 1e-6);
        assert!((fit.coefficients[1].re - 2.0).abs() < 1e-6);
    }

    #[test]
    fn single_power() {
        let l = grid();
        let v: Vec<Complex64> = l.iter().map(|&x| Complex64::new(0.0, 1.5 * x * x)).collect();
        let fit = richardson_extract(&l, &v, &[2]).unwrap();
        assert_abs_diff_eq!(fit.coefficient(2).unwrap().im, 1.5, epsilon = 1e-14);
    }

    #[test]
    fn refusals() {
        let l = grid();
        let v = vec![Complex64::new(1.0, 0.0); l.len()];
        assert!(matches!(richardson_extract(&l[..3], &v[..3], &[0, 2]), Err(Error::InsufficientData(_))));
        // a repeated power makes the design matrix singular
        let r = richardson_extract(&l, &v, &[0, 2, 2]);
        assert!(matches!(r, Err(Error::IllConditioned(_))), "{:?}", r.map(|f| f.condition));
    }
}
