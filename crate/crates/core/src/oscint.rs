//! Rescaled oscillatory integrals and their distributional expansions.
//!
//! Every integral is evaluated on the Fourier side, where the kernel
//! `λ⁻² e^{ixt/λ²}` has been integrated out exactly:
//!
//! * full line: `∫∫ λ⁻² e^{ixt/λ²} f(x) φ(t) = ∫ f̃(τ) φ(λ²τ) dτ`,
//! * simplex:   `λ⁻² ∫dx ∫₀^a dt f(x) φ(t) e^{ix(t−a)/λ²} = ∫_{−a/λ²}^0 f̃(y) φ(λ²y + a) dy`,
//! * half line: `∫dx ∫₀^∞ dt λ⁻² e^{ixt/λ²} f(x) φ(t) = ∫₀^∞ f̃(s) φ(λ²s) ds`.
//!
//! No oscillatory quadrature happens at small λ.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{half_line_moment, GaussPolySum, PiecewiseC1, Side};
use crate::quad::{self, Estimate, Prescription, QuadOptions};

/// Absolute error target for the Fourier-side integrals.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Residuals below `NOISE_FLOOR_FACTOR × tol` are dropped from slope fits.
pub const NOISE_FLOOR_FACTOR: f64 = 100.0;

/// Strictly decreasing couplings in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LambdaGrid(Vec<f64>);

impl LambdaGrid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|&l| !(l > 0.0 && l < 1.0)) {
            return Err(Error::InvalidArgument("lambda values must lie in (0, 1)".into()));
        }
        if values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidArgument("lambda grid must be strictly decreasing".into()));
        }
        Ok(Self(values))
    }

    /// `{0.3, 0.2, 0.15, 0.1, 0.07, 0.05}`
    pub fn standard() -> Self {
        Self(vec![0.3, 0.2, 0.15, 0.1, 0.07, 0.05])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for LambdaGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<LambdaGrid> for Vec<f64> {
    fn from(g: LambdaGrid) -> Self {
        g.0
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")))
    }
}

fn map_accuracy(e: Error, what: &str, tol: f64) -> Error {
    match e {
        Error::Accuracy { achieved, .. } => Error::accuracy(what, tol, achieved),
        other => other,
    }
}

/// `∫_{lo}^{hi} f̃(y) g(y) dy` with `|g| ≤ g_sup`, clipped to the effective
/// support of `f̃`.
fn fourier_side(ft: &GaussPolySum, g: impl Fn(f64) -> Complex64, lo: f64, hi: f64, g_sup: f64, tol: f64, what: &str) -> Result<Estimate> {
    if ft.is_zero() || g_sup == 0.0 || hi <= lo {
        return Ok(Estimate::zero());
    }
    let tail = 0.1 * tol;
    let (s_lo, s_hi) = ft.effective_support(tail / g_sup.max(1e-300));
    let a = lo.max(s_lo);
    let b = hi.min(s_hi);
    if b <= a {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: tail,
        });
    }
    let breaks: Vec<f64> = ft.terms().iter().map(|t| t.center()).collect();
    let opts = QuadOptions {
        abs_tol: 0.5 * tol,
        rel_tol: 0.0,
        max_intervals: 8000,
    };
    let est = quad::integrate_with_breaks(|y| ft.eval(y) * g(y), a, b, &breaks, &opts).map_err(|e| map_accuracy(e, what, tol))?;
    Ok(Estimate {
        value: est.value,
        error: est.error + tail,
    })
}

/// `∫∫ λ⁻² e^{ixt/λ²} f(x) φ(t) dx dt`, evaluated as `∫ f̃(τ) φ(λ²τ) dτ`.
pub fn pair_integral(f: &GaussPolySum, phi: &GaussPolySum, lambda: f64, tol: f64) -> Result<Estimate> {
    check_lambda(lambda)?;
    let ft = f.fourier();
    let scaled = phi.dilate(lambda * lambda);
    fourier_side(&ft, |t| scaled.eval(t), f64::NEG_INFINITY, f64::INFINITY, phi.sup_bound(), tol, "pair integral")
}

/// Partial sum `2π Σ_{n≤N} (iλ²)ⁿ/n! f⁽ⁿ⁾(0) φ⁽ⁿ⁾(0)`.
pub fn expansion_sum(f: &GaussPolySum, phi: &GaussPolySum, lambda: f64, order: usize) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut coef = Complex64::new(2.0 * PI, 0.0);
    for n in 0..=order {
        if n > 0 {
            coef *= Complex64::new(0.0, lambda * lambda) / n as f64;
        }
        sum += coef * f.derivative_at(n, 0.0)? * phi.derivative_at(n, 0.0)?;
    }
    Ok(sum)
}

/// `λ⁻² ∫dx ∫₀^a dt f(x) φ(t) e^{ix(t−a)/λ²}` via `y = (t − a)/λ²`.
pub fn simplex_integral(f: &GaussPolySum, phi: &PiecewiseC1, a: f64, lambda: f64, tol: f64) -> Result<Estimate> {
    check_lambda(lambda)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("simplex endpoint must be positive, got {a}")));
    }
    let ft = f.fourier();
    let l2 = lambda * lambda;
    let mut total = Estimate::zero();
    for (piece, cut) in phi.pieces() {
        let lo = -a / l2;
        let hi = ((cut - a) / l2).min(0.0);
        let sup = piece.sup_bound_on(0.0, a.min(*cut));
        let part = fourier_side(&ft, |y| piece.eval(l2 * y + a), lo, hi, sup, tol, "simplex integral")?;
        total = total + part;
    }
    Ok(total)
}

/// Leading and first-correction terms of the simplex expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexExpansion {
    /// `(δ₊(·−a), φ) · ∫_{−∞}^0 f̃ = φ(a) M₀`
    pub leading: Complex64,
    /// `−λ² (δ₊'(·−a), φ) · ∫_{−∞}^0 y f̃ = λ² φ'_L(a) M₁`
    pub correction: Complex64,
    pub total: Complex64,
}

/// `φ(a) M₀ + λ² φ'_L(a) M₁` with `Mₖ = ∫_{−∞}^0 yᵏ f̃(y) dy`.
pub fn simplex_expansion(f: &GaussPolySum, phi: &PiecewiseC1, a: f64, lambda: f64, tol: f64) -> Result<SimplexExpansion> {
    check_lambda(lambda)?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("simplex endpoint must be positive, got {a}")));
    }
    let value = phi.left_value(a);
    let slope = phi.left_derivative(a);
    let zero = Complex64::new(0.0, 0.0);
    let ft = f.fourier();
    let leading = if value == zero {
        zero
    } else {
        value * half_line_moment(&ft, 0, Side::Negative, tol)?.value
    };
    let correction = if slope == zero {
        zero
    } else {
        slope * lambda * lambda * half_line_moment(&ft, 1, Side::Negative, tol)?.value
    };
    Ok(SimplexExpansion {
        leading,
        correction,
        total: leading + correction,
    })
}

/// `∫dx ∫₀^∞ dt λ⁻² e^{ixt/λ²} f(x) φ(t)` as `∫₀^∞ f̃(s) φ(λ²s) ds`.
pub fn halfline_integral(f: &GaussPolySum, phi: &GaussPolySum, lambda: f64, tol: f64) -> Result<Estimate> {
    check_lambda(lambda)?;
    let ft = f.fourier();
    let scaled = phi.dilate(lambda * lambda);
    fourier_side(&ft, |s| scaled.eval(s), 0.0, f64::INFINITY, phi.sup_bound(), tol, "half-line integral")
}

/// `Σ_{n≤N} λ^{2n} φ⁽ⁿ⁾(0)/n! ∫₀^∞ sⁿ f̃(s) ds`.
pub fn halfline_expansion(f: &GaussPolySum, phi: &GaussPolySum, lambda: f64, order: usize, tol: f64) -> Result<Complex64> {
    check_lambda(lambda)?;
    let ft = f.fourier();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut fact = 1.0;
    for n in 0..=order {
        if n > 0 {
            fact *= n as f64;
        }
        let d = phi.derivative_at(n, 0.0)?;
        if d.norm() == 0.0 {
            continue;
        }
        let m = half_line_moment(&ft, n, Side::Positive, tol)?;
        sum += lambda.powi(2 * n as i32) * d / fact * m.value;
    }
    Ok(sum)
}

/// `i ∫ f(x)/(x + i0) dx`, which equals `∫₀^∞ f̃(s) ds`.
pub fn cauchy_pairing(f: &GaussPolySum, tol: f64) -> Result<Complex64> {
    if f.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi) = f.effective_support(0.1 * tol);
    let (lo, hi) = (lo.min(-1.0), hi.max(1.0));
    let opts = QuadOptions {
        abs_tol: 0.5 * tol,
        rel_tol: 0.0,
        max_intervals: 4000,
    };
    let est = quad::plemelj_first(|x| f.eval(x), 0.0, lo, hi, Prescription::PlusI0, 1.0, &opts)?;
    Ok(Complex64::new(0.0, 1.0) * est.value)
}

/// Least-squares log-log slope with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub halfwidth: f64,
    pub points: usize,
}

/// Fit `log r = p log λ + c`; points with `r < floor` are excluded.
pub fn convergence_slope(residuals: &[f64], grid: &LambdaGrid, floor: f64) -> Result<SlopeFit> {
    if residuals.len() != grid.values().len() {
        return Err(Error::Shape(format!(
            "{} residuals for {} grid points",
            residuals.len(),
            grid.values().len()
        )));
    }
    let pts: Vec<(f64, f64)> = grid
        .values()
        .iter()
        .zip(residuals)
        .filter(|(_, &r)| r > floor && r.is_finite())
        .map(|(&l, &r)| (l.ln(), r.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "{} usable points above the noise floor {floor:e}; at least 4 needed",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    let halfwidth = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        halfwidth,
        points: pts.len(),
    })
}

/// One λ sample of an expansion run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub lambda: f64,
    pub integral: Complex64,
    pub sum: Complex64,
    pub residual: f64,
}

/// Per-λ values, residuals and the fitted convergence rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub rows: Vec<ExpansionRow>,
    pub slope: Option<SlopeFit>,
    /// Minimum slope required for a pass.
    pub threshold: f64,
    pub pass: bool,
}

impl ExpansionReport {
    fn from_rows(rows: Vec<ExpansionRow>, grid: &LambdaGrid, threshold: f64, floor: f64) -> Result<Self> {
        let residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
        let slope = convergence_slope(&residuals, grid, floor)?;
        Ok(Self {
            pass: slope.slope > threshold,
            slope: Some(slope),
            rows,
            threshold,
        })
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.residual).collect()
    }
}

fn sweep<F>(grid: &LambdaGrid, mut row: F) -> Result<Vec<ExpansionRow>>
where
    F: FnMut(f64) -> Result<(Complex64, Complex64)>,
{
    grid.values()
        .iter()
        .map(|&lambda| {
            let (integral, sum) = row(lambda)?;
            Ok(ExpansionRow {
                lambda,
                integral,
                sum,
                residual: (integral - sum).norm(),
            })
        })
        .collect()
}

/// Full-line expansion run; passes when the residual slope exceeds
/// `2N + excess`.
pub fn fullline_report(f: &GaussPolySum, phi: &GaussPolySum, order: usize, grid: &LambdaGrid, excess: f64, tol: f64) -> Result<ExpansionReport> {
    let rows = sweep(grid, |l| Ok((pair_integral(f, phi, l, tol)?.value, expansion_sum(f, phi, l, order)?)))?;
    ExpansionReport::from_rows(rows, grid, 2.0 * order as f64 + excess, NOISE_FLOOR_FACTOR * tol)
}

/// Half-line expansion run (`N ≤ 1` is the documented range).
pub fn halfline_report(f: &GaussPolySum, phi: &GaussPolySum, order: usize, grid: &LambdaGrid, excess: f64, tol: f64) -> Result<ExpansionReport> {
    let rows = sweep(grid, |l| {
        Ok((halfline_integral(f, phi, l, tol)?.value, halfline_expansion(f, phi, l, order, tol)?))
    })?;
    ExpansionReport::from_rows(rows, grid, 2.0 * order as f64 + excess, NOISE_FLOOR_FACTOR * tol)
}

/// Simplex expansion run.
///
/// For `a` inside the support the residual after the λ² correction must
/// decay with slope ≥ `min_slope`. For `a` beyond every cutoff both
/// expansion terms vanish identically; the integral itself must then decay
/// with slope ≥ `beyond_slope`, or sit entirely below the noise floor.
pub fn simplex_report(
    f: &GaussPolySum,
    phi: &PiecewiseC1,
    a: f64,
    grid: &LambdaGrid,
    min_slope: f64,
    beyond_slope: f64,
    tol: f64,
) -> Result<ExpansionReport> {
    let rows = sweep(grid, |l| {
        Ok((simplex_integral(f, phi, a, l, tol)?.value, simplex_expansion(f, phi, a, l, tol)?.total))
    })?;
    let floor = NOISE_FLOOR_FACTOR * tol;
    let beyond = a > phi.last_cutoff();
    if beyond && rows.iter().all(|r| r.sum == Complex64::new(0.0, 0.0)) {
        // The decay here is faster than any power, so most samples drop
        // below the floor. Clamping them at the floor can only flatten the fit.
        let clamped: Vec<f64> = rows.iter().map(|r| r.residual.max(floor)).collect();
        if clamped.iter().all(|&r| r == floor) {
            return Ok(ExpansionReport {
                rows,
                slope: None,
                threshold: beyond_slope,
                pass: true,
            });
        }
        let fit = convergence_slope(&clamped, grid, 0.0)?;
        return Ok(ExpansionReport {
            pass: fit.slope >= beyond_slope,
            slope: Some(fit),
            rows,
            threshold: beyond_slope,
        });
    }
    let residuals: Vec<f64> = rows.iter().map(|r| r.residual).collect();
    let fit = convergence_slope(&residuals, grid, floor)?;
    Ok(ExpansionReport {
        pass: fit.slope >= min_slope,
        slope: Some(fit),
        rows,
        threshold: min_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::GaussPoly;
    use approx::assert_abs_diff_eq;

    fn gauss(c: f64) -> GaussPolySum {
        GaussPoly::gaussian(1.0, c).unwrap().into()
    }

    #[test]
    fn gaussian_pair_closed_form() {
        for &l in &[0.05, 0.2, 0.7] {
            let v = pair_integral(&gauss(0.0), &gauss(0.0), l, 1e-12).unwrap();
            let expect = 2.0 * PI / (1.0 + 4.0 * l.powi(4)).sqrt();
            assert_abs_diff_eq!(v.value.re, expect, epsilon = 1e-10);
            assert_abs_diff_eq!(v.value.im, 0.0, epsilon = 1e-10);
        }
        let z = pair_integral(&GaussPolySum::zero(), &gauss(0.0), 0.3, 1e-12).unwrap();
        assert_eq!(z.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn expansion_sum_terms() {
        let l: f64 = 0.3;
        let s0 = expansion_sum(&gauss(0.2), &gauss(-0.1), l, 0).unwrap();
        let expect = 2.0 * PI * (-0.04f64).exp() * (-0.01f64).exp();
        assert_abs_diff_eq!(s0.re, expect, epsilon = 1e-14);
        let s2 = expansion_sum(&gauss(0.0), &gauss(0.0), l, 2).unwrap();
        assert_abs_diff_eq!(s2.re, 2.0 * PI - 4.0 * PI * l.powi(4), epsilon = 1e-13);
        assert_abs_diff_eq!(s2.im, 0.0, epsilon = 1e-14);
        // x^{N+1} e^{-x²}: all derivatives up to N vanish at 0
        let f = gauss(0.0).mul_monomial(3);
        assert_eq!(expansion_sum(&f, &gauss(0.3), l, 2).unwrap().norm(), 0.0);
    }

    #[test]
    fn simplex_unit_phi_is_error_function() {
        let one: GaussPolySum = GaussPoly::polynomial(&[1.0]).into();
        let phi = PiecewiseC1::single(one, 3.0).unwrap();
        let (a, l) = (1.0, 0.5);
        let v = simplex_integral(&gauss(0.0), &phi, a, l, 1e-12).unwrap();
        // ∫_{-a/λ²}^0 √π e^{-y²/4} dy = π erf(a/(2λ²))
        let z = a / (2.0 * l * l);
        let erf2 = 0.995_322_265_018_952_7; // erf(2)
        assert!((z - 2.0).abs() < 1e-15);
        assert_abs_diff_eq!(v.value.re, PI * erf2, epsilon = 1e-10);
    }

    #[test]
    fn simplex_beyond_support_is_zero_expansion() {
        let phi = PiecewiseC1::single(gauss(0.5), 1.0).unwrap();
        let e = simplex_expansion(&gauss(0.0), &phi, 1.5, 0.1, 1e-12).unwrap();
        assert_eq!(e.total, Complex64::new(0.0, 0.0));
        let zero = PiecewiseC1::single(GaussPolySum::zero(), 2.0).unwrap();
        let v = simplex_integral(&gauss(0.0), &zero, 1.0, 0.1, 1e-12).unwrap();
        assert_eq!(v.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn simplex_linear_phi_terms() {
        let t: GaussPolySum = GaussPoly::polynomial(&[0.0, 1.0]).into();
        let phi = PiecewiseC1::single(t, 5.0).unwrap();
        let (a, l) = (2.0, 0.3);
        let e = simplex_expansion(&gauss(0.0), &phi, a, l, 1e-12).unwrap();
        assert_abs_diff_eq!(e.leading.re, a * PI, epsilon = 1e-10);
        assert_abs_diff_eq!(e.correction.re, l * l * (-2.0 * PI.sqrt()), epsilon = 1e-10);
        let one: GaussPolySum = GaussPoly::polynomial(&[1.0]).into();
        let flat = PiecewiseC1::single(one, 5.0).unwrap();
        let e = simplex_expansion(&gauss(0.0), &flat, a, l, 1e-12).unwrap();
        assert_eq!(e.correction, Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(e.leading.re, PI, epsilon = 1e-10);
    }

    #[test]
    fn halfline_leading_term_and_cauchy_identity() {
        let e0 = halfline_expansion(&gauss(0.0), &gauss(0.0), 0.2, 0, 1e-12).unwrap();
        assert_abs_diff_eq!(e0.re, PI, epsilon = 1e-10);
        let f = gauss(0.4);
        let lhs = half_line_moment(&f.fourier(), 0, Side::Positive, 1e-12).unwrap().value;
        let rhs = cauchy_pairing(&f, 1e-12).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
        let z = halfline_integral(&gauss(0.0), &GaussPolySum::zero(), 0.2, 1e-12).unwrap();
        assert_eq!(z.value.norm(), 0.0);
    }

    #[test]
    fn slope_of_exact_power_laws() {
        let grid = LambdaGrid::standard();
        for p in [2.0, 4.0] {
            let r: Vec<f64> = grid.values().iter().map(|l: &f64| 3.0 * l.powf(p)).collect();
            let fit = convergence_slope(&r, &grid, 0.0).unwrap();
            assert_abs_diff_eq!(fit.slope, p, epsilon = 1e-12);
            assert!(fit.halfwidth < 1e-10);
        }
        let r = vec![1.0, 1.0, 1.0, 1e-20, 1e-20, 1e-20];
        assert!(matches!(convergence_slope(&r, &grid, 1e-10), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn grid_validation() {
        assert!(LambdaGrid::new(vec![0.3, 0.3]).is_err());
        assert!(LambdaGrid::new(vec![1.2, 0.3]).is_err());
        assert!(LambdaGrid::new(vec![0.3, 0.1]).is_ok());
    }
}
