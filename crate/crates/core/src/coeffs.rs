//! Noise-strength constants.
//!
//! Conventions, fixed against the damped causal σ-integral
//! `∫_{−∞}^0 σⁿ e^{εσ} ∫ρ(ω) e^{iσ(ω−ω₀)} dω dσ`, ε → 0:
//!
//! * `γ₀ = −i ∫ ρ(ω)/(ω − ω₀ − i0) dω = −i PV∫ ρ/(ω−ω₀) + π ρ(ω₀)`
//! * `γ₁ = −∫ ρ(ω)/(ω − ω₀ − i0)² dω = −PV∫ ρ'/(ω−ω₀) − iπ ρ'(ω₀)`
//! * `γₙ = ((−1)ⁿ/n!) ∫_{−∞}^0 σⁿ (…) dσ = ∫ ρ(ω)/(ε + i(ω−ω₀))^{n+1} dω |_{ε→0}`
//! * `γ̃ₙ = ((−1)ⁿ/n!) ∫ σⁿ (…) dσ = 2π (−i)ⁿ ρ⁽ⁿ⁾(ω₀)/n!`
//!
//! The spin-boson constants use `1/(ω_l − i0) = PV 1/ω_l + iπ δ(ω_l)` with
//! `ω₁ = ω − Δ` and `ω₂ = ω + Δ`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::SpectralProfile;
use crate::quad::{self, Estimate, Prescription, QuadOptions};

/// Damping ladder `0.1·2^{−k}`, `k = 0..6`, used by the time-domain route.
pub const DAMPING_LADDER: [f64; 6] = [0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125];

/// Extrapolations whose last two diagonal entries differ by more than this
/// (relative) are reported as non-convergent.
const EXTRAPOLATION_LIMIT: f64 = 1e-5;

/// Causal and full-line coefficients of one multipole order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseCoefficients {
    pub order: usize,
    pub omega0: f64,
    /// Only defined for `n ≤ 1`.
    pub gamma_causal: Option<Complex64>,
    pub gamma_full: Complex64,
}

/// Two independent evaluations of `γₙ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteComparison {
    pub order: usize,
    /// Plemelj / principal-value route.
    pub route1: Complex64,
    /// Damped time-domain route, extrapolated to zero damping.
    pub route2: Complex64,
    pub gap: f64,
    /// Difference of the last two extrapolation levels.
    pub extrapolation_error: f64,
    /// Unextrapolated damped values along [`DAMPING_LADDER`].
    pub ladder: Vec<(f64, Complex64)>,
}

/// `A_l, B_l, C_l, Z_l` for `l = 1, 2` (index 0 and 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinBosonConstants {
    pub delta: f64,
    pub a: [Complex64; 2],
    pub b: [Complex64; 2],
    pub c: [Complex64; 2],
    pub z: [Complex64; 2],
}

fn tight() -> QuadOptions {
    QuadOptions::default()
}

fn loose() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-11,
        rel_tol: 1e-10,
        max_intervals: 4000,
    }
}

fn real(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Complex64 {
    move |x| Complex64::new(f(x), 0.0)
}

fn check_edge(profile: &SpectralProfile, point: f64, what: &str) -> Result<()> {
    let (lo, _) = profile.support();
    if profile.has_hard_lower_edge() && (point - lo).abs() <= 1e-9 * (1.0 + point.abs()) {
        return Err(Error::Unsupported(format!(
            "{what} {point} sits on the support edge; one-sided limits are not implemented"
        )));
    }
    Ok(())
}

/// `γ̃ₙ = 2π (−i)ⁿ ρ⁽ⁿ⁾(ω₀)/n!`.
pub fn gamma_full(profile: &SpectralProfile, omega0: f64, n: usize) -> Result<Complex64> {
    check_edge(profile, omega0, "resonance")?;
    let jet = profile.jet(omega0, n)?;
    // jet coefficients are already ρ⁽ⁿ⁾/n!
    let c = jet.coeffs()[n];
    Ok(Complex64::new(0.0, -1.0).powu(n as u32) * (2.0 * PI * c))
}

/// `γ₀` or `γ₁` by Plemelj splitting at `ω₀`.
pub fn gamma_causal(profile: &SpectralProfile, omega0: f64, n: usize) -> Result<Complex64> {
    if n > 1 {
        return Err(Error::Unsupported(format!("causal coefficients are implemented for n ≤ 1, got {n}")));
    }
    check_edge(profile, omega0, "resonance")?;
    if profile.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi) = profile.support();
    let w = profile.window_scale();
    let rho = real(|x| profile.density(x));
    if n == 0 {
        let est = quad::plemelj_first(rho, omega0, lo, hi, Prescription::MinusI0, w, &tight())?;
        Ok(Complex64::new(0.0, -1.0) * est.value)
    } else {
        let drho = real(|x| profile.density_derivative(x));
        let est = quad::plemelj_second(rho, drho, omega0, lo, hi, Prescription::MinusI0, w, &tight())?;
        Ok(-est.value)
    }
}

/// All coefficients of order `n` at `ω₀`.
pub fn noise_coefficients(profile: &SpectralProfile, omega0: f64, n: usize) -> Result<NoiseCoefficients> {
    Ok(NoiseCoefficients {
        order: n,
        omega0,
        gamma_causal: if n <= 1 { Some(gamma_causal(profile, omega0, n)?) } else { None },
        gamma_full: gamma_full(profile, omega0, n)?,
    })
}

/// Damped causal integral at finite `ε`:
/// `((−1)ⁿ/n!) ∫_{−∞}^0 σⁿ e^{εσ} G(σ) dσ = ∫ ρ(ω)/(ε + i(ω−ω₀))^{n+1} dω`.
pub fn damped_gamma(profile: &SpectralProfile, omega0: f64, n: usize, eps: f64) -> Result<Complex64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("damping must be positive, got {eps}")));
    }
    if profile.is_zero() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (lo, hi) = profile.support();
    let mut breaks = profile.landmarks();
    for k in [0.0, 1.0, -1.0, 4.0, -4.0, 16.0, -16.0] {
        breaks.push(omega0 + k * eps);
    }
    let p = n as i32 + 1;
    let f = |x: f64| profile.density(x) / Complex64::new(eps, x - omega0).powi(p);
    // the peak grows like ε^{−n−1}; relative accuracy is limited by cancellation
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_intervals: 8000,
    };
    let est = quad::integrate_with_breaks(f, lo, hi, &breaks, &opts)?;
    Ok(est.value)
}

/// Richardson table on a geometric ladder with step ratio `ratio`, assuming
/// an error expansion in integer powers of the step.
/// Returns the extrapolated value and the change between the last two
/// diagonal entries.
pub fn richardson_geometric(values: &[Complex64], ratio: f64) -> (Complex64, f64) {
    let m = values.len();
    if m == 0 {
        return (Complex64::new(0.0, 0.0), f64::INFINITY);
    }
    let mut prev: Vec<Complex64> = values.to_vec();
    let mut diag = vec![prev[m - 1]];
    for k in 1..m {
        let factor = ratio.powi(k as i32) - 1.0;
        let next: Vec<Complex64> = (k..m).map(|i| prev[i - k + 1] + (prev[i - k + 1] - prev[i - k]) / factor).collect();
        diag.push(*next.last().unwrap());
        prev = next;
    }
    let best = diag[m - 1];
    let err = if m > 1 { (best - diag[m - 2]).norm() } else { f64::INFINITY };
    (best, err)
}

/// Plemelj route against the damped time-domain route.
pub fn cross_validate_gamma(profile: &SpectralProfile, omega0: f64, n: usize) -> Result<RouteComparison> {
    let route1 = gamma_causal(profile, omega0, n)?;
    let ladder: Vec<(f64, Complex64)> = DAMPING_LADDER
        .iter()
        .map(|&e| Ok((e, damped_gamma(profile, omega0, n, e)?)))
        .collect::<Result<_>>()?;
    let vals: Vec<Complex64> = ladder.iter().map(|p| p.1).collect();
    let (route2, extrapolation_error) = richardson_geometric(&vals, 2.0);
    if extrapolation_error > EXTRAPOLATION_LIMIT * (1.0 + route2.norm()) {
        return Err(Error::accuracy(
            &format!("damped route for n = {n} did not settle; last levels {:?}", &vals[vals.len() - 2..]),
            EXTRAPOLATION_LIMIT,
            extrapolation_error,
        ));
    }
    Ok(RouteComparison {
        order: n,
        route1,
        route2,
        gap: (route1 - route2).norm(),
        extrapolation_error,
        ladder,
    })
}

/// `ω_l = ω ∓ Δ` vanishes at `ω = ±Δ`.
fn pole(l: usize, delta: f64) -> f64 {
    if l == 0 {
        delta
    } else {
        -delta
    }
}

/// Spin-boson constants by Plemelj splitting.
///
/// `Z_l` splits into `∫ ρ H/(ω_l − i0)²` with `H(ω) = ∫ ρ(ω')/(ω+ω') dω'`
/// and the iterated `∫ ρ(ω)/(ω_l − i0) K(ω)` with
/// `K(ω) = ∫ ρ(ω')/((ω+ω')(ω'_l − i0)) dω'`.
pub fn spinboson_constants(profile: &SpectralProfile, delta: f64) -> Result<SpinBosonConstants> {
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("gap must be positive, got {delta}")));
    }
    let zero = Complex64::new(0.0, 0.0);
    if profile.is_zero() {
        return Ok(SpinBosonConstants {
            delta,
            a: [zero; 2],
            b: [zero; 2],
            c: [zero; 2],
            z: [zero; 2],
        });
    }
    let (lo, hi) = profile.support();
    if lo < 0.0 {
        return Err(Error::Unsupported(format!(
            "spin-boson constants need ρ supported on ω > 0, support starts at {lo}"
        )));
    }
    check_edge(profile, delta, "gap")?;
    let w = profile.window_scale();
    let rho = |x: f64| profile.density(x);
    let h = |x: f64| -> Result<(f64, f64)> {
        let v = quad::integrate_real(|y| rho(y) / (x + y), lo, hi, &tight())?.0;
        let d = quad::integrate_real(|y| -rho(y) / ((x + y) * (x + y)), lo, hi, &tight())?.0;
        Ok((v, d))
    };
    let mut out = SpinBosonConstants {
        delta,
        a: [zero; 2],
        b: [zero; 2],
        c: [zero; 2],
        z: [zero; 2],
    };
    for l in 0..2 {
        let p = pole(l, delta);
        let a = quad::plemelj_first(real(rho), p, lo, hi, Prescription::MinusI0, w, &tight())?.value;
        let b = quad::plemelj_second(
            real(rho),
            real(|x| profile.density_derivative(x)),
            p,
            lo,
            hi,
            Prescription::MinusI0,
            w,
            &tight(),
        )?
        .value;
        let za = nested(|x| {
            let (hv, _) = h(x)?;
            Ok(Complex64::new(rho(x) * hv, 0.0))
        }, |x| {
            let (hv, hd) = h(x)?;
            Ok(Complex64::new(profile.density_derivative(x) * hv + rho(x) * hd, 0.0))
        }, p, lo, hi, w, true)?;
        let zb = nested(
            |x| {
                let k = quad::plemelj_first(real(|y| rho(y) / (x + y)), p, lo, hi, Prescription::MinusI0, w, &tight())?;
                Ok(rho(x) * k.value)
            },
            |_| Ok(zero),
            p,
            lo,
            hi,
            w,
            false,
        )?;
        let z = za + zb;
        let i = Complex64::new(0.0, 1.0);
        out.a[l] = a;
        out.b[l] = b;
        out.z[l] = z;
        out.c[l] = i * a * b - i * z;
    }
    Ok(out)
}

/// Outer Plemelj integral of an integrand that is itself a quadrature.
/// Inner failures are carried out of the closure and reported.
fn nested<F, G>(f: F, df: G, p: f64, lo: f64, hi: f64, w: f64, second: bool) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
    G: Fn(f64) -> Result<Complex64>,
{
    let failure = std::cell::RefCell::new(None);
    let wrap = |g: &dyn Fn(f64) -> Result<Complex64>, x: f64| match g(x) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    let fv = |x: f64| wrap(&f, x);
    let dv = |x: f64| wrap(&df, x);
    let est: Estimate = if second {
        quad::plemelj_second(fv, dv, p, lo, hi, Prescription::MinusI0, w, &loose())?
    } else {
        quad::plemelj_first(fv, p, lo, hi, Prescription::MinusI0, w, &loose())?
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{GaussPoly, GaussPolySum};
    use approx::assert_abs_diff_eq;

    fn gauss_profile(w0: f64) -> SpectralProfile {
        SpectralProfile::synthetic(GaussPoly::gaussian(1.0, w0).unwrap().into())
    }

    #[test]
    fn gaussian_profile_analytics() {
        let p = gauss_profile(2.0);
        let g0 = gamma_causal(&p, 2.0, 0).unwrap();
        let g1 = gamma_causal(&p, 2.0, 1).unwrap();
        assert_abs_diff_eq!(g0.re, PI, epsilon = 1e-10);
        assert_abs_diff_eq!(g0.im, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g1.re, 2.0 * PI.sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(g1.im, 0.0, epsilon = 1e-10);
        let f0 = gamma_full(&p, 2.0, 0).unwrap();
        assert_abs_diff_eq!(f0.re, 2.0 * PI, epsilon = 1e-13);
        assert_eq!(gamma_full(&p, 2.0, 1).unwrap().norm(), 0.0);
        assert!((f0 - g0 - g0.conj()).norm() < 1e-9);
    }

    #[test]
    fn zero_profile_gives_zero() {
        let p = SpectralProfile::zero();
        for n in 0..3 {
            assert_eq!(gamma_full(&p, 1.0, n).unwrap().norm(), 0.0);
        }
        let r = cross_validate_gamma(&p, 1.0, 1).unwrap();
        assert_eq!(r.route1.norm() + r.route2.norm(), 0.0);
    }

    #[test]
    fn resonance_below_support_is_pure_imaginary() {
        let p = gauss_profile(5.0);
        let g0 = gamma_causal(&p, -3.0, 0).unwrap();
        assert_eq!(g0.re, 0.0);
        assert!(g0.im.abs() > 0.0);
    }

    #[test]
    fn edge_resonance_is_unsupported() {
        let p = SpectralProfile::synthetic_above(GaussPoly::gaussian(1.0, 1.0).unwrap().into(), 0.5);
        assert!(matches!(gamma_causal(&p, 0.5, 0), Err(Error::Unsupported(_))));
        assert!(matches!(gamma_full(&p, 0.5, 0), Err(Error::Unsupported(_))));
        assert!(matches!(gamma_causal(&p, 1.0, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn richardson_removes_polynomial_error() {
        let h = [0.1, 0.05, 0.025, 0.0125];
        let v: Vec<Complex64> = h.iter().map(|&e: &f64| Complex64::new(3.0 + 2.0 * e - 5.0 * e * e + e.powi(3), 0.0)).collect();
        let (best, _) = richardson_geometric(&v, 2.0);
        assert_abs_diff_eq!(best.re, 3.0, epsilon = 1e-13);
    }

    #[test]
    fn damped_route_agrees_for_gaussian() {
        let p = gauss_profile(1.5);
        for n in 0..2 {
            let r = cross_validate_gamma(&p, 1.5, n).unwrap();
            assert!(r.gap < 1e-8, "n={n} gap={}", r.gap);
        }
    }

    #[test]
    fn coefficients_scale_linearly() {
        let rho: GaussPolySum = GaussPoly::new(vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, 0.0)], 1.0, 1.0).unwrap().into();
        let p = SpectralProfile::synthetic(rho.mul(&rho));
        let s = 2.5;
        for n in 0..2 {
            let a = gamma_causal(&p, 1.2, n).unwrap();
            let b = gamma_causal(&p.scaled(s), 1.2, n).unwrap();
            assert!((b - a * s).norm() < 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn spinboson_identity_and_scaling() {
        let rho: GaussPolySum = GaussPoly::gaussian(1.0, 2.0).unwrap().into();
        let p = SpectralProfile::synthetic_above(rho, 0.0);
        let k = spinboson_constants(&p, 1.5).unwrap();
        let i = Complex64::new(0.0, 1.0);
        for l in 0..2 {
            assert_eq!(k.c[l], i * k.a[l] * k.b[l] - i * k.z[l]);
        }
        // delta part of A₁ is iπρ(Δ); A₂ has none
        assert_abs_diff_eq!(k.a[0].im, PI * (-0.25f64).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(k.a[1].im, 0.0, epsilon = 1e-14);
        let k2 = spinboson_constants(&p.scaled(2.0), 1.5).unwrap();
        for l in 0..2 {
            assert!((k2.z[l] - 4.0 * k.z[l]).norm() < 1e-8 * (1.0 + k.z[l].norm()));
        }
    }

    #[test]
    fn spinboson_rejects_negative_support() {
        let p = gauss_profile(1.0);
        assert!(matches!(spinboson_constants(&p, 0.5), Err(Error::Unsupported(_))));
    }
}
