//! Fixed test data shared by the test suites and the CLI defaults.

use num_complex::Complex64;

use super::{Dispersion, GaussPoly, GaussPolySum, SpectralProfile};

fn g(width: f64, center: f64) -> GaussPolySum {
    GaussPoly::gaussian(width, center).expect("valid width").into()
}

fn gp(coeffs: &[(f64, f64)], width: f64, center: f64, freq: f64) -> GaussPolySum {
    let q = coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
    GaussPoly::modulated(q, width, center, freq).expect("valid parameters").into()
}

/// `e^{−t²} + i t e^{−t²}`, with `⟨f,f⟩ = √(π/2)`.
pub fn witness_plus() -> GaussPolySum {
    gp(&[(1.0, 0.0), (0.0, 1.0)], 1.0, 0.0, 0.0)
}

/// `t e^{−t²} + i e^{−t²}`, with `⟨f,f⟩ = −√(π/2)`.
pub fn witness_minus() -> GaussPolySum {
    gp(&[(0.0, 1.0), (1.0, 0.0)], 1.0, 0.0, 0.0)
}

/// Gaussian×polynomial test functions.
pub fn test_functions() -> Vec<(&'static str, GaussPolySum)> {
    vec![
        ("gauss", g(1.0, 0.0)),
        ("gauss_shift", g(1.0, 0.5)),
        ("gauss_wide", g(0.5, -0.3)),
        ("gauss_poly", gp(&[(1.0, 0.0), (0.5, 0.0)], 2.0, 0.0, 0.0)),
        ("witness_plus", witness_plus()),
        ("witness_minus", witness_minus()),
        ("modulated", gp(&[(1.0, 0.0)], 1.0, 0.2, 0.8)),
        ("two_bump", g(1.0, 1.0).add(&gp(&[(0.0, -0.5)], 1.5, -0.5, 0.0))),
    ]
}

/// Spectral densities with a resonance frequency inside their support.
pub fn profiles() -> Vec<(&'static str, SpectralProfile, f64)> {
    vec![
        ("gaussian", SpectralProfile::synthetic(g(1.0, 2.0)), 2.0),
        ("gauss_quadratic", SpectralProfile::synthetic(gp(&[(1.0, 0.0), (0.6, 0.0), (0.2, 0.0)], 1.0, 1.2, 0.0)), 1.2),
        ("two_peak", SpectralProfile::synthetic(g(2.0, 1.0).add(&g(1.0, 2.5).scale(Complex64::new(0.5, 0.0)))), 1.8),
        (
            "massless_3d",
            SpectralProfile::radial_reduce(Dispersion::Massless, &g(0.5, 0.0), 3, false).expect("monotone"),
            1.0,
        ),
        (
            "massive_3d",
            SpectralProfile::radial_reduce(Dispersion::Massive { mass: 0.5 }, &g(1.0, 0.0), 3, false).expect("monotone"),
            1.2,
        ),
    ]
}
