use multipole_core::funcspace::{GaussPoly, GaussPolySum, SpectralProfile};
use multipole_core::models::multipole_pairing_term;
use multipole_core::oracle::{multipole_closed_form, richardson::richardson_extract};
use multipole_core::{c64, Complex64};

#[test]
fn extracted_coefficients_match_pairing_formulas() {
    let phi: GaussPolySum = GaussPoly::gaussian(1.0, 0.2).unwrap().into();
    let psi: GaussPolySum = GaussPoly::new(vec![c64(1.0, 0.0), c64(0.0, 0.5)], 1.0, -0.1).unwrap().into();
    let rho: GaussPolySum = GaussPoly::gaussian(1.0, 1.5).unwrap().into();
    let w0 = 1.3;
    let profile = SpectralProfile::synthetic(rho.clone());
    let lambdas: Vec<f64> = (0..16).map(|i| 0.3 - 0.25 * i as f64 / 15.0).collect();
    let values: Vec<Complex64> = lambdas.iter().map(|&l| multipole_closed_form(&phi, &psi, &rho, w0, l).unwrap()).collect();
    let powers: Vec<i32> = (1..=8).map(|k| 2 * k).collect();
    let fit = richardson_extract(&lambdas, &values, &powers).unwrap();
    for n in 0..=2 {
        let want = multipole_pairing_term(n, &phi, &psi, &profile, w0).unwrap();
        let got = fit.coefficient(2 * (n as i32 + 1)).unwrap();
        assert!((got - want).norm() <= 1e-4 * want.norm(), "n={n}: {got} vs {want}");
    }
}
