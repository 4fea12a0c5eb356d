use std::f64::consts::PI;
use std::time::Instant;

use multipole_core::coeffs;
use multipole_core::funcspace::{corpus, GaussPoly, SpectralProfile};
use multipole_core::oracle;

#[test]
fn plemelj_and_damped_routes_agree_on_corpus() {
    let start = Instant::now();
    for (name, p, w0) in corpus::profiles() {
        for n in 0..2 {
            let r = coeffs::cross_validate_gamma(&p, w0, n).unwrap();
            assert!(r.gap <= 1e-6 * r.route1.norm(), "{name} n={n}: {} vs {}", r.route1, r.route2);
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn gaussian_analytics() {
    let p = SpectralProfile::synthetic(GaussPoly::gaussian(1.0, 2.0).unwrap().into());
    let g0 = coeffs::gamma_causal(&p, 2.0, 0).unwrap();
    let g1 = coeffs::gamma_causal(&p, 2.0, 1).unwrap();
    assert!((g0.re - PI).abs() < 1e-8 && g0.im.abs() < 1e-8);
    assert!((g1.re - 2.0 * PI.sqrt()).abs() < 1e-8 && g1.im.abs() < 1e-8);
}

#[test]
fn full_line_coefficients_match_regularized_oracle() {
    for (name, p, w0) in corpus::profiles() {
        // massless_3d has a vanishing first derivative at its ω0, so the tolerance follows the profile scale
        let scale = coeffs::gamma_full(&p, w0, 0).unwrap().norm();
        for n in 0..=2 {
            let jet = coeffs::gamma_full(&p, w0, n).unwrap();
            let fit = oracle::regularized_gamma_full(&p, w0, n).unwrap();
            let reg = fit.coefficient(0).unwrap();
            assert!((jet - reg).norm() <= 1e-5 * (jet.norm() + scale), "{name} n={n}: {jet} vs {reg}");
        }
    }
}

#[test]
fn spin_boson_z_matches_damped_oracle() {
    let rho = GaussPoly::gaussian(1.0, 2.0).unwrap().into();
    let p = SpectralProfile::synthetic_above(rho, 0.0);
    let k = coeffs::spinboson_constants(&p, 1.5).unwrap();
    let fits = oracle::damped_z(&p, 1.5).unwrap();
    for l in 0..2 {
        let z = fits[l].coefficient(0).unwrap();
        assert!((z - k.z[l]).norm() <= 1e-5 * k.z[l].norm(), "l={l}: {} vs {z}", k.z[l]);
    }
}
