use std::f64::consts::PI;

use multipole_core::fock::{self, FockVector, MetricOperator, OneParticleGrid, OneParticleVector};
use multipole_core::funcspace::{corpus, GaussPoly};
use multipole_core::{c64, Complex64};
use proptest::prelude::*;

fn grid() -> OneParticleGrid {
    OneParticleGrid::default()
}

fn vector(seed: &[(f64, f64)]) -> OneParticleVector {
    let g = grid();
    let amps = (0..g.size())
        .map(|j| {
            let (a, b) = seed[j % seed.len()];
            c64(a + 0.1 * j as f64 % 0.7, b) * (-g.point(j).powi(2) / 16.0).exp()
        })
        .collect();
    OneParticleVector::new(g, amps).unwrap()
}

fn fock_vector(m: usize, top: usize, seed: &[(f64, f64)]) -> FockVector {
    let g = grid();
    FockVector::from_fn(g, m, top, |n, j| {
        let (a, b) = seed[(n + j.iter().sum::<usize>()) % seed.len()];
        c64(a, b) * (-j.iter().map(|&i| g.point(i).powi(2)).sum::<f64>() / 16.0).exp()
    })
    .unwrap()
}

#[test]
fn grid_form_matches_closed_form_on_corpus() {
    let g = grid();
    let fs = corpus::test_functions();
    for (na, a) in &fs {
        for (nb, b) in &fs {
            let on_grid = fock::indefinite_inner(&OneParticleVector::from_function(g, a), &OneParticleVector::from_function(g, b)).unwrap();
            let exact = fock::indefinite_closed_form(a, b);
            assert!((on_grid - exact).norm() < 1e-6, "{na} × {nb}");
        }
    }
}

#[test]
fn witnesses_have_opposite_signs() {
    let g = grid();
    let target = (PI / 2.0).sqrt();
    let p = OneParticleVector::from_function(g, &corpus::witness_plus());
    let m = OneParticleVector::from_function(g, &corpus::witness_minus());
    assert!((fock::indefinite_inner(&p, &p).unwrap() - target).norm() < 1e-6);
    assert!((fock::indefinite_inner(&m, &m).unwrap() + target).norm() < 1e-6);
}

#[test]
fn real_functions_are_null() {
    let g = grid();
    let f = OneParticleVector::from_function(g, &GaussPoly::from_real(&[1.0, 0.3, -0.2], 1.2, 0.4).unwrap().into());
    assert!(fock::indefinite_inner(&f, &f).unwrap().norm() < 1e-12);
    let z = OneParticleVector::zero(g);
    assert_eq!(fock::indefinite_inner(&z, &z).unwrap(), c64(0.0, 0.0));
}

#[test]
fn ccr_with_negative_norm_vector() {
    let g = grid();
    let f = OneParticleVector::from_function(g, &corpus::witness_minus());
    let phi = fock_vector(3, 2, &[(0.3, -0.2), (1.0, 0.1), (-0.5, 0.4)]);
    assert!(fock::ccr_defect(&f, &f, &phi).unwrap() <= 1e-10 * phi.hilbert_norm());
    let vac = FockVector::vacuum(g, 3);
    assert!(fock::ccr_defect(&f, &f, &vac).unwrap() <= 1e-12);
}

#[test]
fn ccr_at_higher_truncation() {
    let f = vector(&[(0.2, 0.5), (-0.3, 0.1)]);
    let h = vector(&[(1.0, -0.4), (0.1, 0.2), (0.0, 0.3)]);
    let phi = fock_vector(4, 2, &[(0.7, 0.1), (-0.2, 0.9)]);
    assert!(fock::ccr_defect(&f, &h, &phi).unwrap() <= 1e-10 * phi.hilbert_norm());
}

#[test]
fn adjointness_basics() {
    let g = grid();
    let f = vector(&[(0.2, 0.5)]);
    let h = vector(&[(0.9, -0.1), (0.3, 0.3)]);
    let vac = FockVector::vacuum(g, 3);
    assert_eq!(fock::adjoint_defect(&f, &vac, &vac).unwrap(), 0.0);
    let one = fock::create(&h, &vac).unwrap();
    assert!(fock::adjoint_defect(&f, &one, &vac).unwrap() <= 1e-12);
    let lhs = fock::annihilate(&f, &one).unwrap().indefinite_inner(&vac).unwrap();
    let k = fock::indefinite_inner(&f, &h).unwrap();
    assert!((lhs - k.conj()).norm() <= 1e-12);
}

#[test]
fn metric_relation() {
    let f = vector(&[(0.2, 0.5), (-1.0, 0.0)]);
    let h = vector(&[(0.4, 0.1)]);
    let eta = MetricOperator::new(&grid());
    assert!(eta.squares_to_identity(&f).unwrap());
    assert_eq!(fock::hilbert_inner(&f, &fock::eta_apply(&h)).unwrap(), fock::indefinite_inner(&f, &h).unwrap());
    assert_eq!(fock::hilbert_inner(&fock::eta_apply(&f), &h).unwrap(), fock::hilbert_inner(&f, &fock::eta_apply(&h)).unwrap());
}

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn ccr_and_adjointness_at_m3(a in pairs(), b in pairs(), c in pairs(), d in pairs()) {
        let f = vector(&a);
        let h = vector(&b);
        let phi = fock_vector(3, 2, &c);
        let psi = fock_vector(3, 2, &d);
        let chi = fock_vector(3, 3, &c);
        let scale = phi.hilbert_norm().max(1e-300);
        prop_assert!(fock::ccr_defect(&f, &h, &phi).unwrap() <= 1e-10 * scale);
        let adj = fock::adjoint_defect(&f, &chi, &psi).unwrap();
        prop_assert!(adj <= 1e-10 * (1.0 + chi.hilbert_norm() * psi.hilbert_norm()));
        let hermitian = fock::indefinite_inner(&f, &h).unwrap() - fock::indefinite_inner(&h, &f).unwrap().conj();
        prop_assert!(hermitian.norm() <= 1e-14 * (1.0 + fock::hilbert_inner(&f, &f).unwrap().norm() + fock::hilbert_inner(&h, &h).unwrap().norm()));
        let e = MetricOperator::new(&grid());
        prop_assert!(e.squares_to_identity(&f).unwrap());
    }
}

#[test]
fn overflow_is_reported() {
    let top = fock_vector(3, 3, &[(1.0, 0.0)]);
    let f = vector(&[(1.0, 0.0)]);
    assert!(matches!(fock::create(&f, &top), Err(multipole_core::Error::Truncation { .. })));
    let zero = OneParticleVector::zero(grid());
    let out = fock::create(&zero, &fock_vector(3, 2, &[(1.0, 0.0)])).unwrap();
    assert_eq!(out.hilbert_norm(), 0.0);
    let _ = Complex64::new(0.0, 0.0);
}
