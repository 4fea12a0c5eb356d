//! Independent verification routes.
//!
//! Nothing here calls the adaptive integrator in [`crate::quad`] or the
//! Fourier-side evaluators in [`crate::oscint`]: quadratures use the
//! Gauss–Legendre meshes of [`legendre`], Gaussian integrals are done in
//! closed form by [`gauss2d`].

pub mod gauss2d;
pub mod legendre;
pub mod propagator;
pub mod richardson;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcspace::{GaussPolySum, PiecewiseC1, SpectralProfile};
use gauss2d::Gauss2;
use legendre::Mesh;

pub use propagator::{expm_taylor, two_mode_propagator, TwoModeField};
pub use richardson::{richardson_extract, RichardsonFit};

/// Smallest λ accepted by [`direct_2d_quadrature`].
pub const DIRECT_MIN_LAMBDA: f64 = 0.3;

/// Smallest λ accepted by [`direct_simplex_quadrature`]; the bounded time
/// range keeps the oscillation count manageable further down.
pub const SIMPLEX_MIN_LAMBDA: f64 = 0.1;

const ORDER: usize = 20;

/// `λ⁻² ∫∫ e^{ixt/λ²} f(x) φ(t) dx dt` by completing the square.
pub fn gaussian_closed_form(f: &GaussPolySum, phi: &GaussPolySum, lambda: f64) -> Result<Complex64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("lambda must be positive, got {lambda}")));
    }
    let l2 = lambda * lambda;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in f.terms() {
        for b in phi.terms() {
            sum += Gauss2::new()
                .factor(a, [1.0, 0.0], 0.0)?
                .factor(b, [0.0, 1.0], 0.0)?
                .bilinear(Complex64::new(0.0, 1.0 / l2))
                .scale(Complex64::new(1.0 / l2, 0.0))
                .integrate()?;
        }
    }
    Ok(sum)
}

/// Smeared two-point function
/// `W(λ) = ∫∫ conj φ(t) ψ(τ) G((τ − t)/λ²) dt dτ`
/// with `G(σ) = ∫ ρ(ω) e^{iσ(ω−ω₀)} dω`, for a Gaussian×polynomial `ρ`.
///
/// Substituting `τ = t + λ²σ` and writing `G(σ) = e^{−iσω₀} ρ̃(σ)` leaves a
/// two-dimensional Gaussian integral in `(t, σ)`.
pub fn multipole_closed_form(phi: &GaussPolySum, psi: &GaussPolySum, rho: &GaussPolySum, omega0: f64, lambda: f64) -> Result<Complex64> {
    let l2 = lambda * lambda;
    let rho_t = rho.fourier();
    let phi_c = phi.conj();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in phi_c.terms() {
        for b in psi.terms() {
            for r in rho_t.terms() {
                sum += Gauss2::new()
                    .factor(a, [1.0, 0.0], 0.0)?
                    .factor(b, [1.0, l2], 0.0)?
                    .factor(r, [0.0, 1.0], 0.0)?
                    .linear([Complex64::new(0.0, 0.0), Complex64::new(0.0, -omega0)])
                    .scale(Complex64::new(l2, 0.0))
                    .integrate()?;
            }
        }
    }
    Ok(sum)
}

/// A value with a rough error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: Complex64,
    pub error: f64,
}

fn tensor_sum(xm: &Mesh, tm: &Mesh, fx: &[Complex64], ft: &[Complex64], kernel: impl Fn(f64, f64) -> Complex64) -> Complex64 {
    let mut total = Complex64::new(0.0, 0.0);
    for (j, (&t, &wt)) in tm.nodes.iter().zip(&tm.weights).enumerate() {
        let mut inner = Complex64::new(0.0, 0.0);
        for (i, (&x, &wx)) in xm.nodes.iter().zip(&xm.weights).enumerate() {
            inner += wx * fx[i] * kernel(x, t);
        }
        total += wt * ft[j] * inner;
    }
    total
}

/// Doubling loop over tensor Gauss–Legendre meshes.
fn doubling<F>(mut eval: F, tol: f64, max_panels: usize) -> Result<Approx>
where
    F: FnMut(usize) -> Complex64,
{
    let mut panels = 8;
    let mut prev = eval(panels);
    while panels < max_panels {
        panels *= 2;
        let next = eval(panels);
        let err = (next - prev).norm();
        if err <= tol * (1.0 + next.norm()) {
            return Ok(Approx { value: next, error: err });
        }
        prev = next;
    }
    Err(Error::accuracy("direct 2-D quadrature", tol, f64::NAN))
}

/// Literal `λ⁻² ∫∫ e^{ixt/λ²} f(x) φ(t) dx dt` on a tensor mesh.
pub fn direct_2d_quadrature(f: &GaussPolySum, phi: &GaussPolySum, lambda: f64, tol: f64) -> Result<Approx> {
    if lambda < DIRECT_MIN_LAMBDA {
        return Err(Error::accuracy(
            format!("direct oscillatory quadrature is refused below λ = {DIRECT_MIN_LAMBDA}"),
            tol,
            f64::INFINITY,
        ));
    }
    if f.is_zero() || phi.is_zero() {
        return Ok(Approx {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let inv = 1.0 / (lambda * lambda);
    let (xa, xb) = f.effective_support(1e-17);
    let (ta, tb) = phi.effective_support(1e-17);
    doubling(
        |p| {
            let xm = Mesh::uniform(xa, xb, p, ORDER);
            let tm = Mesh::uniform(ta, tb, p, ORDER);
            let fx: Vec<Complex64> = xm.nodes.iter().map(|&x| f.eval(x)).collect();
            let ft: Vec<Complex64> = tm.nodes.iter().map(|&t| phi.eval(t)).collect();
            inv * tensor_sum(&xm, &tm, &fx, &ft, |x, t| Complex64::new(0.0, x * t * inv).exp())
        },
        tol,
        1024,
    )
}

/// Literal `λ⁻² ∫dx ∫₀^a dt f(x) φ(t) e^{ix(t−a)/λ²}` on a tensor mesh.
pub fn direct_simplex_quadrature(f: &GaussPolySum, phi: &PiecewiseC1, a: f64, lambda: f64, tol: f64) -> Result<Approx> {
    if lambda < SIMPLEX_MIN_LAMBDA {
        return Err(Error::accuracy(
            format!("direct simplex quadrature is refused below λ = {SIMPLEX_MIN_LAMBDA}"),
            tol,
            f64::INFINITY,
        ));
    }
    if f.is_zero() {
        return Ok(Approx {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }
    let inv = 1.0 / (lambda * lambda);
    let (xa, xb) = f.effective_support(1e-17);
    let mut cuts: Vec<f64> = phi.pieces().iter().map(|p| p.1).filter(|&c| c < a).collect();
    cuts.push(0.0);
    cuts.push(a);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    doubling(
        |p| {
            let xm = Mesh::uniform(xa, xb, p, ORDER);
            let mut edges = Vec::new();
            for w in cuts.windows(2) {
                for k in 0..p {
                    edges.push(w[0] + (w[1] - w[0]) * k as f64 / p as f64);
                }
            }
            edges.push(a);
            let tm = Mesh::from_edges(&edges, ORDER);
            let fx: Vec<Complex64> = xm.nodes.iter().map(|&x| f.eval(x)).collect();
            let ft: Vec<Complex64> = tm.nodes.iter().map(|&t| phi.eval(t)).collect();
            inv * tensor_sum(&xm, &tm, &fx, &ft, |x, t| Complex64::new(0.0, x * (t - a) * inv).exp())
        },
        tol,
        1024,
    )
}

/// Physicists' Hermite polynomial `H_n(y)`.
fn hermite(n: usize, y: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * y);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * y * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Gaussian-regularised full-line coefficient at finite `ε`:
/// `((−1)ⁿ/n!) ∫dω ρ(ω) ∫dσ σⁿ e^{−εσ²} e^{iσ(ω−ω₀)}`, the σ-integral done
/// in closed form as `(−i∂_u)ⁿ √(π/ε) e^{−u²/4ε}`.
pub fn regularized_gamma_full_at(profile: &SpectralProfile, omega0: f64, n: usize, eps: f64) -> Complex64 {
    let (lo, hi) = profile.support();
    let reach = (4.0 * eps * 45.0).sqrt();
    let (a, b) = ((omega0 - reach).max(lo), (omega0 + reach).min(hi));
    if b <= a {
        return Complex64::new(0.0, 0.0);
    }
    let mesh = Mesh::uniform(a, b, 64, ORDER);
    let s = (4.0 * eps).sqrt();
    let pre = (std::f64::consts::PI / eps).sqrt() * s.powi(-(n as i32)) * if n % 2 == 0 { 1.0 } else { -1.0 };
    let deriv = |u: f64| {
        let y = u / s;
        pre * hermite(n, y) * (-y * y).exp()
    };
    let mut fact = 1.0;
    for k in 1..=n {
        fact *= k as f64;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let phase = Complex64::new(0.0, -1.0).powu(n as u32);
    let v = mesh.sum(|w| Complex64::new(profile.density(w) * deriv(w - omega0), 0.0));
    phase * v * (sign / fact)
}

/// Damping ladder for the regularised oracles.
pub const REGULARIZATION_LADDER: [f64; 6] = [0.004, 0.002, 0.001, 0.0005, 0.00025, 0.000125];

/// `γ̃ₙ` from the regularised σ-integral, extrapolated to `ε → 0`.
pub fn regularized_gamma_full(profile: &SpectralProfile, omega0: f64, n: usize) -> Result<RichardsonFit> {
    let eps = REGULARIZATION_LADDER;
    let vals: Vec<Complex64> = eps.iter().map(|&e| regularized_gamma_full_at(profile, omega0, n, e)).collect();
    richardson_extract(&eps, &vals, &[0, 1, 2])
}

/// `Z_l(ε)` for `l = 1, 2` with `−i0` replaced by `−iε`, as a tensor
/// Gauss–Legendre sum graded towards the pole.
pub fn damped_z_at(profile: &SpectralProfile, delta: f64, eps: f64) -> Result<[Complex64; 2]> {
    let (lo, hi) = profile.support();
    if lo < 0.0 {
        return Err(Error::Unsupported("ρ must vanish for ω ≤ 0".into()));
    }
    let mut out = [Complex64::new(0.0, 0.0); 2];
    for (l, p) in [delta, -delta].into_iter().enumerate() {
        let mesh = Mesh::graded_with_edge(lo, hi, p, eps, 0.25, profile.has_hard_lower_edge(), 16);
        let rho: Vec<f64> = mesh.nodes.iter().map(|&w| profile.density(w)).collect();
        let inv: Vec<Complex64> = mesh.nodes.iter().map(|&w| Complex64::new(1.0, 0.0) / Complex64::new(w - p, -eps)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for i in 0..mesh.len() {
            let wa = mesh.weights[i] * rho[i];
            if wa == 0.0 {
                continue;
            }
            let a = mesh.nodes[i];
            let mut inner = Complex64::new(0.0, 0.0);
            for j in 0..mesh.len() {
                let wb = mesh.weights[j] * rho[j];
                inner += (inv[i] + inv[j]) * (wb / (a + mesh.nodes[j]));
            }
            total += wa * inv[i] * inner;
        }
        out[l] = total;
    }
    Ok(out)
}

/// Damping ladder for [`damped_z`].
pub const Z_LADDER: [f64; 6] = [0.04, 0.02, 0.01, 0.005, 0.0025, 0.00125];

/// `Z_l` from the damped double integral, extrapolated to `ε → 0`.
pub fn damped_z(profile: &SpectralProfile, delta: f64) -> Result<[RichardsonFit; 2]> {
    let vals: Vec<[Complex64; 2]> = Z_LADDER.iter().map(|&e| damped_z_at(profile, delta, e)).collect::<Result<_>>()?;
    let fit = |l: usize| {
        let v: Vec<Complex64> = vals.iter().map(|z| z[l]).collect();
        richardson_extract(&Z_LADDER, &v, &[0, 1, 2, 3])
    };
    Ok([fit(0)?, fit(1)?])
}
