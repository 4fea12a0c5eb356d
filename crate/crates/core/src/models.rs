//! Vacuum expectations of the linear, matrix-RWA and spin-boson models.
//!
//! With `M = D⁺D`, `N = D⁺²D²` and the causal coefficients `γ₀, γ₁` of
//! [`crate::coeffs`]:
//!
//! * linear model, scalar `D`:
//!   `⟨U_λ(t/λ²)⟩ = exp(At + λ²B + λ²C(t/λ²))`, `A = −γ₀|D|²`, `B = γ₁|D|²`,
//!   `C(t) = |D|² ∫ ρ(ω) e^{−i(ω−ω₀)t}/(ω−ω₀−i0)² dω`.
//!   This is exact: the interaction is linear in the field, so the vacuum
//!   amplitude is the exponential of the second cumulant
//!   `−λ²|D|² ∫₀^T (T−s) K(s) ds`, `K(s) = ∫ρ e^{−i(ω−ω₀)s}`, `T = t/λ²`,
//!   and doing the `s`-integral under the `ω`-integral gives the three terms
//!   with no extra phase.
//! * matrix RWA model: `e^{−γ₀tM}[1 + λ²γ₁M(1 − γ₀tM)]
//!   − λ²γ₁ Σ_{k≥1} ((−γ₀t)^k/k!) Σ_{p=1}^k M^{p−1} N M^{k−p}`.
//! * normal-ordered equations projected on the vacuum:
//!   `d⟨U₀⟩/dt = −γ₀M⟨U₀⟩` and `d⟨U₁⟩/dt = −γ₀M⟨U₁⟩` with `⟨U₁(0)⟩ = 0`.
//!   The dipole-noise terms of the `U₁` equation carry a creator on the left
//!   or an annihilator on the right and vanish between vacua, so `⟨U₁⟩ ≡ 0`:
//!   the first correction to vacuum expectations is of order λ².
//! * spin-boson model with `P = DD⁺`, `Q = D⁺D`:
//!   `⟨U₀(t)⟩ = e^{iA₁t}P + e^{iA₂t}Q` and the correction `f = ⟨U₂⟩` solves
//!   `f' = (iA₁P + iA₂Q) f − P C₁ e^{iA₁t} − Q C₂ e^{iA₂t}`,
//!   `f(0) = −B₁P − B₂Q`, with solution
//!   `f(t) = −(B₁ + C₁t) e^{iA₁t} P − (B₂ + C₂t) e^{iA₂t} Q`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coeffs::{self, SpinBosonConstants};
use crate::error::{Error, Result};
use crate::funcspace::{GaussPolySum, SpectralProfile};
use crate::oracle::legendre::Mesh;
use crate::quad::{self, Prescription, QuadOptions};

pub type CMatrix = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which model a [`SystemModel`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Linear,
    RwaMatrix,
    SpinBoson,
}

/// System operators together with the field profile.
#[derive(Debug, Clone)]
pub struct SystemModel {
    kind: ModelKind,
    d: CMatrix,
    d_plus: CMatrix,
    /// `ω₀` for the linear and RWA models, `Δ` for the spin-boson model.
    frequency: f64,
    profile: SpectralProfile,
}

/// `½[[1, 1], [−1, −1]]`
pub fn spin_boson_d() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0)])
}

impl SystemModel {
    /// Scalar `D`.
    pub fn linear(d: Complex64, omega0: f64, profile: SpectralProfile) -> Self {
        let m = CMatrix::from_element(1, 1, d);
        Self {
            kind: ModelKind::Linear,
            d_plus: m.adjoint(),
            d: m,
            frequency: omega0,
            profile,
        }
    }

    pub fn rwa_matrix(d: CMatrix, omega0: f64, profile: SpectralProfile) -> Result<Self> {
        Self::with_adjoint(ModelKind::RwaMatrix, d.clone(), d.adjoint(), omega0, profile)
    }

    pub fn spin_boson(delta: f64, profile: SpectralProfile) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidArgument(format!("gap must be positive, got {delta}")));
        }
        let d = spin_boson_d();
        Self::with_adjoint(ModelKind::SpinBoson, d.clone(), d.adjoint(), delta, profile)
    }

    /// Explicit `D⁺`, which must be the conjugate transpose of `D`.
    pub fn with_adjoint(kind: ModelKind, d: CMatrix, d_plus: CMatrix, frequency: f64, profile: SpectralProfile) -> Result<Self> {
        if !d.is_square() || d.shape() != d_plus.shape() {
            return Err(Error::Shape(format!("D is {:?}, D⁺ is {:?}", d.shape(), d_plus.shape())));
        }
        if (&d_plus - d.adjoint()).iter().any(|z| z.norm() > 1e-14 * (1.0 + d.norm())) {
            return Err(Error::InvalidArgument("D⁺ is not the conjugate transpose of D".into()));
        }
        if kind == ModelKind::Linear && d.nrows() != 1 {
            return Err(Error::Shape("the linear model needs a scalar D".into()));
        }
        if kind == ModelKind::SpinBoson && (&d - spin_boson_d()).iter().any(|z| z.norm() > 0.0) {
            return Err(Error::InvalidArgument("the spin-boson model fixes D = ½[[1,1],[−1,−1]]".into()));
        }
        Ok(Self {
            kind,
            d,
            d_plus,
            frequency,
            profile,
        })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }
    pub fn d(&self) -> &CMatrix {
        &self.d
    }
    pub fn d_plus(&self) -> &CMatrix {
        &self.d_plus
    }
    pub fn frequency(&self) -> f64 {
        self.frequency
    }
    pub fn profile(&self) -> &SpectralProfile {
        &self.profile
    }

    /// `D⁺D`
    pub fn m(&self) -> CMatrix {
        &self.d_plus * &self.d
    }

    /// `D⁺²D²`
    pub fn n(&self) -> CMatrix {
        let d2 = &self.d * &self.d;
        let dp2 = &self.d_plus * &self.d_plus;
        dp2 * d2
    }

    /// `(γ₀, γ₁)` at `ω₀`.
    pub fn gammas(&self) -> Result<(Complex64, Complex64)> {
        Ok((
            coeffs::gamma_causal(&self.profile, self.frequency, 0)?,
            coeffs::gamma_causal(&self.profile, self.frequency, 1)?,
        ))
    }

    fn scalar_d(&self) -> Result<Complex64> {
        if self.d.nrows() != 1 {
            return Err(Error::Shape("operation needs a scalar D".into()));
        }
        Ok(self.d[(0, 0)])
    }
}

/// Order in λ represented by a [`VacuumExpectation`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Order {
    Zeroth,
    First,
    /// Coefficient of λ².
    Second,
    /// Value including the λ² correction.
    Corrected,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumExpectation {
    pub value: CMatrix,
    pub order: Order,
    pub t: f64,
}

/// Scaling-and-squaring exponential with the degree-13 Padé approximant:
/// `s = max(0, ⌈log₂(‖A‖₁/θ₁₃)⌉)` squarings, `θ₁₃ = 5.3719…`.
pub fn expm(a: &CMatrix) -> CMatrix {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;
    let n = a.nrows();
    let norm1 = (0..n).map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let s = if norm1 > THETA13 { (norm1 / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a * c(2f64.powi(-s), 0.0);
    let id = CMatrix::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let r = |k: usize| c(B[k], 0.0);
    let u_inner = &a6 * (&a6 * r(13) + &a4 * r(11) + &a2 * r(9)) + &a6 * r(7) + &a4 * r(5) + &a2 * r(3) + &id * r(1);
    let u = &a * u_inner;
    let v = &a6 * (&a6 * r(12) + &a4 * r(10) + &a2 * r(8)) + &a6 * r(6) + &a4 * r(4) + &a2 * r(2) + &id * r(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut x = q.lu().solve(&p).expect("Padé denominator is nonsingular for scaled arguments");
    for _ in 0..s {
        x = &x * &x;
    }
    x
}

fn frob(m: &CMatrix) -> f64 {
    m.norm()
}

/// `C(t) = ∫ ρ(ω) e^{−i(ω−ω₀)t}/(ω−ω₀−i0)² dω` (the `D⁺D` factor excluded).
/// `C(0) = −γ₁`.
pub fn c_of_t(profile: &SpectralProfile, omega0: f64, t: f64) -> Result<Complex64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("t must be nonnegative, got {t}")));
    }
    if profile.is_zero() {
        return Ok(c(0.0, 0.0));
    }
    let (lo, hi) = profile.support();
    let f = |w: f64| profile.density(w) * c(0.0, -(w - omega0) * t).exp();
    let df = |w: f64| c(profile.density_derivative(w), -t * profile.density(w)) * c(0.0, -(w - omega0) * t).exp();
    let mut window = profile.window_scale();
    if t > 0.0 {
        window = window.min(1.0 / t);
    }
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-11,
        max_intervals: 20000,
    };
    Ok(quad::plemelj_second(f, df, omega0, lo, hi, Prescription::MinusI0, window, &opts)?.value)
}

/// Exact and truncated vacuum amplitudes of the linear model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearAbc {
    pub a: Complex64,
    pub b: Complex64,
    /// `|D|² C(t/λ²)`
    pub c: Complex64,
    /// `exp(At + λ²B + λ²C)`
    pub full: Complex64,
    /// `e^{−γ₀t|D|²}(1 + λ²γ₁|D|²)`
    pub truncated: Complex64,
}

/// The exponential formula with precomputed `γ₀, γ₁`.
pub fn linear_abc_with(gamma0: Complex64, gamma1: Complex64, d: Complex64, profile: &SpectralProfile, omega0: f64, lambda: f64, t: f64) -> Result<LinearAbc> {
    let d2 = d.norm_sqr();
    let a = -gamma0 * d2;
    let b = gamma1 * d2;
    let l2 = lambda * lambda;
    let cc = if lambda == 0.0 { c(0.0, 0.0) } else { d2 * c_of_t(profile, omega0, t / l2)? };
    Ok(LinearAbc {
        a,
        b,
        c: cc,
        full: (a * t + l2 * b + l2 * cc).exp(),
        truncated: (a * t).exp() * (1.0 + l2 * b),
    })
}

pub fn linear_abc(model: &SystemModel, lambda: f64, t: f64) -> Result<LinearAbc> {
    let d = model.scalar_d()?;
    let (g0, g1) = model.gammas()?;
    linear_abc_with(g0, g1, d, &model.profile, model.frequency, lambda, t)
}

/// `k_T(u) = ∫₀^T (T − s) e^{−ius} ds`.
pub fn cumulant_kernel(u: f64, big_t: f64) -> Complex64 {
    let x = u * big_t;
    if x.abs() < 0.5 {
        // T² Σ (−ix)^m/(m+2)!
        let mut term = c(0.5, 0.0);
        let mut sum = term;
        for m in 1..40 {
            term = term * c(0.0, -x) / (m as f64 + 2.0);
            sum += term;
            if term.norm() < 1e-18 {
                break;
            }
        }
        sum * big_t * big_t
    } else {
        c(0.0, -big_t / u) + (c(1.0, 0.0) - c(0.0, -x).exp()) / (u * u)
    }
}

/// Independent evaluation of the linear-model amplitude from the second
/// cumulant `−λ²|D|² ∫₀^T (T−s) K(s) ds`, written as
/// `−λ²|D|² ∫ ρ(ω) k_T(ω − ω₀) dω` and summed on a Gauss–Legendre mesh
/// fine enough to resolve the `e^{−i(ω−ω₀)T}` oscillation.
pub fn cumulant_oracle(profile: &SpectralProfile, d: Complex64, omega0: f64, lambda: f64, t: f64) -> Result<Complex64> {
    if !(lambda > 0.0) || t < 0.0 {
        return Err(Error::InvalidArgument("need λ > 0 and t ≥ 0".into()));
    }
    if profile.is_zero() || t == 0.0 {
        return Ok(c(1.0, 0.0));
    }
    let big_t = t / (lambda * lambda);
    let (lo, hi) = profile.support();
    let width = (0.5 / big_t).min(0.25);
    let mut edges: Vec<f64> = vec![lo, hi];
    if profile.has_hard_lower_edge() {
        let mut d = width;
        for _ in 0..40 {
            d *= 0.5;
            edges.push(lo + d);
        }
    }
    edges.sort_by(f64::total_cmp);
    let mut fine = vec![edges[0]];
    for e in edges.windows(2) {
        let k = ((e[1] - e[0]) / width).ceil().max(1.0) as usize;
        for j in 1..=k {
            fine.push(e[0] + (e[1] - e[0]) * j as f64 / k as f64);
        }
    }
    let mesh = Mesh::from_edges(&fine, 20);
    let integral = mesh.sum(|w| profile.density(w) * cumulant_kernel(w - omega0, big_t));
    Ok((-lambda * lambda * d.norm_sqr() * integral).exp())
}

/// Exponent `−λ²|D|² Σⱼ |gⱼ|² k_T(νⱼ)` of the cumulant formula for a field
/// of discrete modes with detunings `νⱼ`.
pub fn cumulant_discrete(couplings: &[Complex64], detunings: &[f64], d: Complex64, lambda: f64, t: f64) -> Complex64 {
    let big_t = t / (lambda * lambda);
    let s: Complex64 = couplings.iter().zip(detunings).map(|(g, &nu)| g.norm_sqr() * cumulant_kernel(nu, big_t)).sum();
    (-lambda * lambda * d.norm_sqr() * s).exp()
}

/// Matrix RWA vacuum expectation with its truncation certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct RwaSeries {
    pub expectation: VacuumExpectation,
    /// Number of series terms summed.
    pub terms: usize,
    /// A-priori bound on the neglected tail (matrix norm).
    pub tail_bound: f64,
}

/// `Σ_{k>K} x^k k m^{k−1} ‖N‖/k! ≤ x ‖N‖ y^K e^y / K!` with `y = x m`.
pub fn rwa_tail_bound(x: f64, m_norm: f64, n_norm: f64, k: usize) -> f64 {
    let y = x * m_norm;
    let mut pow_over_fact = 1.0;
    for j in 1..=k {
        pow_over_fact *= y / j as f64;
    }
    x * n_norm * pow_over_fact * y.exp()
}

/// Maximum number of series terms.
pub const RWA_K_MAX: usize = 200;

pub fn rwa_matrix_vacuum_with(gamma0: Complex64, gamma1: Complex64, d: &CMatrix, lambda: f64, t: f64, series_tol: f64) -> Result<RwaSeries> {
    if !(series_tol > 0.0) {
        return Err(Error::InvalidArgument("series tolerance must be positive".into()));
    }
    let n_dim = d.nrows();
    let id = CMatrix::identity(n_dim, n_dim);
    let dp = d.adjoint();
    let m = &dp * d;
    let nn = (&dp * &dp) * (d * d);
    let l2 = lambda * lambda;
    let g0t = gamma0 * t;
    let e = expm(&(&m * (-g0t)));
    let bracket = &id + &m * (l2 * gamma1) * (&id - &m * g0t);
    let head = &e * bracket;
    let (m_norm, n_norm) = (frob(&m), frob(&nn));
    let x = g0t.norm();
    let pref = (l2 * gamma1).norm();
    let mut series = CMatrix::zeros(n_dim, n_dim);
    let mut s_k = nn.clone();
    let mut m_pow = m.clone();
    let mut coef = c(1.0, 0.0);
    let mut k = 1;
    loop {
        coef = coef * (-g0t) / k as f64;
        let term = &s_k * coef;
        series += &term;
        let scale = frob(&head) + pref * frob(&series);
        let tail = pref * rwa_tail_bound(x, m_norm, n_norm, k);
        if frob(&term) <= series_tol * frob(&series) && tail <= series_tol * scale.max(f64::MIN_POSITIVE) {
            let value = head - &series * (l2 * gamma1);
            return Ok(RwaSeries {
                expectation: VacuumExpectation {
                    value,
                    order: Order::Corrected,
                    t,
                },
                terms: k,
                tail_bound: tail,
            });
        }
        if k >= RWA_K_MAX {
            return Err(Error::accuracy(format!("RWA series after {RWA_K_MAX} terms"), series_tol, tail / scale.max(f64::MIN_POSITIVE)));
        }
        // S_{k+1} = M S_k + N M^k
        s_k = &m * &s_k + &nn * &m_pow;
        m_pow = &m_pow * &m;
        k += 1;
    }
}

pub fn rwa_matrix_vacuum(model: &SystemModel, lambda: f64, t: f64, series_tol: f64) -> Result<RwaSeries> {
    let (g0, g1) = model.gammas()?;
    rwa_matrix_vacuum_with(g0, g1, &model.d, lambda, t, series_tol)
}

/// `exp(−γ₀ t D⁺D)`.
pub fn u0_vacuum_with(gamma0: Complex64, d: &CMatrix, t: f64) -> VacuumExpectation {
    let m = d.adjoint() * d;
    VacuumExpectation {
        value: expm(&(m * (-gamma0 * t))),
        order: Order::Zeroth,
        t,
    }
}

pub fn u0_vacuum(model: &SystemModel, t: f64) -> Result<VacuumExpectation> {
    let (g0, _) = model.gammas()?;
    Ok(u0_vacuum_with(g0, &model.d, t))
}

/// `⟨U₁(t)⟩ = 0`.
pub fn u1_vacuum(model: &SystemModel, t: f64) -> VacuumExpectation {
    let n = model.d.nrows();
    VacuumExpectation {
        value: CMatrix::zeros(n, n),
        order: Order::First,
        t,
    }
}

/// Classic fourth-order Runge–Kutta for `X' = F(t, X)` with `n` equal
/// steps; returns the states at `t = kh`, `k = 0..=n`.
pub fn rk4_trajectory<F>(f: F, x0: CMatrix, t_end: f64, steps: usize) -> Vec<(f64, CMatrix)>
where
    F: Fn(f64, &CMatrix) -> CMatrix,
{
    let h = t_end / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    let mut x = x0;
    out.push((0.0, x.clone()));
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = f(t, &x);
        let k2 = f(t + 0.5 * h, &(&x + &k1 * c(0.5 * h, 0.0)));
        let k3 = f(t + 0.5 * h, &(&x + &k2 * c(0.5 * h, 0.0)));
        let k4 = f(t + h, &(&x + &k3 * c(h, 0.0)));
        x += (k1 + k2 * c(2.0, 0.0) + k3 * c(2.0, 0.0) + k4) * c(h / 6.0, 0.0);
        out.push(((k + 1) as f64 * h, x.clone()));
    }
    out
}

/// Final state of [`rk4_trajectory`].
pub fn rk4<F>(f: F, x0: CMatrix, t_end: f64, steps: usize) -> CMatrix
where
    F: Fn(f64, &CMatrix) -> CMatrix,
{
    rk4_trajectory(f, x0, t_end, steps).pop().expect("trajectory holds the initial state").1
}

fn projectors() -> (CMatrix, CMatrix) {
    let d = spin_boson_d();
    let dp = d.adjoint();
    (&d * &dp, &dp * &d)
}

/// `e^{iA₁t} DD⁺ + e^{iA₂t} D⁺D`.
pub fn spinboson_u0(k: &SpinBosonConstants, t: f64) -> VacuumExpectation {
    let (p, q) = projectors();
    let i = c(0.0, 1.0);
    VacuumExpectation {
        value: p * (i * k.a[0] * t).exp() + q * (i * k.a[1] * t).exp(),
        order: Order::Zeroth,
        t,
    }
}

/// Right-hand side of the correction equation.
pub fn spinboson_rhs(k: &SpinBosonConstants, t: f64, f: &CMatrix) -> CMatrix {
    let (p, q) = projectors();
    let i = c(0.0, 1.0);
    let gen = &p * (i * k.a[0]) + &q * (i * k.a[1]);
    gen * f - p * (k.c[0] * (i * k.a[0] * t).exp()) - q * (k.c[1] * (i * k.a[1] * t).exp())
}

/// `f(0) = −B₁DD⁺ − B₂D⁺D`.
pub fn spinboson_initial(k: &SpinBosonConstants) -> CMatrix {
    let (p, q) = projectors();
    p * (-k.b[0]) + q * (-k.b[1])
}

fn ode_steps(t_end: f64, step: f64) -> Result<usize> {
    if !(step > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidArgument("need step > 0 and t_end ≥ 0".into()));
    }
    Ok(((t_end / step).round() as usize).max(1))
}

/// RK4 solution of the correction equation at `t_end`.
pub fn spinboson_correction_ode(k: &SpinBosonConstants, t_end: f64, step: f64) -> Result<VacuumExpectation> {
    let value = rk4(|t, f| spinboson_rhs(k, t, f), spinboson_initial(k), t_end, ode_steps(t_end, step)?);
    Ok(VacuumExpectation {
        value,
        order: Order::Second,
        t: t_end,
    })
}

/// RK4 states of the correction equation at every step up to `t_end`.
pub fn spinboson_correction_trajectory(k: &SpinBosonConstants, t_end: f64, step: f64) -> Result<Vec<VacuumExpectation>> {
    let traj = rk4_trajectory(|t, f| spinboson_rhs(k, t, f), spinboson_initial(k), t_end, ode_steps(t_end, step)?);
    Ok(traj
        .into_iter()
        .map(|(t, value)| VacuumExpectation {
            value,
            order: Order::Second,
            t,
        })
        .collect())
}

/// `−(B₁ + C₁t) e^{iA₁t} DD⁺ − (B₂ + C₂t) e^{iA₂t} D⁺D`.
pub fn spinboson_correction_closed(k: &SpinBosonConstants, t: f64) -> VacuumExpectation {
    let (p, q) = projectors();
    let i = c(0.0, 1.0);
    VacuumExpectation {
        value: p * (-(k.b[0] + k.c[0] * t) * (i * k.a[0] * t).exp()) + q * (-(k.b[1] + k.c[1] * t) * (i * k.a[1] * t).exp()),
        order: Order::Second,
        t,
    }
}

/// Time derivative of the closed form, used for residual checks.
pub fn spinboson_correction_closed_derivative(k: &SpinBosonConstants, t: f64) -> CMatrix {
    let (p, q) = projectors();
    let i = c(0.0, 1.0);
    let part = |l: usize| (-k.c[l] - i * k.a[l] * (k.b[l] + k.c[l] * t)) * (i * k.a[l] * t).exp();
    p * part(0) + q * part(1)
}

/// `e^{iA₁t}[1 − λ²(B₁+C₁t)] DD⁺ + e^{iA₂t}[1 − λ²(B₂+C₂t)] D⁺D`.
pub fn spinboson_vacuum(k: &SpinBosonConstants, lambda: f64, t: f64) -> VacuumExpectation {
    let (p, q) = projectors();
    let i = c(0.0, 1.0);
    let l2 = lambda * lambda;
    let part = |l: usize| (i * k.a[l] * t).exp() * (1.0 - l2 * (k.b[l] + k.c[l] * t));
    VacuumExpectation {
        value: p * part(0) + q * part(1),
        order: Order::Corrected,
        t,
    }
}

/// Highest multipole order served by [`multipole_pairing_term`].
pub const MAX_MULTIPOLE: usize = 2;

/// Coefficient of `λ^{2(n+1)}` in
/// `∫∫ conj φ(t) ψ(τ) G((τ−t)/λ²) dt dτ`, `G(σ) = ∫ρ(ω) e^{iσ(ω−ω₀)} dω`:
/// `γ̃ₙ ∫∫ conj φ(t) ψ(τ) δ⁽ⁿ⁾(τ − t) = (−1)ⁿ γ̃ₙ ∫ conj φ ψ⁽ⁿ⁾ dt`.
pub fn multipole_pairing_term(n: usize, phi: &GaussPolySum, psi: &GaussPolySum, profile: &SpectralProfile, omega0: f64) -> Result<Complex64> {
    if n > MAX_MULTIPOLE {
        return Err(Error::Capability(format!("multipole order {n} exceeds {MAX_MULTIPOLE}")));
    }
    let gt = coeffs::gamma_full(profile, omega0, n)?;
    let pairing = phi.conj().mul(&psi.nth_derivative(n)).integral();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(gt * pairing * sign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::GaussPoly;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn gauss_profile(w0: f64) -> SpectralProfile {
        SpectralProfile::synthetic(GaussPoly::gaussian(1.0, w0).unwrap().into())
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spin_boson_algebra() {
        let d = spin_boson_d();
        let dp = d.adjoint();
        assert_eq!(max_abs(&(&d * &d)), 0.0);
        assert_eq!(max_abs(&(&dp * &dp)), 0.0);
        let p = &d * &dp;
        assert_eq!(&p * &p, p);
        assert_eq!(&p + &dp * &d, CMatrix::identity(2, 2));
    }

    #[test]
    fn expm_known_values() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&(a * c(7.0, 0.0)));
        assert_abs_diff_eq!(e[(0, 1)].re, 7.0, epsilon = 1e-13);
        let r = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(-20.0, 0.0), c(20.0, 0.0), c(0.0, 0.0)]);
        let e = expm(&r);
        assert_abs_diff_eq!(e[(0, 0)].re, 20f64.cos(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[(1, 0)].re, 20f64.sin(), epsilon = 1e-12);
    }

    #[test]
    fn c_of_t_at_zero_is_minus_gamma1() {
        let p = gauss_profile(2.0);
        let c0 = c_of_t(&p, 2.0, 0.0).unwrap();
        assert_abs_diff_eq!(c0.re, -2.0 * PI.sqrt(), epsilon = 1e-10);
        let c50 = c_of_t(&p, 2.0, 50.0).unwrap();
        assert!(c50.norm() <= 0.05 * c0.norm());
        assert_eq!(c_of_t(&SpectralProfile::zero(), 0.0, 1.0).unwrap().norm(), 0.0);
    }

    #[test]
    fn truncated_linear_example() {
        let p = gauss_profile(2.0);
        let model = SystemModel::linear(c(1.0, 0.0), 2.0, p);
        let v = linear_abc(&model, 0.1, 1.0).unwrap();
        let expect = (-PI).exp() * (1.0 + 0.02 * PI.sqrt());
        assert_abs_diff_eq!(v.truncated.re, expect, epsilon = 1e-10);
        let zero = linear_abc(&model, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(zero.full.re, (-PI).exp(), epsilon = 1e-10);
    }

    #[test]
    fn rwa_scalar_and_nilpotent() {
        let (g0, g1) = (c(1.2, 0.3), c(0.7, -0.4));
        let d = CMatrix::from_element(1, 1, c(0.8, 0.3));
        let r = rwa_matrix_vacuum_with(g0, g1, &d, 0.3, 1.5, 1e-14).unwrap();
        let d2 = d[(0, 0)].norm_sqr();
        let expect = (-g0 * 1.5 * d2).exp() * (1.0 + 0.09 * g1 * d2);
        assert!((r.expectation.value[(0, 0)] - expect).norm() < 1e-12);
        let sb = spin_boson_d();
        let r = rwa_matrix_vacuum_with(g0, g1, &sb, 0.3, 1.5, 1e-14).unwrap();
        let m = sb.adjoint() * &sb;
        let e = expm(&(&m * (-g0 * 1.5)));
        let id = CMatrix::identity(2, 2);
        let head = e * (&id + &m * (0.09 * g1) * (&id - &m * (g0 * 1.5)));
        assert!(max_abs(&(r.expectation.value - head)) < 1e-14);
        let t0 = rwa_matrix_vacuum_with(g0, g1, &sb, 0.3, 0.0, 1e-14).unwrap();
        assert!(max_abs(&(t0.expectation.value - (&id + &m * (0.09 * g1)))) < 1e-15);
    }

    #[test]
    fn spinboson_closed_form_solves_ode() {
        let k = SpinBosonConstants {
            delta: 1.0,
            a: [c(0.0, 0.3), c(0.0, 0.5)],
            b: [c(1.0, 0.0); 2],
            c: [c(1.0, 0.0); 2],
            z: [c(0.0, 0.0); 2],
        };
        let ode = spinboson_correction_ode(&k, 5.0, 1e-3).unwrap();
        let closed = spinboson_correction_closed(&k, 5.0);
        assert!(max_abs(&(ode.value - closed.value)) < 1e-8);
        for &t in &[0.0, 0.7, 2.3, 4.9] {
            let res = spinboson_correction_closed_derivative(&k, t) - spinboson_rhs(&k, t, &spinboson_correction_closed(&k, t).value);
            assert!(max_abs(&res) < 1e-12);
        }
        assert_eq!(spinboson_u0(&k, 0.0).value, CMatrix::identity(2, 2));
    }

    #[test]
    fn multipole_order_cap() {
        let f: GaussPolySum = GaussPoly::gaussian(1.0, 0.0).unwrap().into();
        assert!(matches!(multipole_pairing_term(3, &f, &f, &gauss_profile(1.0), 1.0), Err(Error::Capability(_))));
    }

    #[test]
    fn cumulant_kernel_branches_agree() {
        for &tt in &[1.0, 10.0] {
            let u = 0.5 / tt;
            let below = cumulant_kernel(u * (1.0 - 1e-9), tt);
            let above = cumulant_kernel(u * (1.0 + 1e-9), tt);
            assert!((below - above).norm() < 1e-8 * tt * tt);
        }
    }
}
