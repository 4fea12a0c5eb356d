//! The verification suites behind each subcommand.

use multipole_core::coeffs::{self, SpinBosonConstants};
use multipole_core::fock::{self, FockVector, MetricOperator, OneParticleGrid, OneParticleVector};
use multipole_core::funcspace::{corpus, SpectralProfile};
use multipole_core::models::{self, CMatrix, ModelKind, SystemModel};
use multipole_core::oracle::{self, richardson::richardson_extract};
use multipole_core::oscint::{self, convergence_slope, ExpansionReport, LambdaGrid};
use multipole_core::{Complex64, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::config::{build_function, ConfigError, ExpansionSpec, ModelSpec, RunConfig, Theorem};
use crate::output::{cnum, fmt, matrix, num, obj, Csv};

/// Required λ-slope of the deviation between the exact and truncated
/// linear-model amplitudes.
pub const TRUNCATION_SLOPE: f64 = 2.5;

/// Outcome of a suite, ordered by exit-code precedence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    NumericalError,
    ConfigError,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::ConfigError => 2,
            Status::NumericalError => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::ConfigError => "config-error",
            Status::NumericalError => "numerical-error",
        }
    }

    fn verdict(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Debug, Clone)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Capability(_) | Error::Unsupported(_) | Error::Shape(_) | Error::InvalidArgument(_) => Status::ConfigError,
            Error::Accuracy { .. } | Error::InsufficientData(_) | Error::IllConditioned(_) | Error::Truncation { .. } => Status::NumericalError,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Self {
            status: Status::ConfigError,
            message: e.to_string(),
        }
    }
}

/// Result of one suite: a verdict, a JSON document, extra files and
/// one-line summaries for the terminal.
#[derive(Debug, Clone)]
pub struct Section {
    pub name: String,
    pub status: Status,
    pub json: Value,
    pub files: Vec<(String, String)>,
    pub lines: Vec<String>,
}

impl Section {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            status: Status::Pass,
            json: Value::Null,
            files: vec![],
            lines: vec![],
        }
    }

    fn note(&mut self, status: Status, line: String) {
        self.status = self.status.max(status);
        self.lines.push(format!("{:<16} {}", status.label(), line));
    }

    fn failed(name: &str, f: Failure) -> Self {
        let mut s = Self::new(name);
        s.note(f.status, format!("{name}: {}", f.message));
        s.json = obj([("status", Value::String(f.status.label().into())), ("error", Value::String(f.message))]);
        s
    }
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm().max(f64::MIN_POSITIVE)
    }
}

fn report_json(spec: &ExpansionSpec, report: &ExpansionReport, pass: bool) -> Value {
    let slope = report.slope.map(|s| obj([("slope", num(s.slope)), ("halfwidth", num(s.halfwidth)), ("points", Value::from(s.points))]));
    obj([
        ("name", Value::String(spec.name.clone())),
        ("theorem", serde_json::to_value(spec.theorem).expect("enum")),
        ("order", Value::from(spec.order)),
        ("threshold", num(report.threshold)),
        ("band", spec.slope_band.map_or(Value::Null, |[lo, hi]| Value::Array(vec![num(lo), num(hi)]))),
        ("fit", slope.unwrap_or(Value::Null)),
        ("pass", Value::Bool(pass)),
    ])
}

fn one_expansion(spec: &ExpansionSpec, key: &str, tol: f64) -> Result<ExpansionReport, Failure> {
    let grid = spec.grid(key)?;
    let f = build_function(&spec.f, &format!("{key}.f"))?;
    Ok(match spec.theorem {
        Theorem::Fullline => oscint::fullline_report(&f, &build_function(&spec.phi, &format!("{key}.phi"))?, spec.order, &grid, spec.excess, tol)?,
        Theorem::Halfline => oscint::halfline_report(&f, &build_function(&spec.phi, &format!("{key}.phi"))?, spec.order, &grid, spec.excess, tol)?,
        Theorem::Simplex => {
            let (phi, a) = spec.simplex_function(key)?;
            oscint::simplex_report(&f, &phi, a, &grid, spec.simplex_slope, spec.beyond_slope, tol)?
        }
    })
}

/// Expansion runs, optionally restricted to one theorem and order.
pub fn expansion(cfg: &RunConfig, theorem: Option<Theorem>, order: Option<usize>) -> Section {
    let mut sec = Section::new("expansion");
    let mut csv = Csv::new(&["name", "lambda", "integral_re", "integral_im", "sum_re", "sum_im", "residual"]);
    let mut runs = Vec::new();
    for (i, spec) in cfg.expansion.iter().enumerate() {
        if theorem.is_some_and(|t| t != spec.theorem) || order.is_some_and(|n| n != spec.order) {
            continue;
        }
        match one_expansion(spec, &format!("expansion[{i}]"), cfg.tolerances.quad) {
            Ok(report) => {
                let in_band = match (spec.slope_band, report.slope) {
                    (Some([lo, hi]), Some(s)) => s.slope >= lo && s.slope <= hi,
                    (Some(_), None) => false,
                    (None, _) => true,
                };
                let pass = report.pass && in_band;
                for r in &report.rows {
                    csv.row(&[
                        spec.name.clone(),
                        fmt(r.lambda),
                        fmt(r.integral.re),
                        fmt(r.integral.im),
                        fmt(r.sum.re),
                        fmt(r.sum.im),
                        fmt(r.residual),
                    ]);
                }
                let slope = report.slope.map_or("below noise floor".to_string(), |s| format!("slope {}", fmt(s.slope)));
                sec.note(Status::verdict(pass), format!("{} {slope} (threshold {})", spec.name, fmt(report.threshold)));
                runs.push(report_json(spec, &report, pass));
            }
            Err(f) => {
                sec.note(f.status, format!("{}: {}", spec.name, f.message));
                runs.push(obj([("name", Value::String(spec.name.clone())), ("error", Value::String(f.message))]));
            }
        }
    }
    if runs.is_empty() {
        sec.note(Status::ConfigError, "no expansion run matches the selection".into());
    }
    sec.json = obj([("status", Value::String(sec.status.label().into())), ("runs", Value::Array(runs))]);
    sec.files.push(("expansion.csv".into(), csv.finish()));
    sec
}

fn coeffs_inner(cfg: &RunConfig, sec: &mut Section) -> Result<Value, Failure> {
    let profile = cfg.profile.build("profile")?;
    let w0 = cfg.profile.omega0;
    let tol = cfg.tolerances.agreement;
    let g0 = coeffs::gamma_causal(&profile, w0, 0)?;
    let g1 = coeffs::gamma_causal(&profile, w0, 1)?;
    let full: Vec<Complex64> = (0..3).map(|n| coeffs::gamma_full(&profile, w0, n)).collect::<Result<_, _>>()?;
    let mut checks = Vec::new();
    for n in 0..2 {
        let r = coeffs::cross_validate_gamma(&profile, w0, n)?;
        let relative = if r.gap == 0.0 { 0.0 } else { r.gap / r.route1.norm().max(f64::MIN_POSITIVE) };
        let ok = relative <= tol;
        sec.note(Status::verdict(ok), format!("gamma{n} plemelj vs damped relative gap {}", fmt(relative)));
        checks.push(obj([
            ("order", Value::from(n)),
            ("plemelj", cnum(r.route1)),
            ("damped", cnum(r.route2)),
            ("relative_gap", num(relative)),
            ("extrapolation_error", num(r.extrapolation_error)),
            ("pass", Value::Bool(ok)),
        ]));
    }
    Ok(obj([
        ("omega0", num(w0)),
        ("gamma0", cnum(g0)),
        ("gamma1", cnum(g1)),
        ("gamma_full", Value::Array(full.into_iter().map(cnum).collect())),
        ("cross_validation", Value::Array(checks)),
    ]))
}

pub fn coeffs(cfg: &RunConfig) -> Section {
    let mut sec = Section::new("coeffs");
    match coeffs_inner(cfg, &mut sec) {
        Ok(v) => {
            sec.json = obj([("status", Value::String(sec.status.label().into())), ("coefficients", v)]);
            sec
        }
        Err(f) => Section::failed("coeffs", f),
    }
}

fn model_profile(cfg: &RunConfig, spec: &ModelSpec, key: &str) -> Result<(SpectralProfile, f64), Failure> {
    let p = spec.profile.as_ref().unwrap_or(&cfg.profile);
    Ok((p.build(&format!("{key}.profile"))?, p.omega0))
}

/// RK4 of `U' = −γ₀ D⁺D U` against the matrix exponential.
fn u0_check(gamma0: Complex64, d: &CMatrix, t_end: f64) -> f64 {
    let m = d.adjoint() * d;
    let gen = m * (-gamma0);
    let n = d.nrows();
    let ode = models::rk4(|_, u| &gen * u, CMatrix::identity(n, n), t_end, 2000);
    max_abs(&(ode - models::u0_vacuum_with(gamma0, d, t_end).value))
}

fn linear_model(cfg: &RunConfig, spec: &ModelSpec, key: &str, sec: &mut Section, csv: &mut Csv) -> Result<Value, Failure> {
    let (profile, pw0) = model_profile(cfg, spec, key)?;
    let w0 = spec.omega0.unwrap_or(pw0);
    let d = spec.matrix(key)?[(0, 0)];
    let model = SystemModel::linear(d, w0, profile.clone());
    let (g0, g1) = model.gammas()?;
    let tol = cfg.tolerances.agreement;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    let mut slopes = Vec::new();
    for &t in &spec.times {
        let mut devs = Vec::new();
        for &l in &spec.lambdas {
            let abc = models::linear_abc_with(g0, g1, d, &profile, w0, l, t)?;
            let oracle = models::cumulant_oracle(&profile, d, w0, l, t)?;
            let gap = rel(abc.full, oracle);
            let dev = (abc.full - abc.truncated).norm();
            worst = worst.max(gap);
            devs.push(dev);
            csv.row(&[
                "linear".into(),
                fmt(l),
                fmt(t),
                fmt(abc.full.re),
                fmt(abc.full.im),
                fmt(abc.truncated.re),
                fmt(abc.truncated.im),
                fmt(oracle.re),
                fmt(oracle.im),
                fmt(gap),
                fmt(dev),
            ]);
            rows.push(obj([
                ("lambda", num(l)),
                ("t", num(t)),
                ("exact", cnum(abc.full)),
                ("truncated", cnum(abc.truncated)),
                ("cumulant", cnum(oracle)),
                ("relative_gap", num(gap)),
                ("truncation_deviation", num(dev)),
            ]));
        }
        if spec.lambdas.len() >= 4 {
            let grid = LambdaGrid::new(spec.lambdas.clone()).map_err(|e| ConfigError {
                key: format!("{key}.lambdas"),
                message: e.to_string(),
            })?;
            let fit = convergence_slope(&devs, &grid, 100.0 * cfg.tolerances.quad)?;
            let ok = fit.slope >= TRUNCATION_SLOPE;
            sec.note(Status::verdict(ok), format!("linear t={} truncated-form deviation slope {}", fmt(t), fmt(fit.slope)));
            slopes.push(obj([("t", num(t)), ("slope", num(fit.slope)), ("pass", Value::Bool(ok))]));
        }
    }
    sec.note(Status::verdict(worst <= tol), format!("linear ABC vs cumulant worst relative gap {}", fmt(worst)));
    let t_max = spec.times.iter().cloned().fold(0.0, f64::max);
    let u0 = u0_check(g0, model.d(), t_max);
    sec.note(Status::verdict(u0 <= cfg.tolerances.ode), format!("linear vacuum equation RK4 vs exponential {}", fmt(u0)));
    Ok(obj([
        ("kind", Value::String("linear".into())),
        ("gamma0", cnum(g0)),
        ("gamma1", cnum(g1)),
        ("worst_relative_gap", num(worst)),
        ("truncation_slopes", Value::Array(slopes)),
        ("u0_ode_gap", num(u0)),
        ("rows", Value::Array(rows)),
    ]))
}

fn rwa_model(cfg: &RunConfig, spec: &ModelSpec, key: &str, sec: &mut Section) -> Result<Value, Failure> {
    let (profile, pw0) = model_profile(cfg, spec, key)?;
    let w0 = spec.omega0.unwrap_or(pw0);
    let model = SystemModel::rwa_matrix(spec.matrix(key)?, w0, profile)?;
    let (g0, g1) = model.gammas()?;
    let stol = cfg.tolerances.series;
    let mut rows = Vec::new();
    for &t in &spec.times {
        for &l in &spec.lambdas {
            let r = models::rwa_matrix_vacuum_with(g0, g1, model.d(), l, t, stol)?;
            rows.push(obj([
                ("lambda", num(l)),
                ("t", num(t)),
                ("value", matrix(&r.expectation.value)),
                ("terms", Value::from(r.terms)),
                ("tail_bound", num(r.tail_bound)),
            ]));
        }
    }
    sec.note(Status::Pass, format!("rwa series certified on {} points (target {})", rows.len(), fmt(stol)));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..spec.draws {
        let g0 = Complex64::new(rng.gen_range(0.0..2.0), rng.gen_range(-1.0..1.0));
        let g1 = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let d = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let l: f64 = rng.gen_range(0.05..0.3);
        let t: f64 = rng.gen_range(0.0..2.0);
        let r = models::rwa_matrix_vacuum_with(g0, g1, &CMatrix::from_element(1, 1, d), l, t, stol)?;
        let d2 = d.norm_sqr();
        let expect = (-g0 * t * d2).exp() * (1.0 + l * l * g1 * d2);
        worst = worst.max(rel(r.expectation.value[(0, 0)], expect));
    }
    let ok = worst <= cfg.tolerances.algebra;
    sec.note(Status::verdict(ok), format!("rwa scalar reduction over {} draws, worst relative gap {}", spec.draws, fmt(worst)));
    let t_max = spec.times.iter().cloned().fold(0.0, f64::max);
    let u0 = u0_check(g0, model.d(), t_max);
    sec.note(Status::verdict(u0 <= cfg.tolerances.ode), format!("rwa vacuum equation RK4 vs exponential {}", fmt(u0)));
    let u1 = models::u1_vacuum(&model, t_max);
    Ok(obj([
        ("kind", Value::String("rwa_matrix".into())),
        ("gamma0", cnum(g0)),
        ("gamma1", cnum(g1)),
        ("scalar_reduction_worst", num(worst)),
        ("u0_ode_gap", num(u0)),
        ("u1", matrix(&u1.value)),
        ("rows", Value::Array(rows)),
    ]))
}

fn constants_json(k: &SpinBosonConstants) -> Value {
    let pair = |v: [Complex64; 2]| Value::Array(v.iter().map(|z| cnum(*z)).collect());
    obj([("delta", num(k.delta)), ("a", pair(k.a)), ("b", pair(k.b)), ("c", pair(k.c)), ("z", pair(k.z))])
}

fn spin_boson_model(cfg: &RunConfig, spec: &ModelSpec, key: &str, sec: &mut Section) -> Result<Value, Failure> {
    let (profile, _) = model_profile(cfg, spec, key)?;
    let delta = spec.delta.expect("validated");
    let model = SystemModel::spin_boson(delta, profile.clone())?;
    let d = model.d();
    let dp = model.d_plus();
    let id = CMatrix::identity(2, 2);
    let p = d * dp;
    let q = dp * d;
    let zero = CMatrix::zeros(2, 2);
    let algebra = (d * d) == zero && (dp * dp) == zero && (&p * &p) == p && (&p + &q) == id;
    sec.note(Status::verdict(algebra), "spin-boson D algebra exact".into());
    let k = coeffs::spinboson_constants(&profile, delta)?;
    let traj = models::spinboson_correction_trajectory(&k, spec.ode_horizon, spec.ode_step)?;
    let mut ode_gap: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let stride = (traj.len() / 50).max(1);
    for (i, state) in traj.iter().enumerate() {
        let closed = models::spinboson_correction_closed(&k, state.t);
        ode_gap = ode_gap.max(max_abs(&(&state.value - &closed.value)));
        if i % stride == 0 {
            let r = models::spinboson_correction_closed_derivative(&k, state.t) - models::spinboson_rhs(&k, state.t, &closed.value);
            residual = residual.max(max_abs(&r));
        }
    }
    sec.note(Status::verdict(ode_gap <= cfg.tolerances.ode), format!("spin-boson RK4 vs closed form {}", fmt(ode_gap)));
    let alg = cfg.tolerances.algebra.min(1e-12);
    sec.note(Status::verdict(residual <= alg), format!("spin-boson closed-form ODE residual {}", fmt(residual)));
    let mut assembly: f64 = 0.0;
    let mut rows = Vec::new();
    for &t in &spec.times {
        for &l in &spec.lambdas {
            let v = models::spinboson_vacuum(&k, l, t);
            let parts = models::spinboson_u0(&k, t).value + models::spinboson_correction_closed(&k, t).value * Complex64::new(l * l, 0.0);
            assembly = assembly.max(max_abs(&(&v.value - parts)));
            rows.push(obj([("lambda", num(l)), ("t", num(t)), ("value", matrix(&v.value))]));
        }
    }
    sec.note(Status::verdict(assembly <= alg), format!("spin-boson assembled vacuum expectation {}", fmt(assembly)));
    let start = models::spinboson_u0(&k, 0.0).value == id;
    sec.note(Status::verdict(start), "spin-boson zeroth order is the identity at t=0".into());
    Ok(obj([
        ("kind", Value::String("spin_boson".into())),
        ("constants", constants_json(&k)),
        ("d_algebra_exact", Value::Bool(algebra)),
        ("ode_gap", num(ode_gap)),
        ("ode_residual", num(residual)),
        ("assembly_gap", num(assembly)),
        ("u0_identity", Value::Bool(start)),
        ("rows", Value::Array(rows)),
    ]))
}

pub fn model(cfg: &RunConfig) -> Section {
    let mut sec = Section::new("model");
    let mut csv = Csv::new(&["model", "lambda", "t", "exact_re", "exact_im", "truncated_re", "truncated_im", "cumulant_re", "cumulant_im", "relative_gap", "deviation"]);
    let mut out = Vec::new();
    for (i, spec) in cfg.model.iter().enumerate() {
        let key = format!("model[{i}]");
        let r = match spec.kind {
            ModelKind::Linear => linear_model(cfg, spec, &key, &mut sec, &mut csv),
            ModelKind::RwaMatrix => rwa_model(cfg, spec, &key, &mut sec),
            ModelKind::SpinBoson => spin_boson_model(cfg, spec, &key, &mut sec),
        };
        match r {
            Ok(v) => out.push(v),
            Err(f) => {
                sec.note(f.status, format!("{key}: {}", f.message));
                out.push(obj([("error", Value::String(f.message))]));
            }
        }
    }
    sec.json = obj([("status", Value::String(sec.status.label().into())), ("models", Value::Array(out))]);
    sec.files.push(("model_linear.csv".into(), csv.finish()));
    sec
}

fn random_vector(grid: OneParticleGrid, rng: &mut ChaCha8Rng) -> Result<OneParticleVector, Failure> {
    let amps: Vec<Complex64> = (0..grid.size())
        .map(|j| {
            let env = (-grid.point(j).powi(2) / 16.0).exp();
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * env
        })
        .collect();
    let v = OneParticleVector::new(grid, amps)?;
    let norm = fock::hilbert_inner(&v, &v)?.re.sqrt();
    Ok(OneParticleVector::new(grid, v.amplitudes().iter().map(|a| a / norm).collect())?)
}

fn random_fock(grid: OneParticleGrid, m: usize, top: usize, rng: &mut ChaCha8Rng) -> Result<FockVector, Failure> {
    let v = FockVector::from_fn(grid, m, top, |_, j| {
        let env = (-j.iter().map(|&i| grid.point(i).powi(2)).sum::<f64>() / 16.0).exp();
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * env
    })?;
    let n = v.hilbert_norm();
    Ok(FockVector::zero(grid, m).axpy(Complex64::new(1.0 / n, 0.0), &v)?)
}

fn fock_inner(cfg: &RunConfig, sec: &mut Section) -> Result<Value, Failure> {
    let fs = &cfg.fock;
    let grid = OneParticleGrid::new(fs.grid_size, fs.half_width)?;
    let m = fs.truncation;
    let alg = cfg.tolerances.algebra;
    let eta = MetricOperator::new(&grid);
    let funcs = corpus::test_functions();
    let vectors: Vec<OneParticleVector> = funcs.iter().map(|(_, f)| OneParticleVector::from_function(grid, f)).collect();
    let mut eta_ok = true;
    for v in &vectors {
        eta_ok &= eta.squares_to_identity(v)?;
    }
    let mut closed: f64 = 0.0;
    for (a, va) in funcs.iter().zip(&vectors) {
        for (b, vb) in funcs.iter().zip(&vectors) {
            let grid_value = fock::indefinite_inner(va, vb)?;
            closed = closed.max((grid_value - fock::indefinite_closed_form(&a.1, &b.1)).norm());
        }
    }
    let target = (std::f64::consts::PI / 2.0).sqrt();
    let wp = OneParticleVector::from_function(grid, &corpus::witness_plus());
    let wm = OneParticleVector::from_function(grid, &corpus::witness_minus());
    let plus = fock::indefinite_inner(&wp, &wp)?;
    let minus = fock::indefinite_inner(&wm, &wm)?;
    let witness_ok = (plus - target).norm() <= 1e-6 && (minus + target).norm() <= 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(fs.seed);
    let (mut ccr, mut adj): (f64, f64) = (0.0, 0.0);
    for _ in 0..fs.draws {
        let f = random_vector(grid, &mut rng)?;
        let g = random_vector(grid, &mut rng)?;
        eta_ok &= eta.squares_to_identity(&f)?;
        let phi = random_fock(grid, m, m - 1, &mut rng)?;
        ccr = ccr.max(fock::ccr_defect(&f, &g, &phi)?);
        let chi = random_fock(grid, m, m, &mut rng)?;
        let psi = random_fock(grid, m, m - 1, &mut rng)?;
        adj = adj.max(fock::adjoint_defect(&f, &chi, &psi)?);
    }
    sec.note(Status::verdict(eta_ok), "eta squared is the identity".into());
    sec.note(Status::verdict(ccr <= alg), format!("CCR defect over {} draws at M={m}: {}", fs.draws, fmt(ccr)));
    sec.note(Status::verdict(adj <= alg), format!("adjointness defect over {} draws: {}", fs.draws, fmt(adj)));
    sec.note(Status::verdict(witness_ok), format!("indefiniteness witnesses {} and {}", fmt(plus.re), fmt(minus.re)));
    sec.note(Status::verdict(closed <= cfg.tolerances.agreement), format!("grid vs closed-form pairing {}", fmt(closed)));
    Ok(obj([
        ("grid_size", Value::from(fs.grid_size)),
        ("half_width", num(fs.half_width)),
        ("truncation", Value::from(m)),
        ("eta_squared_identity", Value::Bool(eta_ok)),
        ("ccr_defect", num(ccr)),
        ("adjoint_defect", num(adj)),
        ("witness_plus", cnum(plus)),
        ("witness_minus", cnum(minus)),
        ("closed_form_gap", num(closed)),
    ]))
}

pub fn fock(cfg: &RunConfig) -> Section {
    let mut sec = Section::new("fock");
    match fock_inner(cfg, &mut sec) {
        Ok(v) => {
            sec.json = obj([("status", Value::String(sec.status.label().into())), ("fock", v)]);
            sec
        }
        Err(f) => Section::failed("fock", f),
    }
}

fn multipole_inner(cfg: &RunConfig, sec: &mut Section) -> Result<Value, Failure> {
    let ms = &cfg.multipole;
    let phi = build_function(&ms.phi, "multipole.phi")?;
    let psi = build_function(&ms.psi, "multipole.psi")?;
    let rho = build_function(&ms.rho, "multipole.rho")?;
    let profile = SpectralProfile::synthetic(rho.clone());
    let values: Vec<Complex64> = ms
        .lambdas
        .iter()
        .map(|&l| oracle::multipole_closed_form(&phi, &psi, &rho, ms.omega0, l))
        .collect::<Result<_, _>>()?;
    let powers: Vec<i32> = (1..=ms.powers as i32).map(|k| 2 * k).collect();
    let fit = richardson_extract(&ms.lambdas, &values, &powers)?;
    let mut terms = Vec::new();
    for n in 0..=ms.max_order {
        let formula = models::multipole_pairing_term(n, &phi, &psi, &profile, ms.omega0)?;
        let extracted = fit.coefficient(2 * (n as i32 + 1)).expect("power fitted");
        let gap = rel(extracted, formula);
        let ok = gap <= cfg.tolerances.multipole;
        sec.note(Status::verdict(ok), format!("multipole n={n} extracted vs pairing formula relative gap {}", fmt(gap)));
        terms.push(obj([
            ("order", Value::from(n)),
            ("extracted", cnum(extracted)),
            ("formula", cnum(formula)),
            ("relative_gap", num(gap)),
            ("pass", Value::Bool(ok)),
        ]));
    }
    Ok(obj([("condition", num(fit.condition)), ("residual", num(fit.residual)), ("terms", Value::Array(terms))]))
}

pub fn multipole(cfg: &RunConfig) -> Section {
    let mut sec = Section::new("multipole");
    match multipole_inner(cfg, &mut sec) {
        Ok(v) => {
            sec.json = obj([("status", Value::String(sec.status.label().into())), ("multipole", v)]);
            sec
        }
        Err(f) => Section::failed("multipole", f),
    }
}
