//! Run configuration. Every section has defaults; unknown keys are errors.

use std::path::PathBuf;

use multipole_core::funcspace::{Dispersion, GaussPoly, GaussPolySum, PiecewiseC1, SpectralProfile};
use multipole_core::models::{CMatrix, ModelKind};
use multipole_core::oscint::LambdaGrid;
use multipole_core::Complex64;
use serde::{Deserialize, Serialize};

/// A configuration problem, with the dotted key at fault.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn bad(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError {
        key: key.into(),
        message: message.into(),
    }
}

/// One Gaussian×polynomial term `q(x−c) e^{−a(x−c)²} e^{isx}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    /// Coefficients of `q` in powers of `x − c`, as `[re, im]` pairs.
    #[serde(default = "unit_coeffs")]
    pub coeffs: Vec<[f64; 2]>,
    pub width: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub freq: f64,
}

fn unit_coeffs() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0]]
}

impl TermSpec {
    pub fn gaussian(width: f64, center: f64) -> Self {
        Self {
            coeffs: unit_coeffs(),
            width,
            center,
            freq: 0.0,
        }
    }

    pub fn poly(coeffs: &[[f64; 2]], width: f64, center: f64) -> Self {
        Self {
            coeffs: coeffs.to_vec(),
            width,
            center,
            freq: 0.0,
        }
    }
}

pub fn build_function(terms: &[TermSpec], key: &str) -> Result<GaussPolySum, ConfigError> {
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let q = t.coeffs.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        let term = GaussPoly::modulated(q, t.width, t.center, t.freq).map_err(|e| bad(format!("{key}[{i}]"), e.to_string()))?;
        out.push(term);
    }
    Ok(GaussPolySum::new(out))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Synthetic,
    Radial,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionKind {
    Massless,
    Massive,
}

/// Spectral density: a synthetic `ρ`, a radial reduction, or `ρ ≡ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    /// Resonance frequency used by the coefficient and model runs.
    pub omega0: f64,
    /// Synthetic `ρ` terms.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermSpec>,
    /// Synthetic `ρ` is cut to `ω ≥ lower` when set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dispersion: Option<DispersionKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub one_ray: bool,
    /// Radial formfactor terms.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formfactor: Vec<TermSpec>,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self::synthetic(vec![TermSpec::gaussian(1.0, 2.0)], None, 2.0)
    }
}

impl ProfileSpec {
    pub fn synthetic(terms: Vec<TermSpec>, lower: Option<f64>, omega0: f64) -> Self {
        Self {
            kind: ProfileKind::Synthetic,
            omega0,
            terms,
            lower,
            dispersion: None,
            mass: None,
            dim: None,
            one_ray: false,
            formfactor: vec![],
        }
    }

    pub fn build(&self, key: &str) -> Result<SpectralProfile, ConfigError> {
        if !self.omega0.is_finite() {
            return Err(bad(format!("{key}.omega0"), "must be finite"));
        }
        match self.kind {
            ProfileKind::Zero => Ok(SpectralProfile::zero()),
            ProfileKind::Synthetic => {
                if self.terms.is_empty() {
                    return Err(bad(format!("{key}.terms"), "a synthetic profile needs at least one term"));
                }
                let rho = build_function(&self.terms, &format!("{key}.terms"))?;
                Ok(match self.lower {
                    Some(l) => SpectralProfile::synthetic_above(rho, l),
                    None => SpectralProfile::synthetic(rho),
                })
            }
            ProfileKind::Radial => {
                let dispersion = match self.dispersion {
                    Some(DispersionKind::Massless) => Dispersion::Massless,
                    Some(DispersionKind::Massive) => Dispersion::Massive {
                        mass: self.mass.ok_or_else(|| bad(format!("{key}.mass"), "required for a massive dispersion"))?,
                    },
                    None => return Err(bad(format!("{key}.dispersion"), "required for a radial profile")),
                };
                let dim = self.dim.ok_or_else(|| bad(format!("{key}.dim"), "required for a radial profile"))?;
                if self.formfactor.is_empty() {
                    return Err(bad(format!("{key}.formfactor"), "a radial profile needs at least one term"));
                }
                let g = build_function(&self.formfactor, &format!("{key}.formfactor"))?;
                SpectralProfile::radial_reduce(dispersion, &g, dim, self.one_ray).map_err(|e| bad(key, e.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    Fullline,
    Simplex,
    Halfline,
}

/// A piece `φᵢ Θ_[0,aᵢ]` of a simplex test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub terms: Vec<TermSpec>,
    pub cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSpec {
    pub name: String,
    pub theorem: Theorem,
    /// Expansion order `N` (full and half line).
    #[serde(default)]
    pub order: usize,
    pub f: Vec<TermSpec>,
    /// Test function for the full and half line.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub phi: Vec<TermSpec>,
    /// Pieces for the simplex.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceSpec>,
    /// Simplex endpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default = "standard_lambdas")]
    pub lambdas: Vec<f64>,
    /// Pass when the fitted slope exceeds `2N + excess` (full and half line).
    #[serde(default = "default_excess")]
    pub excess: f64,
    /// Pass thresholds for the simplex inside and beyond the support.
    #[serde(default = "default_simplex_slope")]
    pub simplex_slope: f64,
    #[serde(default = "default_beyond_slope")]
    pub beyond_slope: f64,
    /// Optional acceptance band `[lo, hi]` on the fitted slope.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope_band: Option<[f64; 2]>,
}

fn standard_lambdas() -> Vec<f64> {
    LambdaGrid::standard().values().to_vec()
}
fn default_excess() -> f64 {
    0.5
}
fn default_simplex_slope() -> f64 {
    2.5
}
fn default_beyond_slope() -> f64 {
    1.8
}

impl ExpansionSpec {
    fn base(name: &str, theorem: Theorem, order: usize) -> Self {
        Self {
            name: name.into(),
            theorem,
            order,
            f: vec![TermSpec::gaussian(1.0, 0.3)],
            phi: vec![],
            pieces: vec![],
            a: None,
            lambdas: standard_lambdas(),
            excess: default_excess(),
            simplex_slope: default_simplex_slope(),
            beyond_slope: default_beyond_slope(),
            slope_band: None,
        }
    }

    fn fullline(order: usize) -> Self {
        let n = order as f64;
        Self {
            phi: vec![TermSpec::gaussian(1.0, -0.4)],
            slope_band: Some([2.0 * n + 1.7, 2.0 * n + 2.3]),
            ..Self::base(&format!("fullline_n{order}"), Theorem::Fullline, order)
        }
    }

    fn simplex(name: &str, a: f64) -> Self {
        Self {
            pieces: vec![PieceSpec {
                terms: vec![TermSpec::gaussian(1.0, 0.5)],
                cutoff: 1.0,
            }],
            a: Some(a),
            ..Self::base(name, Theorem::Simplex, 0)
        }
    }

    fn halfline(order: usize) -> Self {
        Self {
            phi: vec![TermSpec::gaussian(1.0, -0.4)],
            ..Self::base(&format!("halfline_n{order}"), Theorem::Halfline, order)
        }
    }

    pub fn default_suite() -> Vec<Self> {
        vec![
            Self::fullline(0),
            Self::fullline(1),
            Self::fullline(2),
            Self::simplex("simplex_inside", 0.5),
            Self::simplex("simplex_edge", 1.0),
            Self {
                // a narrow f keeps the integral above the noise floor across the grid
                f: vec![TermSpec::gaussian(40.0, 0.0)],
                ..Self::simplex("simplex_beyond", 1.2)
            },
            Self::halfline(0),
            Self::halfline(1),
        ]
    }

    pub fn grid(&self, key: &str) -> Result<LambdaGrid, ConfigError> {
        LambdaGrid::new(self.lambdas.clone()).map_err(|e| bad(format!("{key}.lambdas"), e.to_string()))
    }

    pub fn simplex_function(&self, key: &str) -> Result<(PiecewiseC1, f64), ConfigError> {
        let a = self.a.ok_or_else(|| bad(format!("{key}.a"), "required for the simplex"))?;
        if self.pieces.is_empty() {
            return Err(bad(format!("{key}.pieces"), "required for the simplex"));
        }
        let mut pieces = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            pieces.push((build_function(&p.terms, &format!("{key}.pieces[{i}].terms"))?, p.cutoff));
        }
        let phi = PiecewiseC1::new(pieces).map_err(|e| bad(format!("{key}.pieces"), e.to_string()))?;
        Ok((phi, a))
    }
}

/// One model run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Rows of `D` as `[re, im]` pairs (linear and RWA models).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d: Vec<Vec<[f64; 2]>>,
    /// Overrides `profile.omega0` (linear and RWA models).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    /// Gap of the spin-boson model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Overrides the top-level profile for this run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileSpec>,
    #[serde(default = "standard_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_times")]
    pub times: Vec<f64>,
    /// RK4 step and horizon of the spin-boson correction equation.
    #[serde(default = "default_ode_step")]
    pub ode_step: f64,
    #[serde(default = "default_ode_horizon")]
    pub ode_horizon: f64,
    /// Random scalar draws for the RWA reduction check.
    #[serde(default = "default_draws")]
    pub draws: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_times() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn default_ode_step() -> f64 {
    1e-3
}
fn default_ode_horizon() -> f64 {
    5.0
}
fn default_draws() -> usize {
    10
}
fn default_seed() -> u64 {
    20240611
}

impl ModelSpec {
    fn base(kind: ModelKind) -> Self {
        Self {
            kind,
            d: vec![],
            omega0: None,
            delta: None,
            profile: None,
            lambdas: standard_lambdas(),
            times: default_times(),
            ode_step: default_ode_step(),
            ode_horizon: default_ode_horizon(),
            draws: default_draws(),
            seed: default_seed(),
        }
    }

    pub fn default_suite() -> Vec<Self> {
        vec![
            Self {
                d: vec![vec![[1.0, 0.0]]],
                ..Self::base(ModelKind::Linear)
            },
            Self {
                d: vec![vec![[0.0, 0.0], [0.6, 0.2]], vec![[0.3, 0.0], [0.0, 0.0]]],
                ..Self::base(ModelKind::RwaMatrix)
            },
            Self {
                delta: Some(1.5),
                profile: Some(ProfileSpec::synthetic(vec![TermSpec::gaussian(1.0, 2.0)], Some(0.0), 1.5)),
                ..Self::base(ModelKind::SpinBoson)
            },
        ]
    }

    pub fn matrix(&self, key: &str) -> Result<CMatrix, ConfigError> {
        let n = self.d.len();
        if n == 0 {
            return Err(bad(format!("{key}.d"), "required for this model"));
        }
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in self.d.iter().enumerate() {
            if row.len() != n {
                return Err(bad(format!("{key}.d[{i}]"), format!("expected {n} entries, got {}", row.len())));
            }
            data.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
        }
        Ok(CMatrix::from_row_slice(n, n, &data))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSpec {
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default = "default_half_width")]
    pub half_width: f64,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default = "default_fock_draws")]
    pub draws: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_grid_size() -> usize {
    multipole_core::fock::DEFAULT_GRID_SIZE
}
fn default_half_width() -> f64 {
    multipole_core::fock::DEFAULT_HALF_WIDTH
}
fn default_truncation() -> usize {
    multipole_core::fock::DEFAULT_TRUNCATION
}
fn default_fock_draws() -> usize {
    50
}

impl Default for FockSpec {
    fn default() -> Self {
        Self {
            grid_size: default_grid_size(),
            half_width: default_half_width(),
            truncation: default_truncation(),
            draws: default_fock_draws(),
            seed: default_seed(),
        }
    }
}

/// Smeared two-point function and its multipole coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultipoleSpec {
    pub phi: Vec<TermSpec>,
    pub psi: Vec<TermSpec>,
    /// Density `ρ` (Gaussian×polynomial, no cut).
    pub rho: Vec<TermSpec>,
    pub omega0: f64,
    pub lambdas: Vec<f64>,
    /// Fitted powers are `λ², λ⁴, …, λ^{2·powers}`.
    pub powers: usize,
    /// Highest order `n` compared.
    pub max_order: usize,
}

impl Default for MultipoleSpec {
    fn default() -> Self {
        let n = 16;
        Self {
            phi: vec![TermSpec::gaussian(1.0, 0.2)],
            psi: vec![TermSpec::poly(&[[1.0, 0.0], [0.0, 0.5]], 1.0, -0.1)],
            rho: vec![TermSpec::gaussian(1.0, 1.5)],
            omega0: 1.3,
            lambdas: (0..n).map(|i| 0.3 - 0.25 * i as f64 / (n - 1) as f64).collect(),
            powers: 8,
            max_order: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute target of the oscillatory integrals.
    pub quad: f64,
    /// Relative agreement required between independent routes.
    pub agreement: f64,
    /// Relative agreement for the Richardson-extracted multipole terms.
    pub multipole: f64,
    /// Exact-algebra checks (reductions, residuals, defects).
    pub algebra: f64,
    /// RK4 against the closed form.
    pub ode: f64,
    /// Relative truncation target of the RWA series.
    pub series: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad: 1e-12,
            agreement: 1e-6,
            multipole: 1e-4,
            algebra: 1e-10,
            ode: 1e-8,
            series: 1e-14,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default = "ExpansionSpec::default_suite")]
    pub expansion: Vec<ExpansionSpec>,
    #[serde(default = "ModelSpec::default_suite")]
    pub model: Vec<ModelSpec>,
    #[serde(default)]
    pub fock: FockSpec,
    #[serde(default)]
    pub multipole: MultipoleSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: ProfileSpec::default(),
            expansion: ExpansionSpec::default_suite(),
            model: ModelSpec::default_suite(),
            fock: FockSpec::default(),
            multipole: MultipoleSpec::default(),
            tolerances: Tolerances::default(),
            output: OutputSpec::default(),
        }
    }
}

/// Best-effort dotted key from a TOML error message.
fn toml_key(e: &toml::de::Error) -> String {
    let msg = e.message();
    if let Some(rest) = msg.strip_prefix("unknown field `") {
        if let Some(end) = rest.find('`') {
            return rest[..end].to_string();
        }
    }
    if let Some(rest) = msg.strip_prefix("missing field `") {
        if let Some(end) = rest.find('`') {
            return rest[..end].to_string();
        }
    }
    "config".into()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError {
            key: toml_key(&e),
            message: e.to_string().trim_end().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable in TOML")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = &self.tolerances;
        for (k, v) in [
            ("quad", t.quad),
            ("agreement", t.agreement),
            ("multipole", t.multipole),
            ("algebra", t.algebra),
            ("ode", t.ode),
            ("series", t.series),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(format!("tolerances.{k}"), "must be positive"));
            }
        }
        self.profile.build("profile")?;
        for (i, e) in self.expansion.iter().enumerate() {
            let key = format!("expansion[{i}]");
            e.grid(&key)?;
            build_function(&e.f, &format!("{key}.f"))?;
            match e.theorem {
                Theorem::Simplex => {
                    e.simplex_function(&key)?;
                }
                _ => {
                    if e.phi.is_empty() {
                        return Err(bad(format!("{key}.phi"), "required for this theorem"));
                    }
                    build_function(&e.phi, &format!("{key}.phi"))?;
                }
            }
        }
        for (i, m) in self.model.iter().enumerate() {
            let key = format!("model[{i}]");
            if let Some(p) = &m.profile {
                p.build(&format!("{key}.profile"))?;
            }
            match m.kind {
                ModelKind::Linear | ModelKind::RwaMatrix => {
                    let d = m.matrix(&key)?;
                    if m.kind == ModelKind::Linear && d.nrows() != 1 {
                        return Err(bad(format!("{key}.d"), "the linear model needs a 1×1 D"));
                    }
                }
                ModelKind::SpinBoson => {
                    if !m.d.is_empty() {
                        return Err(bad(format!("{key}.d"), "the spin-boson model fixes D"));
                    }
                    if !matches!(m.delta, Some(d) if d > 0.0) {
                        return Err(bad(format!("{key}.delta"), "a positive gap is required"));
                    }
                }
            }
            if m.lambdas.iter().any(|&l| !(l > 0.0)) {
                return Err(bad(format!("{key}.lambdas"), "must be positive"));
            }
            if m.times.iter().any(|&t| !(t >= 0.0)) {
                return Err(bad(format!("{key}.times"), "must be nonnegative"));
            }
            if !(m.ode_step > 0.0) || !(m.ode_horizon >= 0.0) {
                return Err(bad(format!("{key}.ode_step"), "need a positive step and nonnegative horizon"));
            }
        }
        let f = &self.fock;
        multipole_core::fock::OneParticleGrid::new(f.grid_size, f.half_width).map_err(|e| bad("fock.grid_size", e.to_string()))?;
        if f.truncation < 2 {
            return Err(bad("fock.truncation", "must be at least 2"));
        }
        let m = &self.multipole;
        for (k, terms) in [("phi", &m.phi), ("psi", &m.psi), ("rho", &m.rho)] {
            build_function(terms, &format!("multipole.{k}"))?;
        }
        if m.max_order > multipole_core::models::MAX_MULTIPOLE {
            return Err(bad("multipole.max_order", format!("at most {}", multipole_core::models::MAX_MULTIPOLE)));
        }
        if m.powers <= m.max_order {
            return Err(bad("multipole.powers", "must exceed max_order"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        assert_eq!(RunConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn shipped_config_is_default() {
        let text = include_str!("../../../configs/default.toml");
        assert_eq!(RunConfig::parse(text).unwrap(), RunConfig::default());
    }

    #[test]
    fn empty_config_is_default() {
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_is_named() {
        let e = RunConfig::parse("[fock]\ngrid_sise = 10\n").unwrap_err();
        assert_eq!(e.key, "grid_sise");
        let e = RunConfig::parse("[tolerances]\nquad = -1.0\nagreement = 1e-6\nmultipole = 1e-4\nalgebra = 1e-10\node = 1e-8\nseries = 1e-14\n").unwrap_err();
        assert_eq!(e.key, "tolerances.quad");
    }
}
