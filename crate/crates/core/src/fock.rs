//! Indefinite-metric one-particle space and its truncated Boson Fock space.
//!
//! Functions are represented by their Fourier amplitudes
//! `f̂(τ) = ∫ e^{−iτt} f(t) dt` on the midpoint grid
//! `τⱼ = −T + (j + ½)Δτ`, `Δτ = 2T/n`, which never contains `τ = 0`.
//! With `wⱼ = τⱼΔτ/2π` the forms are diagonal:
//!
//! * indefinite: `⟨f,g⟩ = Σ wⱼ conj f̂ⱼ ĝⱼ`, the discretisation of
//!   `i∫ conj f'(t) g(t) dt`,
//! * Hilbert: `(f,g) = Σ |wⱼ| conj f̂ⱼ ĝⱼ`,
//! * metric: `η = sign(τⱼ)`, so `⟨f,g⟩ = (f, ηg)` and `η² = 1`.
//!
//! The `n`-particle component of a [`FockVector`] is a symmetric function of
//! `n` grid indices, stored once per sorted multi-index.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::GaussPolySum;

pub const DEFAULT_GRID_SIZE: usize = 64;
pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_TRUNCATION: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneParticleGrid {
    size: usize,
    half_width: f64,
}

impl Default for OneParticleGrid {
    fn default() -> Self {
        Self {
            size: DEFAULT_GRID_SIZE,
            half_width: DEFAULT_HALF_WIDTH,
        }
    }
}

impl OneParticleGrid {
    pub fn new(size: usize, half_width: f64) -> Result<Self> {
        if size < 2 || size % 2 != 0 {
            return Err(Error::InvalidArgument(format!("grid size must be even and at least 2, got {size}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid half-width must be positive, got {half_width}")));
        }
        Ok(Self { size, half_width })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.size as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.size).map(|j| self.point(j)).collect()
    }

    /// `τⱼΔτ/2π`
    pub fn indefinite_weight(&self, j: usize) -> f64 {
        self.point(j) * self.step() / (2.0 * PI)
    }

    /// `|τⱼ|Δτ/2π`
    pub fn hilbert_weight(&self, j: usize) -> f64 {
        self.indefinite_weight(j).abs()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!("grid mismatch: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneParticleVector {
    grid: OneParticleGrid,
    amplitudes: Vec<Complex64>,
}

impl OneParticleVector {
    pub fn new(grid: OneParticleGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.size {
            return Err(Error::Shape(format!("{} amplitudes on a grid of {}", amplitudes.len(), grid.size)));
        }
        Ok(Self { grid, amplitudes })
    }

    pub fn zero(grid: OneParticleGrid) -> Self {
        Self {
            grid,
            amplitudes: vec![Complex64::new(0.0, 0.0); grid.size],
        }
    }

    /// Samples `f̂(τ) = ∫ e^{−iτt} f(t) dt` from the closed-form transform.
    pub fn from_function(grid: OneParticleGrid, f: &GaussPolySum) -> Self {
        let ft = f.fourier();
        Self {
            grid,
            amplitudes: (0..grid.size).map(|j| ft.eval(-grid.point(j))).collect(),
        }
    }

    pub fn grid(&self) -> &OneParticleGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// `i ∫ conj f'(t) g(t) dt` in closed form.
pub fn indefinite_closed_form(f: &GaussPolySum, g: &GaussPolySum) -> Complex64 {
    f.derivative().conj().mul(g).integral() * Complex64::new(0.0, 1.0)
}

pub fn indefinite_inner(f: &OneParticleVector, g: &OneParticleVector) -> Result<Complex64> {
    f.grid.check_same(&g.grid)?;
    Ok((0..f.grid.size).map(|j| f.grid.indefinite_weight(j) * f.amplitudes[j].conj() * g.amplitudes[j]).sum())
}

pub fn hilbert_inner(f: &OneParticleVector, g: &OneParticleVector) -> Result<Complex64> {
    f.grid.check_same(&g.grid)?;
    Ok((0..f.grid.size).map(|j| f.grid.hilbert_weight(j) * f.amplitudes[j].conj() * g.amplitudes[j]).sum())
}

/// Diagonal `η = sign(τⱼ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricOperator {
    signs: Vec<f64>,
}

impl MetricOperator {
    pub fn new(grid: &OneParticleGrid) -> Self {
        Self {
            signs: grid.points().iter().map(|t| t.signum()).collect(),
        }
    }

    pub fn signs(&self) -> &[f64] {
        &self.signs
    }

    pub fn apply(&self, f: &OneParticleVector) -> Result<OneParticleVector> {
        if f.amplitudes.len() != self.signs.len() {
            return Err(Error::Shape("metric and vector sizes differ".into()));
        }
        Ok(OneParticleVector {
            grid: f.grid,
            amplitudes: f.amplitudes.iter().zip(&self.signs).map(|(a, s)| a * s).collect(),
        })
    }

    /// True when `η(ηf) = f` holds bit for bit.
    pub fn squares_to_identity(&self, f: &OneParticleVector) -> Result<bool> {
        Ok(self.apply(&self.apply(f)?)?.amplitudes == f.amplitudes)
    }
}

pub fn eta_apply(f: &OneParticleVector) -> OneParticleVector {
    MetricOperator::new(&f.grid).apply(f).expect("metric built on the vector's own grid")
}

/// Ranking of sorted multi-indices `j₀ ≤ … ≤ j_{n−1}` in `[0, size)`:
/// with `kᵢ = jᵢ + i` strictly increasing, `rank = Σ C(kᵢ, i+1)`.
#[derive(Debug, Clone)]
struct Layout {
    size: usize,
    binom: Vec<Vec<usize>>,
}

impl Layout {
    fn new(size: usize, max_level: usize) -> Self {
        let rows = size + max_level + 2;
        let cols = max_level + 2;
        let mut binom = vec![vec![0usize; cols]; rows];
        for a in 0..rows {
            binom[a][0] = 1;
            for b in 1..cols.min(a + 1) {
                binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
            }
        }
        Self { size, binom }
    }

    fn level_len(&self, n: usize) -> usize {
        self.binom[self.size + n - 1 + usize::from(n == 0)][n]
    }

    fn rank(&self, sorted: &[usize]) -> usize {
        sorted.iter().enumerate().map(|(i, &j)| self.binom[j + i][i + 1]).sum()
    }

    /// All sorted multi-indices of length `n` in rank order.
    fn for_each<F: FnMut(usize, &[usize])>(&self, n: usize, mut f: F) {
        if n == 0 {
            f(0, &[]);
            return;
        }
        let top = self.size + n - 1;
        let mut k: Vec<usize> = (0..n).collect();
        let mut j = vec![0usize; n];
        let mut r = 0;
        loop {
            for i in 0..n {
                j[i] = k[i] - i;
            }
            f(r, &j);
            r += 1;
            let mut i = 0;
            loop {
                let limit = if i + 1 < n { k[i + 1] } else { top };
                if k[i] + 1 < limit {
                    k[i] += 1;
                    for (l, kl) in k.iter_mut().enumerate().take(i) {
                        *kl = l;
                    }
                    break;
                }
                i += 1;
                if i == n {
                    return;
                }
            }
        }
    }

    /// `n! / Π mₖ!` for a sorted multi-index.
    fn multiplicity(sorted: &[usize]) -> f64 {
        let mut m = 1.0;
        let mut run = 1.0;
        for i in 1..=sorted.len() {
            m *= i as f64;
            if i < sorted.len() && sorted[i] == sorted[i - 1] {
                run += 1.0;
                m /= run;
            } else {
                run = 1.0;
            }
        }
        m
    }
}

/// Truncated Fock vector: components for `n = 0..=M`.
#[derive(Debug, Clone)]
pub struct FockVector {
    grid: OneParticleGrid,
    truncation: usize,
    levels: Vec<Vec<Complex64>>,
    layout: Layout,
}

impl PartialEq for FockVector {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.truncation == other.truncation && self.levels == other.levels
    }
}

impl FockVector {
    pub fn vacuum(grid: OneParticleGrid, truncation: usize) -> Self {
        let mut v = Self::zero(grid, truncation);
        v.levels[0][0] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn zero(grid: OneParticleGrid, truncation: usize) -> Self {
        let layout = Layout::new(grid.size, truncation);
        let levels = (0..=truncation).map(|n| vec![Complex64::new(0.0, 0.0); layout.level_len(n)]).collect();
        Self {
            grid,
            truncation,
            levels,
            layout,
        }
    }

    /// Fills levels `0..=max_level` from a symmetric amplitude `a(n, sorted indices)`.
    pub fn from_fn<F>(grid: OneParticleGrid, truncation: usize, max_level: usize, mut a: F) -> Result<Self>
    where
        F: FnMut(usize, &[usize]) -> Complex64,
    {
        if max_level > truncation {
            return Err(Error::Truncation {
                level: max_level,
                max: truncation,
            });
        }
        let mut v = Self::zero(grid, truncation);
        for n in 0..=max_level {
            let level = &mut v.levels[n];
            v.layout.for_each(n, |r, j| level[r] = a(n, j));
        }
        Ok(v)
    }

    pub fn grid(&self) -> &OneParticleGrid {
        &self.grid
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    /// Stored amplitudes of level `n`, one per sorted multi-index.
    pub fn level(&self, n: usize) -> &[Complex64] {
        &self.levels[n]
    }

    /// Amplitude at an arbitrary (unsorted) multi-index.
    pub fn amplitude(&self, indices: &[usize]) -> Complex64 {
        let mut s = indices.to_vec();
        s.sort_unstable();
        self.levels[s.len()][self.layout.rank(&s)]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.truncation != other.truncation {
            return Err(Error::Shape(format!("truncations {} and {}", self.truncation, other.truncation)));
        }
        Ok(())
    }

    pub fn axpy(&self, s: Complex64, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (lo, li) in out.levels.iter_mut().zip(&other.levels) {
            for (a, b) in lo.iter_mut().zip(li) {
                *a += s * b;
            }
        }
        Ok(out)
    }

    fn weighted_inner(&self, other: &Self, w: impl Fn(usize) -> f64) -> Result<Complex64> {
        self.check_compatible(other)?;
        let mut total = Complex64::new(0.0, 0.0);
        for n in 0..=self.truncation {
            let (a, b) = (&self.levels[n], &other.levels[n]);
            self.layout.for_each(n, |r, j| {
                let weight: f64 = j.iter().map(|&i| w(i)).product();
                total += a[r].conj() * b[r] * (weight * Layout::multiplicity(j));
            });
        }
        Ok(total)
    }

    /// `Σₙ (fₙ, η^{⊗n} gₙ)`
    pub fn indefinite_inner(&self, other: &Self) -> Result<Complex64> {
        let grid = self.grid;
        self.weighted_inner(other, |j| grid.indefinite_weight(j))
    }

    pub fn hilbert_inner(&self, other: &Self) -> Result<Complex64> {
        let grid = self.grid;
        self.weighted_inner(other, |j| grid.hilbert_weight(j))
    }

    pub fn hilbert_norm(&self) -> f64 {
        self.hilbert_inner(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
    }
}

/// `(c_f⁺ φ)_{n+1} = √(n+1) Sym f⊗φₙ`.
pub fn create(f: &OneParticleVector, phi: &FockVector) -> Result<FockVector> {
    f.grid.check_same(&phi.grid)?;
    let m = phi.truncation;
    if phi.levels[m].iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
        return Err(Error::Truncation { level: m + 1, max: m });
    }
    let mut out = FockVector::zero(phi.grid, m);
    let mut rest = Vec::with_capacity(m);
    for n in 0..m {
        let src = &phi.levels[n];
        let dst = &mut out.levels[n + 1];
        let norm = 1.0 / ((n + 1) as f64).sqrt();
        phi.layout.for_each(n + 1, |r, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..j.len() {
                rest.clear();
                rest.extend(j.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, &x)| x));
                acc += f.amplitudes[j[i]] * src[phi.layout.rank(&rest)];
            }
            dst[r] = acc * norm;
        });
    }
    Ok(out)
}

/// `(c_f φ)_{n−1}(j₂…jₙ) = √n Σⱼ wⱼ conj f̂ⱼ φₙ(j, j₂…jₙ)`.
pub fn annihilate(f: &OneParticleVector, phi: &FockVector) -> Result<FockVector> {
    f.grid.check_same(&phi.grid)?;
    let m = phi.truncation;
    let coef: Vec<Complex64> = (0..f.grid.size).map(|j| f.grid.indefinite_weight(j) * f.amplitudes[j].conj()).collect();
    let mut out = FockVector::zero(phi.grid, m);
    let mut merged = Vec::with_capacity(m);
    for n in 1..=m {
        let src = &phi.levels[n];
        let dst = &mut out.levels[n - 1];
        let norm = (n as f64).sqrt();
        phi.layout.for_each(n - 1, |r, j| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (x, c) in coef.iter().enumerate() {
                merged.clear();
                let pos = j.partition_point(|&y| y < x);
                merged.extend_from_slice(&j[..pos]);
                merged.push(x);
                merged.extend_from_slice(&j[pos..]);
                acc += c * src[phi.layout.rank(&merged)];
            }
            dst[r] = acc * norm;
        });
    }
    Ok(out)
}

/// Hilbert norm of `(c_f c_g⁺ − c_g⁺ c_f − ⟨f,g⟩) φ`.
pub fn ccr_defect(f: &OneParticleVector, g: &OneParticleVector, phi: &FockVector) -> Result<f64> {
    let lhs = annihilate(f, &create(g, phi)?)?;
    let rhs = create(g, &annihilate(f, phi)?)?;
    let k = indefinite_inner(f, g)?;
    let d = lhs.axpy(Complex64::new(-1.0, 0.0), &rhs)?.axpy(-k, phi)?;
    Ok(d.hilbert_norm())
}

/// `|⟨c_f φ, ψ⟩ − ⟨φ, c_f⁺ ψ⟩|` with the Fock-level indefinite form.
pub fn adjoint_defect(f: &OneParticleVector, phi: &FockVector, psi: &FockVector) -> Result<f64> {
    let left = annihilate(f, phi)?.indefinite_inner(psi)?;
    let right = phi.indefinite_inner(&create(f, psi)?)?;
    Ok((left - right).norm())
}
