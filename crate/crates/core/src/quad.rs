//! Adaptive Gauss–Kronrod quadrature for complex integrands, plus the
//! Plemelj splitting used for every `x ∓ i0` boundary value in the crate.
//!
//! Infinite ranges are never integrated directly: callers truncate with an
//! analytic tail bound and pass a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

/// Value of an integral with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        }
    }
}

impl std::ops::Add for Estimate {
    type Output = Estimate;
    fn add(self, rhs: Estimate) -> Estimate {
        Estimate {
            value: self.value + rhs.value,
            error: self.error + rhs.error,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
            // Deterministic tie-break on position.
            .then_with(|| other.a.partial_cmp(&self.a).unwrap_or(Ordering::Equal))
    }
}

fn kronrod21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut resabs = fc.norm() * WGK[10];
    let mut fv = [(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)); 10];
    for (j, x) in XGK.iter().take(10).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv[j] = (f1, f2);
        kron += (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = kron * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[10];
    for (j, (f1, f2)) in fv.iter().enumerate() {
        resasc += ((f1 - mean).norm() + (f2 - mean).norm()) * WGK[j];
    }
    let value = kron * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut err = ((kron - gauss) * half).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        a,
        b,
        value,
        error: err,
    }
}

/// Integrate `f` over `[a, b]` with breakpoints (which may lie outside the
/// interval; those are ignored).
pub fn integrate_with_breaks<F>(f: F, a: f64, b: f64, breaks: &[f64], opts: &QuadOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "quadrature limits must be finite, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(Estimate::zero());
    }
    if a > b {
        let est = integrate_with_breaks(f, b, a, breaks, opts)?;
        return Ok(Estimate {
            value: -est.value,
            error: est.error,
        });
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(a);
    nodes.extend(cuts);
    nodes.push(b);

    let mut heap = BinaryHeap::new();
    for w in nodes.windows(2) {
        heap.push(kronrod21(&f, w[0], w[1]));
    }
    loop {
        let (total, err) = heap
            .iter()
            .fold((Complex64::new(0.0, 0.0), 0.0), |(s, e), p| (s + p.value, e + p.error));
        let target = opts.abs_tol.max(opts.rel_tol * total.norm());
        if err <= target {
            return Ok(Estimate { value: total, error: err });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::accuracy("adaptive quadrature", target, err));
        }
        let worst = heap.pop().expect("non-empty panel heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Interval exhausted at machine resolution.
            heap.push(worst);
            let (total, err) = heap
                .iter()
                .fold((Complex64::new(0.0, 0.0), 0.0), |(s, e), p| (s + p.value, e + p.error));
            let target = opts.abs_tol.max(opts.rel_tol * total.norm());
            return Err(Error::accuracy("adaptive quadrature (interval underflow)", target, err));
        }
        heap.push(kronrod21(&f, worst.a, mid));
        heap.push(kronrod21(&f, mid, worst.b));
    }
}

/// Integrate `f` over the finite interval `[a, b]`.
pub fn integrate<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    integrate_with_breaks(f, a, b, &[], opts)
}

/// Real-valued convenience wrapper.
pub fn integrate_real<F>(f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64,
{
    let est = integrate(|x| Complex64::new(f(x), 0.0), a, b, opts)?;
    Ok((est.value.re, est.error))
}

/// Orientation of the infinitesimal shift in `1/(x - p ∓ i0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prescription {
    /// `1/(x - p - i0) = PV 1/(x - p) + iπ δ(x - p)`
    MinusI0,
    /// `1/(x - p + i0) = PV 1/(x - p) - iπ δ(x - p)`
    PlusI0,
}

impl Prescription {
    fn delta_sign(self) -> f64 {
        match self {
            Prescription::MinusI0 => 1.0,
            Prescription::PlusI0 => -1.0,
        }
    }
}

/// Position of a pole relative to a support interval.
fn classify_pole(pole: f64, lo: f64, hi: f64, window: f64) -> Result<Option<f64>> {
    let guard = 1e-9 * (1.0 + pole.abs());
    if pole < lo - guard || pole > hi + guard {
        return Ok(None);
    }
    if pole - lo <= guard || hi - pole <= guard {
        return Err(Error::Unsupported(format!(
            "pole {pole} lies on the support boundary [{lo}, {hi}]; one-sided principal values are not implemented"
        )));
    }
    let w = window.min(0.5 * (pole - lo)).min(0.5 * (hi - pole));
    Ok(Some(w))
}

/// `∫_lo^hi F(x) / (x - pole ∓ i0) dx` by Plemelj splitting.
///
/// The principal value uses symmetric subtraction on a window centred at the
/// pole (the logarithmic term of a centred window vanishes) and plain
/// quadrature outside it. Poles outside `[lo, hi]` give a regular integral.
pub fn plemelj_first<F>(
    f: F,
    pole: f64,
    lo: f64,
    hi: f64,
    prescription: Prescription,
    window: f64,
    opts: &QuadOptions,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
{
    match classify_pole(pole, lo, hi, window)? {
        None => integrate(|x| f(x) / (x - pole), lo, hi, opts),
        Some(w) => {
            let fp = f(pole);
            let sub = |x: f64| (f(x) - fp) / (x - pole);
            let inner = integrate_with_breaks(sub, pole - w, pole + w, &[pole], opts)?;
            let left = integrate(|x| f(x) / (x - pole), lo, pole - w, opts)?;
            let right = integrate(|x| f(x) / (x - pole), pole + w, hi, opts)?;
            let delta = Complex64::new(0.0, prescription.delta_sign() * PI) * fp;
            Ok(inner + left + right + Estimate { value: delta, error: 0.0 })
        }
    }
}

/// `∫_lo^hi F(x) / (x - pole ∓ i0)² dx`.
///
/// Inside a window around the pole the double pole is integrated by parts
/// onto `F'` (first-order pole, see [`plemelj_first`]); the boundary terms of
/// the window are explicit and the outside is regular.
#[allow(clippy::too_many_arguments)]
pub fn plemelj_second<F, G>(
    f: F,
    df: G,
    pole: f64,
    lo: f64,
    hi: f64,
    prescription: Prescription,
    window: f64,
    opts: &QuadOptions,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64,
    G: Fn(f64) -> Complex64,
{
    match classify_pole(pole, lo, hi, window)? {
        None => integrate(|x| f(x) / ((x - pole) * (x - pole)), lo, hi, opts),
        Some(w) => {
            let boundary = -(f(pole + w) + f(pole - w)) / w;
            let inner = plemelj_first(&df, pole, pole - w, pole + w, prescription, w, opts)?;
            let sq = |x: f64| f(x) / ((x - pole) * (x - pole));
            let left = integrate(sq, lo, pole - w, opts)?;
            let right = integrate(sq, pole + w, hi, opts)?;
            Ok(inner + left + right + Estimate { value: boundary, error: 0.0 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| Complex64::new(x * x * x - 2.0 * x, 0.0), -1.0, 2.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(est.value.re, 3.75 - 3.0, epsilon = 1e-14);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // ∫_0^{2π} e^{i 7 x} dx = 0 and ∫_0^1 e^{ix} dx = (e^i - 1)/i
        let est = integrate(|x| Complex64::new(0.0, 7.0 * x).exp(), 0.0, 2.0 * PI, &QuadOptions::default()).unwrap();
        assert!(est.value.norm() < 1e-12);
        let est = integrate(|x| Complex64::new(0.0, x).exp(), 0.0, 1.0, &QuadOptions::default()).unwrap();
        let exact = (Complex64::new(0.0, 1.0).exp() - 1.0) / Complex64::new(0.0, 1.0);
        assert!((est.value - exact).norm() < 1e-14);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let fwd = integrate(|x| Complex64::new(x.exp(), 0.0), 0.0, 1.0, &QuadOptions::default()).unwrap();
        let bwd = integrate(|x| Complex64::new(x.exp(), 0.0), 1.0, 0.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(fwd.value.re, -bwd.value.re, epsilon = 1e-15);
    }

    #[test]
    fn max_intervals_reports_accuracy_error() {
        let opts = QuadOptions {
            abs_tol: 1e-15,
            rel_tol: 0.0,
            max_intervals: 3,
        };
        let err = integrate(|x| Complex64::new(x.abs().sqrt(), 0.0), -1.0, 1.0, &opts).unwrap_err();
        assert!(matches!(err, Error::Accuracy { .. }));
    }

    #[test]
    fn plemelj_of_gaussian() {
        // ∫ e^{-x²}/(x - i0) dx = iπ (odd PV part vanishes)
        let f = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        let est = plemelj_first(f, 0.0, -9.0, 9.0, Prescription::MinusI0, 1.0, &QuadOptions::default()).unwrap();
        assert!((est.value - Complex64::new(0.0, PI)).norm() < 1e-12);
        let est = plemelj_first(f, 0.0, -9.0, 9.0, Prescription::PlusI0, 1.0, &QuadOptions::default()).unwrap();
        assert!((est.value - Complex64::new(0.0, -PI)).norm() < 1e-12);
    }

    #[test]
    fn plemelj_pv_of_shifted_gaussian() {
        // PV ∫ e^{-(x-1)²}/x dx = 2√π D(1) with D the Dawson function,
        // D(1) = 0.5380795069127684.
        let f = |x: f64| Complex64::new((-(x - 1.0) * (x - 1.0)).exp(), 0.0);
        let est = plemelj_first(f, 0.0, -9.0, 11.0, Prescription::MinusI0, 0.5, &QuadOptions::default()).unwrap();
        let dawson1 = 0.538_079_506_912_768_4;
        assert_abs_diff_eq!(est.value.re, 2.0 * PI.sqrt() * dawson1, epsilon = 1e-12);
        assert_abs_diff_eq!(est.value.im, PI * (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn plemelj_second_matches_derivative_form() {
        // ∫ e^{-x²}/(x - i0)² dx = ∫ (-2x e^{-x²})/(x - i0) dx = -2√π
        let f = |x: f64| Complex64::new((-x * x).exp(), 0.0);
        let df = |x: f64| Complex64::new(-2.0 * x * (-x * x).exp(), 0.0);
        let est = plemelj_second(f, df, 0.0, -9.0, 9.0, Prescription::MinusI0, 1.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(est.value.re, -2.0 * PI.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(est.value.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pole_on_boundary_is_unsupported() {
        let f = |x: f64| Complex64::new(x, 0.0);
        let err = plemelj_first(f, 0.0, 0.0, 1.0, Prescription::MinusI0, 1.0, &QuadOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn pole_outside_support_is_regular() {
        let f = |_x: f64| Complex64::new(1.0, 0.0);
        let est = plemelj_first(f, -1.0, 0.0, 1.0, Prescription::MinusI0, 1.0, &QuadOptions::default()).unwrap();
        assert_abs_diff_eq!(est.value.re, 2.0f64.ln(), epsilon = 1e-14);
        assert_eq!(est.value.im, 0.0);
    }
}
