//! Adaptive quadrature over the real line, expectations under distributions, and a
//! Monte Carlo oracle.
//!
//! The integrator is a globally adaptive 21-point Gauss–Kronrod scheme (QUADPACK
//! error heuristics). The domain is cut at caller-supplied breakpoints; the finite
//! pieces are integrated directly and each infinite tail is compactified with
//! `x = a ± s (1 − t)/t`, `t ∈ (0, 1]`. All pieces share one error budget and the
//! piece with the largest error estimate is bisected first, so results are
//! deterministic for a given input.
//!
//! Divergence is data, not an error: when the adaptive loop cannot converge and a
//! tail does not decay (doubling-window integrals of `|f|` stop shrinking), or the
//! running value exceeds [`QuadConfig::divergence_threshold`], the result is `±∞`
//! with `divergent = true`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{sort_dedup, Distribution, DistributionFunction};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerances and limits for the quadrature engine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_subdivisions: usize,
    /// Tail mass left outside the bulk `[quantile(p), quantile(1 − p)]` used to place breakpoints.
    pub tail_cutoff_probability: T,
    /// Magnitude above which an integral is reported as infinite.
    pub divergence_threshold: T,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        // f32 cannot resolve 1e-9 relative; keep the tolerance a few ulps above epsilon
        let floor = T::of(64.0) * T::epsilon();
        Self {
            rel_tol: T::of(1e-9).max(floor),
            abs_tol: T::of(1e-12).max(floor * floor),
            max_subdivisions: 2000,
            tail_cutoff_probability: T::of(1e-14).max(floor),
            divergence_threshold: T::of(1e12),
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v.is_finite() && v > T::zero();
        if !pos(self.rel_tol) || self.rel_tol >= T::one() {
            return Err(Error::InvalidParameter("rel_tol must lie in (0, 1)".into()));
        }
        if !pos(self.abs_tol) {
            return Err(Error::InvalidParameter("abs_tol must be > 0".into()));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter("max_subdivisions must be >= 1".into()));
        }
        if !pos(self.tail_cutoff_probability) || self.tail_cutoff_probability >= T::half() {
            return Err(Error::InvalidParameter("tail_cutoff_probability must lie in (0, 1/2)".into()));
        }
        if !pos(self.divergence_threshold) {
            return Err(Error::InvalidParameter("divergence_threshold must be > 0".into()));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: T) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Value of an integral with its diagnostics.
///
/// `divergent` implies `value` is infinite; `converged` implies
/// `error_estimate <= max(rel_tol·|value|, abs_tol)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct IntegralResult<T> {
    #[serde(with = "crate::serde_ext::extended")]
    pub value: T,
    #[serde(with = "crate::serde_ext::extended")]
    pub error_estimate: T,
    pub converged: bool,
    pub divergent: bool,
}

impl<T: Real> IntegralResult<T> {
    pub fn exact(value: T) -> Self {
        Self { value, error_estimate: T::zero(), converged: true, divergent: false }
    }

    pub fn infinite(negative: bool) -> Self {
        let value = if negative { T::neg_infinity() } else { T::infinity() };
        Self { value, error_estimate: T::infinity(), converged: false, divergent: true }
    }

    pub fn is_finite(&self) -> bool {
        !self.divergent && self.value.is_finite()
    }

    /// Sum of two independent integrals.
    pub fn plus(self, other: Self) -> Self {
        if self.divergent || other.divergent {
            let neg = (self.divergent && self.value < T::zero()) || (other.divergent && other.value < T::zero());
            return Self::infinite(neg);
        }
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            converged: self.converged && other.converged,
            divergent: false,
        }
    }

    /// Multiplies by a nonnegative constant.
    pub fn scaled(self, c: T) -> Self {
        if self.divergent {
            return self;
        }
        Self { value: self.value * c, error_estimate: self.error_estimate * c.abs(), ..self }
    }
}

/// How the engine treats an infinite integrand value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonFinitePolicy {
    /// Any non-finite value is an evaluation error carrying its location.
    Error,
    /// `±∞` values make the integral divergent; `NaN` is still an error.
    Divergent,
}

// ---- Gauss–Kronrod 21 ----

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

#[derive(Clone, Copy, Debug)]
struct Estimate<T> {
    value: T,
    error: T,
}

enum Abort<T> {
    NaN(T),
    Infinite { x: T, negative: bool },
}

fn gk21<T: Real>(g: &mut impl FnMut(T) -> std::result::Result<T, Abort<T>>, lo: T, hi: T) -> std::result::Result<Estimate<T>, Abort<T>> {
    let center = T::half() * (lo + hi);
    let half = T::half() * (hi - lo);
    let fc = g(center)?;
    let mut kronrod = fc * T::of(WGK[10]);
    let mut gauss = T::zero();
    let mut resabs = kronrod.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half * T::of(XGK[j]);
        let f1 = g(center - dx)?;
        let f2 = g(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod = kronrod + T::of(WGK[j]) * (f1 + f2);
        resabs = resabs + T::of(WGK[j]) * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss = gauss + T::of(WG[j / 2]) * (f1 + f2);
        }
    }
    let mean = kronrod * T::half();
    let mut resasc = T::of(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        resasc = resasc + T::of(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if resasc != T::zero() && error != T::zero() {
        error = resasc * T::one().min((T::of(200.0) * error / resasc).powf(T::of(1.5)));
    }
    if resabs > T::min_positive_value() / (T::of(50.0) * T::epsilon()) {
        error = error.max(T::of(50.0) * T::epsilon() * resabs);
    }
    Ok(Estimate { value, error })
}

// ---- domain pieces ----

#[derive(Clone, Copy, Debug)]
enum Piece<T> {
    Finite { a: T, b: T },
    /// `[a, ∞)` via `x = a + s(1 − t)/t`.
    Upper { a: T, s: T },
    /// `(−∞, b]` via `x = b − s(1 − t)/t`.
    Lower { b: T, s: T },
}

impl<T: Real> Piece<T> {
    fn domain(&self) -> (T, T) {
        match *self {
            Self::Finite { a, b } => (a, b),
            _ => (T::zero(), T::one()),
        }
    }

    #[inline]
    fn map(&self, t: T) -> (T, T) {
        match *self {
            Self::Finite { .. } => (t, T::one()),
            Self::Upper { a, s } => (a + s * (T::one() - t) / t, s / (t * t)),
            Self::Lower { b, s } => (b - s * (T::one() - t) / t, s / (t * t)),
        }
    }
}

fn build_pieces<T: Real>(a: T, b: T, breaks: &[T]) -> Vec<Piece<T>> {
    let mut pts: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    sort_dedup(&mut pts);
    if a.is_finite() {
        pts.insert(0, a);
    }
    if b.is_finite() {
        pts.push(b);
    }
    if pts.is_empty() {
        pts.push(T::zero());
    }
    let first = pts[0];
    let last = *pts.last().unwrap();
    let spread = (last - first) * T::half();
    let s = if spread > T::zero() { spread } else { T::one() };
    let mut pieces = Vec::with_capacity(pts.len() + 1);
    if a == T::neg_infinity() {
        pieces.push(Piece::Lower { b: first, s });
    }
    for w in pts.windows(2) {
        if w[1] > w[0] {
            pieces.push(Piece::Finite { a: w[0], b: w[1] });
        }
    }
    if b == T::infinity() {
        pieces.push(Piece::Upper { a: last, s });
    }
    pieces
}

struct Cell<T> {
    piece: usize,
    lo: T,
    hi: T,
    est: Estimate<T>,
}

impl<T: Real> PartialEq for Cell<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Real> Eq for Cell<T> {}
impl<T: Real> PartialOrd for Cell<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Cell<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est
            .error
            .partial_cmp(&other.est.error)
            .unwrap_or(Ordering::Equal)
            // deterministic tie-break
            .then_with(|| other.lo.partial_cmp(&self.lo).unwrap_or(Ordering::Equal))
            .then_with(|| other.piece.cmp(&self.piece))
    }
}

fn splittable<T: Real>(lo: T, hi: T) -> bool {
    let width = hi - lo;
    let eps = T::epsilon();
    width > T::of(64.0) * eps * lo.abs().max(hi.abs()) && width > eps * eps
}

/// Integrates `f` over `(a, b)` (either end may be infinite), splitting at `breaks`.
pub fn integrate<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    breaks: &[T],
    cfg: &QuadConfig<T>,
    policy: NonFinitePolicy,
) -> Result<IntegralResult<T>> {
    cfg.validate()?;
    if a.is_nan() || b.is_nan() || !(a < b) {
        if a == b {
            return Ok(IntegralResult::exact(T::zero()));
        }
        return Err(Error::InvalidParameter(format!("integration bounds must satisfy a < b, got ({a}, {b})")));
    }
    let pieces = build_pieces(a, b, breaks);
    match adaptive(&f, &pieces, cfg) {
        Ok(res) => Ok(res),
        Err(Abort::NaN(x)) => Err(Error::NonFiniteIntegrand { x: x.to_f64().unwrap_or(f64::NAN) }),
        Err(Abort::Infinite { x, negative }) => match policy {
            NonFinitePolicy::Divergent => Ok(IntegralResult::infinite(negative)),
            NonFinitePolicy::Error => Err(Error::NonFiniteIntegrand { x: x.to_f64().unwrap_or(f64::NAN) }),
        },
    }
}

/// `∫_ℝ f(x) dx` with the default split at the origin.
pub fn integrate_real_line<T: Real, F: Fn(T) -> T>(f: F, cfg: &QuadConfig<T>) -> Result<IntegralResult<T>> {
    integrate(f, T::neg_infinity(), T::infinity(), &[], cfg, NonFinitePolicy::Error)
}

/// `∫_a^b f(x) dx`; `a` or `b` may be infinite.
pub fn integrate_interval<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, cfg: &QuadConfig<T>) -> Result<IntegralResult<T>> {
    integrate(f, a, b, &[], cfg, NonFinitePolicy::Error)
}

fn adaptive<T: Real, F: Fn(T) -> T>(
    f: &F,
    pieces: &[Piece<T>],
    cfg: &QuadConfig<T>,
) -> std::result::Result<IntegralResult<T>, Abort<T>> {
    let eval = |piece: &Piece<T>| {
        let piece = *piece;
        move |t: T| -> std::result::Result<T, Abort<T>> {
            let (x, jac) = piece.map(t);
            let v = f(x);
            if v.is_nan() {
                return Err(Abort::NaN(x));
            }
            if v.is_infinite() {
                return Err(Abort::Infinite { x, negative: v < T::zero() });
            }
            if v == T::zero() {
                return Ok(T::zero());
            }
            Ok(v * jac)
        }
    };

    let mut heap = BinaryHeap::new();
    let (mut total, mut total_err) = (T::zero(), T::zero());
    for (i, p) in pieces.iter().enumerate() {
        let (lo, hi) = p.domain();
        let est = gk21(&mut eval(p), lo, hi)?;
        total = total + est.value;
        total_err = total_err + est.error;
        heap.push(Cell { piece: i, lo, hi, est });
    }

    let mut frozen = Vec::new();
    let mut frozen_err = T::zero();
    let mut splits = 0usize;
    let mut converged = false;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if total_err <= tol {
            converged = true;
            break;
        }
        if frozen_err > tol || splits >= cfg.max_subdivisions || total.abs() > cfg.divergence_threshold {
            break;
        }
        let Some(cell) = heap.pop() else { break };
        if !splittable(cell.lo, cell.hi) {
            frozen_err = frozen_err + cell.est.error;
            frozen.push(cell);
            continue;
        }
        let mid = T::half() * (cell.lo + cell.hi);
        let mut g = eval(&pieces[cell.piece]);
        let left = gk21(&mut g, cell.lo, mid)?;
        let right = gk21(&mut g, mid, cell.hi)?;
        total = total - cell.est.value + left.value + right.value;
        total_err = total_err - cell.est.error + left.error + right.error;
        heap.push(Cell { piece: cell.piece, lo: cell.lo, hi: mid, est: left });
        heap.push(Cell { piece: cell.piece, lo: mid, hi: cell.hi, est: right });
        splits += 1;
    }

    // exact re-summation, in a fixed order
    let mut cells: Vec<Cell<T>> = heap.into_vec();
    cells.extend(frozen);
    cells.sort_by(|a, b| a.piece.cmp(&b.piece).then(a.lo.partial_cmp(&b.lo).unwrap_or(Ordering::Equal)));
    let value: T = cells.iter().map(|c| c.est.value).sum();
    let error: T = cells.iter().map(|c| c.est.error).sum();
    if converged {
        let tol = cfg.abs_tol.max(cfg.rel_tol * value.abs());
        converged = error <= tol;
    }

    if value.abs() > cfg.divergence_threshold {
        return Ok(IntegralResult::infinite(value < T::zero()));
    }
    if !converged && pieces.iter().any(|p| tail_diverges(f, p)) {
        return Ok(IntegralResult::infinite(value < T::zero()));
    }
    Ok(IntegralResult { value, error_estimate: error, converged, divergent: false })
}

/// Integrals of `|f|` over the doubling windows `[a + s·2ᵏ, a + s·2ᵏ⁺¹]` far out in a
/// tail. A convergent tail makes them shrink geometrically; a tail decaying like
/// `1/x` or slower keeps them from shrinking.
fn tail_diverges<T: Real, F: Fn(T) -> T>(f: &F, piece: &Piece<T>) -> bool {
    let (anchor, s, dir) = match *piece {
        Piece::Upper { a, s } => (a, s, T::one()),
        Piece::Lower { b, s } => (b, s, -T::one()),
        Piece::Finite { .. } => return false,
    };
    let ln2 = T::LN_2();
    // x = anchor + dir·s·e^u
    let mut g = |u: T| -> std::result::Result<T, Abort<T>> {
        let e = u.exp();
        let v = f(anchor + dir * s * e);
        if v.is_nan() {
            return Err(Abort::NaN(u));
        }
        Ok(v.abs() * s * e)
    };
    let first = 36usize;
    let count = 14usize;
    let mut windows = Vec::with_capacity(count);
    for k in first..first + count {
        let lo = T::of_usize(k) * ln2;
        match gk21(&mut g, lo, lo + ln2) {
            Ok(est) => windows.push(est.value),
            Err(_) => return false,
        }
    }
    let last = *windows.last().unwrap();
    if last.is_infinite() {
        return true;
    }
    last > T::zero() && windows.windows(2).all(|w| w[1] >= T::of(0.97) * w[0])
}

// ---- expectations ----

/// `∫ f dQ` under a distribution: atoms are summed, the absolutely continuous part
/// is integrated against its density.
pub fn expect_under<T: Real, F: Fn(T) -> T>(d: &Distribution<T>, f: F, cfg: &QuadConfig<T>) -> Result<IntegralResult<T>> {
    expect_under_with_breaks(d, f, &[], cfg, NonFinitePolicy::Error)
}

/// [`expect_under`] with extra breakpoints for the integrand and an explicit policy for infinite values.
pub fn expect_under_with_breaks<T: Real, F: Fn(T) -> T>(
    d: &Distribution<T>,
    f: F,
    extra_breaks: &[T],
    cfg: &QuadConfig<T>,
    policy: NonFinitePolicy,
) -> Result<IntegralResult<T>> {
    cfg.validate()?;
    let mut acc = IntegralResult::exact(T::zero());
    for (x, mass) in d.atoms() {
        let v = f(x);
        if v.is_nan() || (v.is_infinite() && policy == NonFinitePolicy::Error) {
            return Err(Error::NonFiniteIntegrand { x: x.to_f64().unwrap_or(f64::NAN) });
        }
        if v.is_infinite() {
            return Ok(IntegralResult::infinite(v < T::zero()));
        }
        acc = acc.plus(IntegralResult::exact(mass * v));
    }
    if d.has_continuous_part() {
        let mut breaks = d.breakpoints(cfg.tail_cutoff_probability);
        breaks.extend_from_slice(extra_breaks);
        let part = integrate(
            |x| {
                let dens = d.continuous_density(x);
                if dens == T::zero() {
                    T::zero()
                } else {
                    dens * f(x)
                }
            },
            T::neg_infinity(),
            T::infinity(),
            &breaks,
            cfg,
            policy,
        )?;
        acc = acc.plus(part);
    }
    Ok(acc)
}

/// `∫ f(x) density(x) dx` for any absolutely continuous distribution function.
pub fn expect_density<T: Real, D, F>(
    d: &D,
    f: F,
    extra_breaks: &[T],
    cfg: &QuadConfig<T>,
    policy: NonFinitePolicy,
) -> Result<IntegralResult<T>>
where
    D: DistributionFunction<T> + ?Sized,
    F: Fn(T) -> T,
{
    if !d.is_absolutely_continuous() {
        return Err(Error::MissingDensity);
    }
    let mut breaks = d.breakpoints(cfg.tail_cutoff_probability);
    breaks.extend_from_slice(extra_breaks);
    integrate(
        |x| {
            let dens = d.density(x).unwrap_or(T::zero());
            if dens == T::zero() {
                T::zero()
            } else {
                dens * f(x)
            }
        },
        T::neg_infinity(),
        T::infinity(),
        &breaks,
        cfg,
        policy,
    )
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct McEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub n: usize,
}

/// Monte Carlo estimate of `E f(X)` from `n` seeded draws of `d`.
pub fn mc_expect<T: Real, F: Fn(T) -> T>(d: &Distribution<T>, f: F, n: usize, seed: u64) -> Result<McEstimate<T>> {
    if n < 2 {
        return Err(Error::InvalidParameter("Monte Carlo needs n >= 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Welford
    let (mut mean, mut m2) = (T::zero(), T::zero());
    for i in 0..n {
        let v = f(d.draw(&mut rng));
        let delta = v - mean;
        mean = mean + delta / T::of_usize(i + 1);
        m2 = m2 + delta * (v - mean);
    }
    let var = m2 / T::of_usize(n - 1);
    Ok(McEstimate { mean, std_error: (var / T::of_usize(n)).sqrt(), n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    #[test]
    fn normal_density_integrates_to_one() {
        let r = integrate_real_line(|x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt(), &cfg()).unwrap();
        assert!(r.converged && !r.divergent);
        assert!((r.value - 1.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn two_sided_exponential() {
        let r = integrate_real_line(|x: f64| (-x.abs() / 2.0).exp(), &cfg()).unwrap();
        assert!((r.value - 4.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn slowly_decaying_tail_is_divergent() {
        let r = integrate_real_line(|x: f64| if x > 1.0 { 1.0 / (1.0 + x * x).sqrt() } else { 0.0 }, &cfg()).unwrap();
        assert!(r.divergent);
        assert_eq!(r.value, f64::INFINITY);
    }

    #[test]
    fn cauchy_like_square_root_tail_is_divergent() {
        let r = integrate_real_line(|x: f64| 1.0 / (1.0 + x.abs()).sqrt(), &cfg()).unwrap();
        assert!(r.divergent);
    }

    #[test]
    fn integrable_power_tail_is_not_divergent() {
        let r = integrate_real_line(|x: f64| 1.0 / (1.0 + x * x), &cfg()).unwrap();
        assert!(!r.divergent);
        assert!((r.value - PI).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn intervals() {
        assert_relative_eq!(integrate_interval(|_| 1.0, 0.0, 2.0, &cfg()).unwrap().value, 2.0, max_relative = 1e-14);
        assert_relative_eq!(integrate_interval(|x| x, 0.0, 1.0, &cfg()).unwrap().value, 0.5, max_relative = 1e-14);
        let logistic_pdf = |x: f64| {
            let e = (-x.abs()).exp();
            e / ((1.0 + e) * (1.0 + e))
        };
        let r = integrate_interval(logistic_pdf, 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        let r = integrate_interval(logistic_pdf, f64::NEG_INFINITY, 0.0, &cfg()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        assert!(integrate_interval(|x| x, 1.0, 0.0, &cfg()).is_err());
    }

    #[test]
    fn jump_is_handled_with_or_without_break() {
        let f = |x: f64| if x > 0.3 { 1.0 } else { 0.0 };
        let r = integrate(f, 0.0, 1.0, &[0.3], &cfg(), NonFinitePolicy::Error).unwrap();
        assert_relative_eq!(r.value, 0.7, max_relative = 1e-13);
        let r = integrate(f, 0.0, 1.0, &[], &cfg(), NonFinitePolicy::Error).unwrap();
        assert!((r.value - 0.7).abs() < 1e-9);
    }

    #[test]
    fn non_finite_values_are_errors_or_divergence() {
        let f = |x: f64| if x > 0.5 && x < 0.6 { f64::NAN } else { 1.0 };
        let err = integrate_interval(f, 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteIntegrand { x } if x > 0.5 && x < 0.6));
        let g = |x: f64| if x > 0.5 { f64::INFINITY } else { 1.0 };
        assert!(integrate_interval(g, 0.0, 1.0, &cfg()).is_err());
        let r = integrate(g, 0.0, 1.0, &[], &cfg(), NonFinitePolicy::Divergent).unwrap();
        assert!(r.divergent && r.value == f64::INFINITY);
    }

    #[test]
    fn converged_error_within_contract() {
        let c = cfg();
        let r = integrate_real_line(|x: f64| (-x * x).exp() * (1.0 + x.sin()), &c).unwrap();
        assert!(r.converged);
        assert!(r.error_estimate <= (c.rel_tol * r.value.abs()).max(c.abs_tol));
        assert_relative_eq!(r.value, PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn tightening_moves_result_within_error_bound() {
        let fs: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|x| (-x.abs() / 2.0).exp()),
            Box::new(|x| 1.0 / (1.0 + x * x)),
            Box::new(|x| (-(x - 1.0).powi(2)).exp() * x.cos().powi(2)),
            Box::new(|x| 1.0 / (2.0 * (x / 2.0).cosh())),
        ];
        for f in fs {
            let a = integrate_real_line(&f, &cfg()).unwrap();
            let b = integrate_real_line(&f, &cfg().with_rel_tol(1e-10)).unwrap();
            assert!(a.converged && b.converged);
            assert!((a.value - b.value).abs() <= 5.0 * a.error_estimate.max(1e-15), "{a:?} {b:?}");
        }
    }

    #[test]
    fn expectations() {
        let c = cfg();
        let r = expect_under(&Distribution::dirac(2.0).unwrap(), |x| x * x, &c).unwrap();
        assert_eq!(r.value, 4.0);
        let r = expect_under(&Distribution::logistic(0.0, 1.0).unwrap(), |x| x * x, &c).unwrap();
        assert!((r.value - PI * PI / 3.0).abs() < 1e-8, "{r:?}");
        let r = expect_under(&Distribution::empirical(&[1.0, 3.0]).unwrap(), |x| x, &c).unwrap();
        assert_eq!(r.value, 2.0);
        let m = Distribution::mixture(vec![
            (0.25, Distribution::dirac(1.0).unwrap()),
            (0.75, Distribution::normal(2.0, 1.0).unwrap()),
        ])
        .unwrap();
        let r = expect_under(&m, |x| x, &c).unwrap();
        assert_relative_eq!(r.value, 0.25 + 1.5, max_relative = 1e-10);
    }

    #[test]
    fn monte_carlo_oracle() {
        let r = mc_expect(&Distribution::dirac(1.0).unwrap(), |x| x, 100, 5).unwrap();
        assert_eq!((r.mean, r.std_error), (1.0, 0.0));
        let r = mc_expect(&Distribution::normal(0.0, 1.0).unwrap(), |x: f64| x, 1_000_000, 11).unwrap();
        assert!(r.mean.abs() < 3.0 * r.std_error, "{r:?}");
        assert_eq!(
            mc_expect(&Distribution::normal(0.0, 1.0).unwrap(), |x| x, 1000, 11).unwrap(),
            mc_expect(&Distribution::normal(0.0, 1.0).unwrap(), |x| x, 1000, 11).unwrap()
        );
        assert!(mc_expect(&Distribution::dirac(1.0).unwrap(), |x| x, 1, 5).is_err());
    }

    #[test]
    fn single_precision_engine() {
        let c = QuadConfig::<f32>::default();
        let r = integrate_real_line(|x: f32| (-x.abs() / 2.0).exp(), &c).unwrap();
        assert!(r.converged);
        assert!((r.value - 4.0).abs() < 1e-4, "{r:?}");
    }

    #[test]
    fn config_validation() {
        assert!(cfg().with_rel_tol(0.0).validate().is_err());
        assert!(cfg().with_rel_tol(1.0).validate().is_err());
        assert!(cfg().with_abs_tol(-1.0).validate().is_err());
        assert!(cfg().validate().is_ok());
    }
}
