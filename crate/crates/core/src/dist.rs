//! Probability measures on the real line, represented through their distribution functions.
//!
//! Distribution functions here are **left-continuous**: `cdf(x)` is `P((−∞, x))`.
//! This only matters for measures with atoms; `cdf(dirac(m), m)` is `0`.
//! The complementary value `sf(x) = P([x, ∞))` is computed directly rather than
//! as `1 − cdf(x)` so that right tails keep full relative precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{std_normal_cdf, std_normal_ln_cdf, std_normal_pdf, std_normal_quantile, std_normal_sf, Real};

/// Anything that can be evaluated as a (left-continuous) distribution function on ℝ.
///
/// Implemented by [`Distribution`] and by the lazy properization views in
/// [`crate::rules`]. Scoring rules are written against this trait, so a caller can
/// score a hand-rolled CDF as well.
pub trait DistributionFunction<T: Real>: Send + Sync {
    /// `P((−∞, x))`.
    fn cdf(&self, x: T) -> T;

    /// `P([x, ∞))`. Implementations should avoid cancellation in the right tail.
    fn sf(&self, x: T) -> T {
        T::one() - self.cdf(x)
    }

    /// `ln cdf(x)`; overridden where the log stays finite after `cdf` underflows.
    fn ln_cdf(&self, x: T) -> T {
        self.cdf(x).ln()
    }

    /// `ln sf(x)`; overridden where the log stays finite after `sf` underflows.
    fn ln_sf(&self, x: T) -> T {
        self.sf(x).ln()
    }

    /// Whether `0 < cdf(x) < 1` for every finite `x`.
    fn in_p01(&self) -> bool;

    /// Points where integrands built from this CDF should be split: atoms and
    /// the bulk `[quantile(p), quantile(1 − p)]` for `p = tail_probability`.
    fn breakpoints(&self, tail_probability: T) -> Vec<T>;

    /// Lebesgue density, when the measure is absolutely continuous.
    fn density(&self, _x: T) -> Option<T> {
        None
    }

    fn is_absolutely_continuous(&self) -> bool {
        false
    }
}

/// A probability measure on ℝ.
///
/// Parametric families use `loc`/`scale` except the normal, which uses `mean`/`sd`.
/// Values are immutable once constructed; constructors validate parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "DistributionRepr<T>",
    into = "DistributionRepr<T>",
    bound = "T: Real"
)]
pub enum Distribution<T> {
    Gumbel { loc: T, scale: T },
    Laplace { loc: T, scale: T },
    Logistic { loc: T, scale: T },
    Normal { mean: T, sd: T },
    Dirac { point: T },
    Empirical(Empirical<T>),
    Mixture(Mixture<T>),
}

/// Step distribution with mass `k/n` on a value seen `k` times among `n` sample points.
#[derive(Clone, Debug, PartialEq)]
pub struct Empirical<T> {
    atoms: Vec<T>,
    // cum[i] = number of sample points <= atoms[i]
    cum: Vec<usize>,
}

/// Finite convex combination of non-mixture distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct Mixture<T> {
    components: Vec<(T, Distribution<T>)>,
}

impl<T: Real> Empirical<T> {
    pub fn new(points: &[T]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("empirical distribution needs at least one point".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("empirical points must be finite".into()));
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let mut atoms = Vec::new();
        let mut cum = Vec::new();
        for (i, &p) in sorted.iter().enumerate() {
            if atoms.last() == Some(&p) {
                *cum.last_mut().unwrap() = i + 1;
            } else {
                atoms.push(p);
                cum.push(i + 1);
            }
        }
        Ok(Self { atoms, cum })
    }

    pub fn len(&self) -> usize {
        *self.cum.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distinct support points with their masses.
    pub fn atoms(&self) -> impl Iterator<Item = (T, T)> + '_ {
        let n = T::of_usize(self.len());
        self.atoms.iter().enumerate().map(move |(i, &a)| {
            let below = if i == 0 { 0 } else { self.cum[i - 1] };
            (a, T::of_usize(self.cum[i] - below) / n)
        })
    }

    fn count_below(&self, x: T) -> usize {
        let k = self.atoms.partition_point(|&a| a < x);
        if k == 0 {
            0
        } else {
            self.cum[k - 1]
        }
    }

    fn count_at_or_below(&self, x: T) -> usize {
        let k = self.atoms.partition_point(|&a| a <= x);
        if k == 0 {
            0
        } else {
            self.cum[k - 1]
        }
    }

    fn points(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len());
        let mut prev = 0;
        for (&a, &c) in self.atoms.iter().zip(&self.cum) {
            out.extend(std::iter::repeat_n(a, c - prev));
            prev = c;
        }
        out
    }
}

impl<T: Real> Mixture<T> {
    pub fn new(components: Vec<(T, Distribution<T>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("mixture needs at least one component".into()));
        }
        let mut total = T::zero();
        for (w, d) in &components {
            if !(w.is_finite() && *w >= T::zero()) {
                return Err(Error::InvalidParameter(format!("mixture weight {w} must be nonnegative")));
            }
            if matches!(d, Distribution::Mixture(_)) {
                return Err(Error::InvalidParameter("mixtures cannot be nested".into()));
            }
            total = total + *w;
        }
        if (total - T::one()).abs() > T::of(1e-9).max(T::of(8.0) * T::epsilon()) {
            return Err(Error::InvalidParameter(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(T, Distribution<T>)] {
        &self.components
    }

    fn active(&self) -> impl Iterator<Item = &(T, Distribution<T>)> {
        self.components.iter().filter(|(w, _)| *w > T::zero())
    }
}

fn check_scale<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite and > 0, got {v}")))
    }
}

fn check_finite<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

impl<T: Real> Distribution<T> {
    pub fn gumbel(loc: T, scale: T) -> Result<Self> {
        check_finite("loc", loc)?;
        check_scale("scale", scale)?;
        Ok(Self::Gumbel { loc, scale })
    }

    pub fn laplace(loc: T, scale: T) -> Result<Self> {
        check_finite("loc", loc)?;
        check_scale("scale", scale)?;
        Ok(Self::Laplace { loc, scale })
    }

    pub fn logistic(loc: T, scale: T) -> Result<Self> {
        check_finite("loc", loc)?;
        check_scale("scale", scale)?;
        Ok(Self::Logistic { loc, scale })
    }

    pub fn normal(mean: T, sd: T) -> Result<Self> {
        check_finite("mean", mean)?;
        check_scale("sd", sd)?;
        Ok(Self::Normal { mean, sd })
    }

    pub fn dirac(point: T) -> Result<Self> {
        check_finite("point", point)?;
        Ok(Self::Dirac { point })
    }

    pub fn empirical(points: &[T]) -> Result<Self> {
        Empirical::new(points).map(Self::Empirical)
    }

    pub fn mixture(components: Vec<(T, Distribution<T>)>) -> Result<Self> {
        Mixture::new(components).map(Self::Mixture)
    }

    /// `P((−∞, x])`, the right-continuous companion of [`DistributionFunction::cdf`].
    pub fn cdf_right(&self, x: T) -> T {
        match self {
            Self::Dirac { point } => {
                if *point <= x {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Empirical(e) => T::of_usize(e.count_at_or_below(x)) / T::of_usize(e.len()),
            Self::Mixture(m) => m.active().map(|(w, d)| *w * d.cdf_right(x)).sum(),
            _ => self.cdf(x),
        }
    }

    /// Generalized inverse `inf{x : P((−∞, x]) ≥ p}` for `p ∈ (0, 1)`.
    pub fn quantile(&self, p: T) -> Result<T> {
        if !(p > T::zero() && p < T::one()) {
            return Err(Error::ProbabilityOutOfRange(p.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(self.quantile_unchecked(p))
    }

    fn quantile_unchecked(&self, p: T) -> T {
        match *self {
            Self::Gumbel { loc, scale } => loc - scale * (-p.ln()).ln(),
            Self::Laplace { loc, scale } => {
                if p <= T::half() {
                    loc + scale * (T::two() * p).ln()
                } else {
                    loc - scale * (T::two() * (T::one() - p)).ln()
                }
            }
            Self::Logistic { loc, scale } => loc + scale * (p / (T::one() - p)).ln(),
            Self::Normal { mean, sd } => mean + sd * std_normal_quantile(p),
            Self::Dirac { point } => point,
            Self::Empirical(ref e) => {
                let n = T::of_usize(e.len());
                let i = e.cum.partition_point(|&c| T::of_usize(c) / n < p);
                e.atoms[i.min(e.atoms.len() - 1)]
            }
            Self::Mixture(ref m) => {
                let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
                for (_, d) in m.active() {
                    let q = d.quantile_unchecked(p);
                    lo = lo.min(q);
                    hi = hi.max(q);
                }
                if lo == hi {
                    return lo;
                }
                // invariant: cdf_right(lo) < p <= cdf_right(hi), up to lo being the answer itself
                if self.cdf_right(lo) >= p {
                    return lo;
                }
                for _ in 0..2000 {
                    let mid = lo + (hi - lo) * T::half();
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.cdf_right(mid) >= p {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                hi
            }
        }
    }

    /// Lower median: the smallest `m` with `P((−∞, m]) ≥ 1/2`.
    pub fn median(&self) -> T {
        self.quantile_unchecked(T::half())
    }

    /// `n` deterministic draws for a given seed (inverse-CDF; mixtures pick a component first).
    pub fn sample(&self, seed: u64, n: usize) -> Vec<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.draw(&mut rng)).collect()
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self {
            Self::Dirac { point } => *point,
            Self::Mixture(m) => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut chosen = None;
                for (w, d) in m.active() {
                    acc += w.to_f64().unwrap_or(0.0);
                    chosen = Some(d);
                    if u < acc {
                        break;
                    }
                }
                chosen.expect("mixture has an active component").draw(rng)
            }
            _ => self.quantile_unchecked(open_unit(rng)),
        }
    }

    /// Whether the measure has no atoms.
    pub fn is_continuous(&self) -> bool {
        match self {
            Self::Dirac { .. } | Self::Empirical(_) => false,
            Self::Mixture(m) => m.active().all(|(_, d)| d.is_continuous()),
            _ => true,
        }
    }

    /// Point masses, merged across mixture components.
    pub fn atoms(&self) -> Vec<(T, T)> {
        match self {
            Self::Dirac { point } => vec![(*point, T::one())],
            Self::Empirical(e) => e.atoms().collect(),
            Self::Mixture(m) => {
                let mut out: Vec<(T, T)> = Vec::new();
                for (w, d) in m.active() {
                    for (x, p) in d.atoms() {
                        out.push((x, *w * p));
                    }
                }
                out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite atoms"));
                out.dedup_by(|b, a| {
                    if a.0 == b.0 {
                        a.1 = a.1 + b.1;
                        true
                    } else {
                        false
                    }
                });
                out
            }
            _ => Vec::new(),
        }
    }

    /// Density of the absolutely continuous part (zero when there is none).
    pub fn continuous_density(&self, x: T) -> T {
        match *self {
            Self::Gumbel { loc, scale } => {
                let z = (x - loc) / scale;
                (-z - (-z).exp()).exp() / scale
            }
            Self::Laplace { loc, scale } => T::half() * (-((x - loc) / scale).abs()).exp() / scale,
            Self::Logistic { loc, scale } => {
                let e = (-((x - loc) / scale).abs()).exp();
                e / (scale * (T::one() + e) * (T::one() + e))
            }
            Self::Normal { mean, sd } => std_normal_pdf((x - mean) / sd) / sd,
            Self::Dirac { .. } | Self::Empirical(_) => T::zero(),
            Self::Mixture(ref m) => m.active().map(|(w, d)| *w * d.continuous_density(x)).sum(),
        }
    }

    /// Whether some component has an absolutely continuous part.
    pub fn has_continuous_part(&self) -> bool {
        match self {
            Self::Dirac { .. } | Self::Empirical(_) => false,
            Self::Mixture(m) => m.active().any(|(_, d)| d.has_continuous_part()),
            _ => true,
        }
    }

    /// Short human-readable label, e.g. `logistic(0,1)`.
    pub fn label(&self) -> String {
        match self {
            Self::Gumbel { loc, scale } => format!("gumbel({loc},{scale})"),
            Self::Laplace { loc, scale } => format!("laplace({loc},{scale})"),
            Self::Logistic { loc, scale } => format!("logistic({loc},{scale})"),
            Self::Normal { mean, sd } => format!("normal({mean},{sd})"),
            Self::Dirac { point } => format!("dirac({point})"),
            Self::Empirical(e) => format!("empirical(n={})", e.len()),
            Self::Mixture(m) => {
                let parts: Vec<String> =
                    m.components.iter().map(|(w, d)| format!("{w}*{}", d.label())).collect();
                format!("mixture[{}]", parts.join("+"))
            }
        }
    }
}

fn open_unit<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    loop {
        let u = T::of(rng.gen::<f64>());
        if u > T::zero() && u < T::one() {
            return u;
        }
    }
}

impl<T: Real> DistributionFunction<T> for Distribution<T> {
    fn cdf(&self, x: T) -> T {
        match *self {
            Self::Gumbel { loc, scale } => (-(-(x - loc) / scale).exp()).exp(),
            Self::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z <= T::zero() {
                    T::half() * z.exp()
                } else {
                    T::one() - T::half() * (-z).exp()
                }
            }
            Self::Logistic { loc, scale } => T::one() / (T::one() + (-(x - loc) / scale).exp()),
            Self::Normal { mean, sd } => std_normal_cdf((x - mean) / sd),
            Self::Dirac { point } => {
                if point < x {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Empirical(ref e) => T::of_usize(e.count_below(x)) / T::of_usize(e.len()),
            Self::Mixture(ref m) => m.active().map(|(w, d)| *w * d.cdf(x)).sum(),
        }
    }

    fn sf(&self, x: T) -> T {
        match *self {
            Self::Gumbel { loc, scale } => -(-(-(x - loc) / scale).exp()).exp_m1(),
            Self::Laplace { loc, scale } => {
                let z = (x - loc) / scale;
                if z <= T::zero() {
                    T::one() - T::half() * z.exp()
                } else {
                    T::half() * (-z).exp()
                }
            }
            Self::Logistic { loc, scale } => T::one() / (T::one() + ((x - loc) / scale).exp()),
            Self::Normal { mean, sd } => std_normal_sf((x - mean) / sd),
            Self::Dirac { point } => {
                if x <= point {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Self::Empirical(ref e) => T::of_usize(e.len() - e.count_below(x)) / T::of_usize(e.len()),
            Self::Mixture(ref m) => m.active().map(|(w, d)| *w * d.sf(x)).sum(),
        }
    }

    fn ln_cdf(&self, x: T) -> T {
        match *self {
            Self::Gumbel { loc, scale } => -(-(x - loc) / scale).exp(),
            Self::Laplace { loc, scale } => laplace_ln_lower((x - loc) / scale),
            Self::Logistic { loc, scale } => -softplus(-(x - loc) / scale),
            Self::Normal { mean, sd } => std_normal_ln_cdf((x - mean) / sd),
            Self::Mixture(ref m) => log_sum(m.active().map(|(w, d)| w.ln() + d.ln_cdf(x))),
            _ => self.cdf(x).ln(),
        }
    }

    fn ln_sf(&self, x: T) -> T {
        match *self {
            Self::Gumbel { loc, scale } => {
                let z = (x - loc) / scale;
                let t = (-z).exp();
                if t < T::of(1e-5) {
                    // −expm1(−t) = t(1 − t/2 + …)
                    -z - T::half() * t
                } else {
                    (-(-t).exp_m1()).ln()
                }
            }
            Self::Laplace { loc, scale } => laplace_ln_lower(-(x - loc) / scale),
            Self::Logistic { loc, scale } => -softplus((x - loc) / scale),
            Self::Normal { mean, sd } => std_normal_ln_cdf(-(x - mean) / sd),
            Self::Mixture(ref m) => log_sum(m.active().map(|(w, d)| w.ln() + d.ln_sf(x))),
            _ => self.sf(x).ln(),
        }
    }

    fn in_p01(&self) -> bool {
        match self {
            Self::Dirac { .. } | Self::Empirical(_) => false,
            // one strictly-inside component with positive weight keeps the whole mixture inside
            Self::Mixture(m) => m.active().any(|(_, d)| d.in_p01()),
            _ => true,
        }
    }

    fn breakpoints(&self, tail_probability: T) -> Vec<T> {
        let mut out = match self {
            Self::Dirac { point } => vec![*point],
            Self::Empirical(e) => e.atoms.clone(),
            Self::Mixture(m) => m.active().flat_map(|(_, d)| d.breakpoints(tail_probability)).collect(),
            _ => vec![
                self.quantile_unchecked(tail_probability),
                self.quantile_unchecked(T::half()),
                self.quantile_unchecked(T::one() - tail_probability),
            ],
        };
        sort_dedup(&mut out);
        out
    }

    fn density(&self, x: T) -> Option<T> {
        self.is_continuous().then(|| self.continuous_density(x))
    }

    fn is_absolutely_continuous(&self) -> bool {
        self.is_continuous()
    }
}

/// `ln(1 + eᵃ)` without overflow.
pub(crate) fn softplus<T: Real>(a: T) -> T {
    a.max(T::zero()) + (-a.abs()).exp().ln_1p()
}

/// `ln Σ exp(vᵢ)`.
pub(crate) fn log_sum<T: Real>(values: impl Iterator<Item = T>) -> T {
    let v: Vec<T> = values.collect();
    let m = v.iter().copied().fold(T::neg_infinity(), T::max);
    if m == T::neg_infinity() || m.is_nan() {
        return m;
    }
    m + v.iter().map(|&x| (x - m).exp()).sum::<T>().ln()
}

/// `ln P(Z < z)` for a standard Laplace variable.
fn laplace_ln_lower<T: Real>(z: T) -> T {
    if z <= T::zero() {
        T::half().ln() + z
    } else {
        (-T::half() * (-z).exp()).ln_1p()
    }
}

pub(crate) fn sort_dedup<T: Real>(v: &mut Vec<T>) {
    v.retain(|x| x.is_finite());
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    v.dedup();
}

/// A finitely supported distribution `{(xᵢ, pᵢ)}` used by the logarithmic score.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiscreteRepr<T>", into = "DiscreteRepr<T>", bound = "T: Real")]
pub struct DiscreteDistribution<T> {
    points: Vec<T>,
    masses: Vec<T>,
}

impl<T: Real> DiscreteDistribution<T> {
    /// Masses must be strictly positive and sum to one within `1e-12`; points must be distinct.
    pub fn new(points: Vec<T>, masses: Vec<T>) -> Result<Self> {
        if points.is_empty() || points.len() != masses.len() {
            return Err(Error::InvalidParameter(
                "discrete distribution needs equally many points and masses (at least one)".into(),
            ));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("discrete points must be finite".into()));
        }
        if masses.iter().any(|&m| !(m > T::zero() && m <= T::one())) {
            return Err(Error::InvalidParameter("discrete masses must lie in (0, 1]".into()));
        }
        let total: T = masses.iter().copied().sum();
        if (total - T::one()).abs() > T::of(1e-12).max(T::of_usize(4 * masses.len()) * T::epsilon()) {
            return Err(Error::InvalidParameter(format!("discrete masses sum to {total}, not 1")));
        }
        let mut sorted = points.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("discrete points must be distinct".into()));
        }
        Ok(Self { points, masses })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn masses(&self) -> &[T] {
        &self.masses
    }

    /// Mass of the atom at `x` (zero off the support).
    pub fn mass_at(&self, x: T) -> T {
        self.points
            .iter()
            .position(|&p| p == x)
            .map_or(T::zero(), |i| self.masses[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.points.iter().copied().zip(self.masses.iter().copied())
    }
}

// ---- JSON representation ----

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
enum DistributionRepr<T> {
    Gumbel { loc: T, scale: T },
    Laplace { loc: T, scale: T },
    Logistic { loc: T, scale: T },
    Normal { mean: T, sd: T },
    Dirac { point: T },
    Empirical { points: Vec<T> },
    Mixture { components: Vec<ComponentRepr<T>> },
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct ComponentRepr<T> {
    weight: T,
    dist: Distribution<T>,
}

impl<T: Real> TryFrom<DistributionRepr<T>> for Distribution<T> {
    type Error = Error;

    fn try_from(r: DistributionRepr<T>) -> Result<Self> {
        match r {
            DistributionRepr::Gumbel { loc, scale } => Self::gumbel(loc, scale),
            DistributionRepr::Laplace { loc, scale } => Self::laplace(loc, scale),
            DistributionRepr::Logistic { loc, scale } => Self::logistic(loc, scale),
            DistributionRepr::Normal { mean, sd } => Self::normal(mean, sd),
            DistributionRepr::Dirac { point } => Self::dirac(point),
            DistributionRepr::Empirical { points } => Self::empirical(&points),
            DistributionRepr::Mixture { components } => {
                Self::mixture(components.into_iter().map(|c| (c.weight, c.dist)).collect())
            }
        }
    }
}

impl<T: Real> From<Distribution<T>> for DistributionRepr<T> {
    fn from(d: Distribution<T>) -> Self {
        match d {
            Distribution::Gumbel { loc, scale } => Self::Gumbel { loc, scale },
            Distribution::Laplace { loc, scale } => Self::Laplace { loc, scale },
            Distribution::Logistic { loc, scale } => Self::Logistic { loc, scale },
            Distribution::Normal { mean, sd } => Self::Normal { mean, sd },
            Distribution::Dirac { point } => Self::Dirac { point },
            Distribution::Empirical(e) => Self::Empirical { points: e.points() },
            Distribution::Mixture(m) => Self::Mixture {
                components: m
                    .components
                    .into_iter()
                    .map(|(weight, dist)| ComponentRepr { weight, dist })
                    .collect(),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename = "discrete", bound = "T: Real")]
struct DiscreteRepr<T> {
    points: Vec<T>,
    masses: Vec<T>,
}

impl<T: Real> TryFrom<DiscreteRepr<T>> for DiscreteDistribution<T> {
    type Error = Error;

    fn try_from(r: DiscreteRepr<T>) -> Result<Self> {
        Self::new(r.points, r.masses)
    }
}

impl<T: Real> From<DiscreteDistribution<T>> for DiscreteRepr<T> {
    fn from(d: DiscreteDistribution<T>) -> Self {
        Self { points: d.points, masses: d.masses }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn families() -> Vec<Distribution<f64>> {
        vec![
            Distribution::gumbel(0.3, 1.7).unwrap(),
            Distribution::laplace(-1.0, 0.5).unwrap(),
            Distribution::logistic(2.0, 3.0).unwrap(),
            Distribution::normal(0.5, 2.0).unwrap(),
        ]
    }

    #[test]
    fn cdf_examples() {
        let g = Distribution::gumbel(0.0, 1.0).unwrap();
        assert_relative_eq!(g.cdf(0.0), (-1.0f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(g.cdf(0.0), 0.3678794, epsilon = 1e-7);
        let l = Distribution::laplace(0.0, 1.0).unwrap();
        assert_eq!(l.cdf(0.0), 0.5);
        let d = Distribution::dirac(1.5).unwrap();
        assert_eq!(d.cdf(1.5), 0.0);
        assert_eq!(d.cdf(1.5 + 1e-12), 1.0);
        assert_eq!(d.cdf_right(1.5), 1.0);
    }

    #[test]
    fn medians() {
        assert_eq!(Distribution::laplace(0.0, 1.0).unwrap().median(), 0.0);
        // bisection on exp(-exp(-m)) = 1/2
        let (mut lo, mut hi) = (-5.0f64, 5.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (-(-mid).exp()).exp() < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let m = Distribution::gumbel(0.0, 1.0).unwrap().median();
        assert_relative_eq!(m, lo, epsilon = 1e-14);
        assert_relative_eq!(m, 0.3665129, epsilon = 1e-7);
        let e = Distribution::empirical(&[4.0, 2.0, 3.0, 1.0]).unwrap();
        assert_eq!(e.median(), 2.0);
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(Distribution::logistic(0.0, 1.0).unwrap().quantile(0.5).unwrap(), 0.0);
        assert_relative_eq!(
            Distribution::laplace(0.0, 1.0).unwrap().quantile(0.25).unwrap(),
            0.5f64.ln(),
            max_relative = 1e-15
        );
        assert_eq!(Distribution::dirac(2.0).unwrap().quantile(0.7).unwrap(), 2.0);
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                Distribution::normal(0.0, 1.0).unwrap().quantile(p),
                Err(Error::ProbabilityOutOfRange(_))
            ));
        }
    }

    #[test]
    fn mixture_quantile_handles_atoms() {
        let m = Distribution::mixture(vec![
            (0.5, Distribution::dirac(0.0).unwrap()),
            (0.5, Distribution::normal(3.0, 1.0).unwrap()),
        ])
        .unwrap();
        assert_eq!(m.quantile(0.3).unwrap(), 0.0);
        assert_eq!(m.quantile(0.5).unwrap(), 0.0);
        let q = m.quantile(0.75).unwrap();
        assert_relative_eq!(q, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn quantile_cdf_round_trip() {
        for d in families() {
            for i in 1..100 {
                let p = i as f64 / 100.0;
                let x = d.quantile(p).unwrap();
                assert!((d.cdf(x) - p).abs() < 1e-10, "{} at {p}", d.label());
            }
        }
        let m = Distribution::mixture(vec![
            (0.5, Distribution::normal(0.0, 1.0).unwrap()),
            (0.5, Distribution::laplace(3.0, 2.0).unwrap()),
        ])
        .unwrap();
        for i in 1..100 {
            let p = i as f64 / 100.0;
            assert!((m.cdf(m.quantile(p).unwrap()) - p).abs() < 1e-10);
        }
    }

    #[test]
    fn sf_complements_cdf() {
        for d in families() {
            for i in -200..=200 {
                let x = i as f64 * 0.1;
                assert!((d.cdf(x) + d.sf(x) - 1.0).abs() < 1e-15);
            }
        }
        // right tail keeps relative precision
        let g = Distribution::gumbel(0.0, 1.0).unwrap();
        assert_relative_eq!(g.sf(40.0), (-40.0f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn density_matches_cdf_derivative() {
        for d in families() {
            for i in 0..100 {
                let x = -6.0 + 0.12 * i as f64;
                let h = 1e-5;
                let fd = (d.cdf(x + h) - d.cdf(x - h)) / (2.0 * h);
                let dens = d.density(x).unwrap();
                // Laplace has a kink at its location; skip points straddling it
                if matches!(d, Distribution::Laplace { loc, .. } if (x - loc).abs() < h) {
                    continue;
                }
                assert!((fd - dens).abs() < 1e-5, "{} at {x}", d.label());
            }
        }
        assert_relative_eq!(
            Distribution::normal(0.0, 1.0).unwrap().density(0.0).unwrap(),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
            max_relative = 1e-15
        );
        assert_eq!(Distribution::laplace(0.0, 1.0).unwrap().density(0.0), Some(0.5));
        assert_eq!(Distribution::dirac(0.0).unwrap().density(0.0), None);
        assert_eq!(Distribution::empirical(&[1.0]).unwrap().density(1.0), None);
    }

    #[test]
    fn p01_membership() {
        assert!(Distribution::gumbel(0.0, 1.0).unwrap().in_p01());
        assert!(!Distribution::dirac(0.0).unwrap().in_p01());
        assert!(!Distribution::empirical(&[0.0, 1.0]).unwrap().in_p01());
        let m = Distribution::mixture(vec![
            (0.5, Distribution::normal(0.0, 1.0).unwrap()),
            (0.5, Distribution::laplace(3.0, 2.0).unwrap()),
        ])
        .unwrap();
        assert!(m.in_p01());
        for d in families() {
            for i in -30..=30 {
                let c = d.cdf(i as f64 * 0.1);
                assert!(c > 0.0 && c < 1.0);
            }
            for i in -300..=300 {
                let x = i as f64 * 0.1;
                assert!(d.ln_cdf(x).is_finite() && d.ln_sf(x).is_finite(), "{d:?} {x}");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_consistent() {
        assert_eq!(Distribution::dirac(3.0).unwrap().sample(9, 5), vec![3.0; 5]);
        let d = Distribution::logistic(0.0, 1.0).unwrap();
        assert_eq!(d.sample(42, 100), d.sample(42, 100));
        assert_ne!(d.sample(42, 100), d.sample(43, 100));
        let mut families = families();
        families.push(Distribution::logistic(0.0, 1.0).unwrap());
        for d in families {
            let mut xs = d.sample(42, 100_000);
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = xs.len() as f64;
            let ks = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let c = d.cdf(x);
                    (c - i as f64 / n).abs().max((c - (i + 1) as f64 / n).abs())
                })
                .fold(0.0, f64::max);
            assert!(ks < 0.01, "{} KS {ks}", d.label());
        }
    }

    #[test]
    fn empirical_merges_duplicates() {
        let e = Distribution::empirical(&[1.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(e.cdf(1.0), 0.0);
        assert_eq!(e.cdf(1.5), 0.5);
        assert_eq!(e.sf(2.0), 0.5);
        assert_eq!(e.atoms(), vec![(1.0, 0.5), (2.0, 0.25), (3.0, 0.25)]);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(Distribution::normal(0.0, 0.0).is_err());
        assert!(Distribution::gumbel(0.0, -1.0).is_err());
        assert!(Distribution::logistic(f64::NAN, 1.0).is_err());
        assert!(Distribution::<f64>::empirical(&[]).is_err());
        assert!(Distribution::mixture(vec![(0.3, Distribution::dirac(0.0).unwrap())]).is_err());
        let inner = Distribution::mixture(vec![(1.0, Distribution::dirac(0.0).unwrap())]).unwrap();
        assert!(Distribution::mixture(vec![(1.0, inner)]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![0.5, 0.6]).is_err());
        assert!(DiscreteDistribution::new(vec![0.0, 1.0], vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn json_format() {
        let d: Distribution<f64> = serde_json::from_str(r#"{"kind":"gumbel","loc":0.0,"scale":1.0}"#).unwrap();
        assert_eq!(d, Distribution::gumbel(0.0, 1.0).unwrap());
        let d: Distribution<f64> = serde_json::from_str(
            r#"{"kind":"mixture","components":[{"weight":0.5,"dist":{"kind":"dirac","point":2.0}},
                {"weight":0.5,"dist":{"kind":"empirical","points":[3,1,1]}}]}"#,
        )
        .unwrap();
        let back: Distribution<f64> = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Distribution<f64>>(r#"{"kind":"normal","mean":0,"sd":-1}"#).is_err());
        assert!(serde_json::from_str::<Distribution<f64>>(r#"{"kind":"cauchy","loc":0,"scale":1}"#).is_err());
        let dd: DiscreteDistribution<f64> =
            serde_json::from_str(r#"{"kind":"discrete","points":[0,1],"masses":[0.5,0.5]}"#).unwrap();
        assert_eq!(dd.mass_at(1.0), 0.5);
    }

    #[test]
    fn single_precision_family() {
        let d = Distribution::<f32>::logistic(0.0, 1.0).unwrap();
        assert!((d.cdf(0.0) - 0.5).abs() < 1e-7);
        let q = d.quantile(0.9).unwrap();
        assert!((d.cdf(q) - 0.9).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn cdf_is_monotone(loc in -5.0f64..5.0, scale in 0.1f64..5.0, kind in 0usize..4) {
            let d = match kind {
                0 => Distribution::gumbel(loc, scale),
                1 => Distribution::laplace(loc, scale),
                2 => Distribution::logistic(loc, scale),
                _ => Distribution::normal(loc, scale),
            }.unwrap();
            let mut prev = 0.0;
            for i in 0..1000 {
                let c = d.cdf(-50.0 + 0.1 * i as f64);
                prop_assert!(c >= prev);
                prev = c;
            }
            prop_assert!(d.cdf(-1e6) < 1e-12);
            prop_assert!(d.cdf(1e6) > 1.0 - 1e-12);
        }

        #[test]
        fn empirical_quantile_is_generalized_inverse(
            pts in proptest::collection::vec(-10i32..10, 1..30),
            p in 0.001f64..0.999,
        ) {
            let pts: Vec<f64> = pts.into_iter().map(f64::from).collect();
            let d = Distribution::empirical(&pts).unwrap();
            let q = d.quantile(p).unwrap();
            prop_assert!(d.cdf_right(q) >= p);
            prop_assert!(d.cdf(q) < p);
        }
    }
}
