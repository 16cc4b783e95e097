//! Numerical checks of (strict) propriety on finite grids of distributions.
//!
//! A rule is proper when `S(G, G) ≤ S(F, G)` for every forecast `F` and truth `G`.
//! [`check_proper`] evaluates the full matrix `M[i][j] = S(Fᵢ, Gⱼ)` on a grid and
//! looks at the column margins `M[i][j] − M[j][j]`. Columns whose diagonal is
//! infinite (or could not be evaluated) are inconclusive rather than failed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, Distribution, DistributionFunction};
use crate::error::{Error, Result};
use crate::quad::QuadConfig;
use crate::rules::pointwise::{argmin_g, g_eval};
use crate::rules::properize::{p_tilde_star, TildeStar};
use crate::rules::tilde::{entropy_s_tilde, expected_s_tilde_closed};
use crate::rules::{expected_score, RuleSpec, ScoreValue};
use crate::scalar::Real;
use crate::weights::WeightSpec;

pub use crate::rules::pointwise::amgm_gap;

/// Absolute tolerance on expected scores used when none is given.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// A finite list of distributions to test a rule on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr<T>", bound = "T: Real")]
pub struct DistGrid<T> {
    pub description: String,
    pub members: Vec<Distribution<T>>,
}

impl<T: Real> DistGrid<T> {
    pub fn new(description: impl Into<String>, members: Vec<Distribution<T>>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidParameter("grid has no members".into()));
        }
        Ok(Self { description: description.into(), members })
    }

    /// All `(loc, scale)` combinations of one parametric family.
    pub fn lattice(family: &str, locs: &[T], scales: &[T]) -> Result<Self> {
        let mut members = Vec::with_capacity(locs.len() * scales.len());
        for &loc in locs {
            for &scale in scales {
                members.push(match family {
                    "gumbel" => Distribution::gumbel(loc, scale)?,
                    "laplace" => Distribution::laplace(loc, scale)?,
                    "logistic" => Distribution::logistic(loc, scale)?,
                    "normal" => Distribution::normal(loc, scale)?,
                    other => return Err(Error::InvalidParameter(format!("unknown family `{other}`"))),
                });
            }
        }
        Self::new(format!("{family} lattice {}x{}", locs.len(), scales.len()), members)
    }

    /// Finitely supported members, stored as mixtures of point masses.
    pub fn discrete(members: &[DiscreteDistribution<T>]) -> Result<Self> {
        let members = members
            .iter()
            .map(|d| {
                if d.points().len() == 1 {
                    return Distribution::dirac(d.points()[0]);
                }
                Distribution::mixture(d.iter().map(|(x, p)| Ok((p, Distribution::dirac(x)?))).collect::<Result<_>>()?)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(format!("discrete ({} members)", members.len()), members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn labels(&self) -> Vec<String> {
        self.members.iter().map(Distribution::label).collect()
    }
}

#[derive(Deserialize)]
#[serde(untagged, bound = "T: Real")]
enum GridRepr<T> {
    Members {
        members: Vec<Distribution<T>>,
        #[serde(default)]
        description: Option<String>,
    },
    Lattice {
        family: String,
        loc: Vec<T>,
        scale: Vec<T>,
    },
    Discrete {
        discrete: Vec<DiscreteDistribution<T>>,
    },
}

impl<T: Real> TryFrom<GridRepr<T>> for DistGrid<T> {
    type Error = Error;

    fn try_from(r: GridRepr<T>) -> Result<Self> {
        match r {
            GridRepr::Members { members, description } => {
                let n = members.len();
                Self::new(description.unwrap_or_else(|| format!("{n} members")), members)
            }
            GridRepr::Lattice { family, loc, scale } => Self::lattice(&family, &loc, &scale),
            GridRepr::Discrete { discrete } => Self::discrete(&discrete),
        }
    }
}

/// One matrix cell: a score, or the error that prevented computing it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Entry<T> {
    pub score: Option<ScoreValue<T>>,
    pub error: Option<String>,
}

impl<T: Real> Entry<T> {
    /// The score value, when it was computed.
    pub fn value(&self) -> Option<T> {
        self.score.map(|s| s.value)
    }
}

/// `M[i][j] = S(Fᵢ, Gⱼ)`: rows are forecasts, columns are truths.
pub fn score_matrix<T: Real>(rule: &RuleSpec<T>, grid: &DistGrid<T>, cfg: &QuadConfig<T>) -> Vec<Vec<Entry<T>>> {
    let n = grid.len();
    let flat: Vec<Entry<T>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            match expected_score(rule, &grid.members[i], &grid.members[j], cfg) {
                Ok(s) => Entry { score: Some(s), error: None },
                Err(e) => Entry { score: None, error: Some(e.to_string()) },
            }
        })
        .collect();
    flat.chunks(n).map(<[Entry<T>]>::to_vec).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Violation<T> {
    pub forecast: usize,
    pub truth: usize,
    #[serde(with = "crate::serde_ext::extended")]
    pub margin: T,
}

/// Outcome of [`check_proper`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PropReport<T> {
    pub rule: RuleSpec<T>,
    pub grid: String,
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<Entry<T>>>,
    /// `min_j min_{i≠j} (M[i][j] − M[j][j])` over conclusive columns; `0` if there are none.
    #[serde(with = "crate::serde_ext::extended")]
    pub worst_margin: T,
    pub violation: Option<Violation<T>>,
    pub inconclusive_columns: Vec<usize>,
    #[serde(with = "crate::serde_ext::extended")]
    pub tolerance: T,
    pub proper: bool,
}

/// Builds a report from an already computed matrix.
pub fn assess<T: Real>(
    rule: &RuleSpec<T>,
    grid: &DistGrid<T>,
    matrix: Vec<Vec<Entry<T>>>,
    tolerance: T,
) -> PropReport<T> {
    let n = matrix.len();
    let mut worst: Option<T> = None;
    let mut violation = None;
    let mut inconclusive = Vec::new();
    for j in 0..n {
        let diag = match matrix[j][j].score {
            Some(s) if !s.divergent => s.value,
            _ => {
                inconclusive.push(j);
                continue;
            }
        };
        if (0..n).any(|i| matrix[i][j].score.is_none()) {
            inconclusive.push(j);
            continue;
        }
        for (i, row) in matrix.iter().enumerate() {
            if i == j {
                continue;
            }
            let margin = row[j].value().expect("checked above") - diag;
            worst = Some(worst.map_or(margin, |w: T| w.min(margin)));
            if margin < -tolerance && violation.is_none() {
                violation = Some(Violation { forecast: i, truth: j, margin });
            }
        }
    }
    PropReport {
        rule: rule.clone(),
        grid: grid.description.clone(),
        labels: grid.labels(),
        matrix,
        worst_margin: worst.unwrap_or_else(T::zero),
        proper: violation.is_none(),
        violation,
        inconclusive_columns: inconclusive,
        tolerance,
    }
}

/// Passes iff `M[j][j] ≤ M[i][j] + tolerance` on every conclusive column.
pub fn check_proper<T: Real>(
    rule: &RuleSpec<T>,
    grid: &DistGrid<T>,
    cfg: &QuadConfig<T>,
    tolerance: T,
) -> Result<PropReport<T>> {
    if !(tolerance > T::zero()) {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    cfg.validate()?;
    Ok(assess(rule, grid, score_matrix(rule, grid, cfg), tolerance))
}

/// Evidence that the unproperized `S̃_{α,w}` is improper at `G`.
#[derive(Clone, Debug)]
pub struct Witness<'a, T> {
    /// `P̃*(G, α)`, which beats truthful reporting whenever it differs from `G`.
    pub challenger: TildeStar<'a, T, Distribution<T>>,
    pub truthful_score: ScoreValue<T>,
    pub challenger_score: ScoreValue<T>,
    /// `S̃(G, G) − S̃(P̃*, G)`; positive certifies impropriety.
    pub margin: T,
}

/// Pits `G` against its own properization image under the raw `S̃` rule.
///
/// If the truthful score is infinite while the challenger's is finite, the margin is
/// `+∞`. Returns `None` when the challenger's expected score diverges (inconclusive).
pub fn find_violation<'a, T: Real>(
    rule: &RuleSpec<T>,
    truth: &'a Distribution<T>,
    cfg: &QuadConfig<T>,
) -> Result<Option<Witness<'a, T>>> {
    let (alpha, weight) = match rule {
        RuleSpec::STilde { alpha, weight } => (alpha.value(), weight),
        other => {
            return Err(Error::RuleNotApplicable {
                rule: other.name().into(),
                reason: "find_violation targets the unproperized s_tilde rule".into(),
            })
        }
    };
    let challenger = p_tilde_star(truth, alpha)?;
    let truthful = expected_s_tilde_closed(truth, truth, alpha, weight, cfg)?;
    if alpha == T::half() {
        // the map is the identity here, so there is nothing to beat
        return Ok(Some(Witness { challenger, truthful_score: truthful, challenger_score: truthful, margin: T::zero() }));
    }
    let challenged = expected_s_tilde_closed(&challenger, truth, alpha, weight, cfg)?;
    if challenged.divergent {
        return Ok(None);
    }
    Ok(Some(Witness {
        challenger,
        margin: if truthful.divergent { T::infinity() } else { truthful.value - challenged.value },
        truthful_score: truthful,
        challenger_score: challenged,
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case", bound = "T: Real")]
pub enum StrictnessVerdict<T> {
    /// Equal expected scores and indistinguishable CDFs.
    Identical { gap: T, max_cdf_deviation: T },
    /// The truthful forecast wins by more than the tolerance.
    StrictGap { gap: T, max_cdf_deviation: T },
    /// Equal expected scores although the CDFs differ.
    Counterexample { gap: T, max_cdf_deviation: T },
    /// The truthful forecast loses by more than the tolerance.
    ProprietyViolation { gap: T, max_cdf_deviation: T },
}

impl<T: Real> StrictnessVerdict<T> {
    pub fn gap(&self) -> T {
        match *self {
            Self::Identical { gap, .. }
            | Self::StrictGap { gap, .. }
            | Self::Counterexample { gap, .. }
            | Self::ProprietyViolation { gap, .. } => gap,
        }
    }

    /// Consistent with strict propriety.
    pub fn is_consistent(&self) -> bool {
        matches!(self, Self::Identical { .. } | Self::StrictGap { .. })
    }
}

/// Checks "equal expected `S̃*` score ⇒ equal distributions" for one pair.
///
/// `gap = S̃*(F, G) − S̃*(G, G)`. If `|gap| ≤ tolerance`, the CDFs must agree within
/// `√tolerance` on a dense grid covering both bulks. Both inputs must be continuous
/// members of `P_(0,1)` with finite entropy.
pub fn strictness_check<T: Real>(
    forecast: &Distribution<T>,
    truth: &Distribution<T>,
    weight: &WeightSpec<T>,
    cfg: &QuadConfig<T>,
    tolerance: T,
) -> Result<StrictnessVerdict<T>> {
    if !(tolerance > T::zero()) {
        return Err(Error::InvalidParameter("tolerance must be > 0".into()));
    }
    let weight = weight.clone().require_strictly_positive()?;
    for d in [forecast, truth] {
        if !d.is_continuous() || !d.in_p01() {
            return Err(Error::Precondition(format!("{} is not a continuous member of P_(0,1)", d.label())));
        }
    }
    let entropy_f = entropy_s_tilde(forecast, &weight, cfg)?;
    let entropy_g = entropy_s_tilde(truth, &weight, cfg)?;
    if entropy_f.divergent || entropy_g.divergent {
        return Err(Error::Precondition("infinite entropy".into()));
    }
    let cross = expected_s_tilde_closed(forecast, truth, T::half(), &weight, cfg)?;
    if cross.divergent {
        return Ok(StrictnessVerdict::StrictGap { gap: T::infinity(), max_cdf_deviation: max_cdf_deviation(forecast, truth) });
    }
    let gap = cross.value - entropy_g.value;
    let dev = max_cdf_deviation(forecast, truth);
    Ok(if gap < -tolerance {
        StrictnessVerdict::ProprietyViolation { gap, max_cdf_deviation: dev }
    } else if gap > tolerance {
        StrictnessVerdict::StrictGap { gap, max_cdf_deviation: dev }
    } else if dev <= tolerance.sqrt() {
        StrictnessVerdict::Identical { gap, max_cdf_deviation: dev }
    } else {
        StrictnessVerdict::Counterexample { gap, max_cdf_deviation: dev }
    })
}

fn max_cdf_deviation<T: Real>(f: &Distribution<T>, g: &Distribution<T>) -> T {
    let tail = T::of(1e-9);
    let lo = f.quantile(tail).unwrap_or(T::zero()).min(g.quantile(tail).unwrap_or(T::zero()));
    let hi = f.quantile(T::one() - tail).unwrap_or(T::zero()).max(g.quantile(T::one() - tail).unwrap_or(T::zero()));
    let n = 4000;
    (0..=n)
        .map(|k| {
            let x = lo + (hi - lo) * T::of_usize(k) / T::of_usize(n);
            (f.cdf(x) - g.cdf(x)).abs()
        })
        .fold(T::zero(), T::max)
}

/// Largest distance between the analytic minimizer of `g` and a brute-force
/// minimizer over `q_grid`, across `x_grid`.
pub fn verify_bayes_act<T: Real, D: DistributionFunction<T> + ?Sized>(
    truth: &D,
    alpha: T,
    x_grid: &[T],
    q_grid: &[T],
) -> Result<T> {
    crate::rules::check_alpha(alpha)?;
    if !truth.in_p01() {
        return Err(Error::NotInP01);
    }
    if q_grid.iter().any(|&q| !(q > T::zero() && q < T::one())) || q_grid.is_empty() {
        return Err(Error::InvalidParameter("q grid must be a nonempty subset of (0, 1)".into()));
    }
    let devs: Vec<T> = x_grid
        .par_iter()
        .map(|&x| {
            let p = truth.cdf(x);
            if !(p > T::zero() && p < T::one()) {
                return Err(Error::ProbabilityOutOfRange(p.to_f64().unwrap_or(f64::NAN)));
            }
            let mut best = (T::infinity(), q_grid[0]);
            for &q in q_grid {
                let v = g_eval(q, p, alpha, T::one());
                if v < best.0 {
                    best = (v, q);
                }
            }
            Ok((best.1 - argmin_g(p, alpha)).abs())
        })
        .collect::<Result<_>>()?;
    Ok(devs.into_iter().fold(T::zero(), T::max))
}

/// `n` equally spaced interior points of `(0, 1)`.
pub fn uniform_q_grid<T: Real>(n: usize) -> Vec<T> {
    (1..=n).map(|k| T::of_usize(k) / T::of_usize(n + 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    fn star() -> RuleSpec<f64> {
        RuleSpec::s_tilde_star(WeightSpec::default()).unwrap()
    }

    #[test]
    fn point_mass_crps_matrix() {
        let grid = DistGrid::new("diracs", vec![Distribution::dirac(0.0).unwrap(), Distribution::dirac(1.0).unwrap()]).unwrap();
        let m = score_matrix(&RuleSpec::Crps, &grid, &cfg());
        let expect = [[0.0, 1.0], [1.0, 0.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((m[i][j].value().unwrap() - expect[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn single_member_grid() {
        let grid = DistGrid::new("one", vec![Distribution::logistic(0.0, 1.0).unwrap()]).unwrap();
        let r = check_proper(&star(), &grid, &cfg(), DEFAULT_TOLERANCE).unwrap();
        assert!((r.matrix[0][0].value().unwrap() - 2.0 * PI).abs() < 1e-6);
        assert_eq!(r.worst_margin, 0.0);
        assert!(r.proper);
    }

    #[test]
    fn grid_json_forms() {
        let g: DistGrid<f64> = serde_json::from_str(r#"{"family":"logistic","loc":[-1,0,1],"scale":[0.5,1]}"#).unwrap();
        assert_eq!(g.len(), 6);
        let g: DistGrid<f64> =
            serde_json::from_str(r#"{"members":[{"kind":"gumbel","loc":0,"scale":1},{"kind":"dirac","point":2}]}"#).unwrap();
        assert_eq!(g.len(), 2);
        let g: DistGrid<f64> =
            serde_json::from_str(r#"{"discrete":[{"kind":"discrete","points":[0,1],"masses":[0.1,0.9]}]}"#).unwrap();
        assert_eq!(g.members[0].atoms(), vec![(0.0, 0.1), (1.0, 0.9)]);
        assert!(serde_json::from_str::<DistGrid<f64>>(r#"{"family":"cauchy","loc":[0],"scale":[1]}"#).is_err());
        assert!(serde_json::from_str::<DistGrid<f64>>(r#"{"members":[]}"#).is_err());
    }

    #[test]
    fn crps_proper_on_normals() {
        let grid = DistGrid::lattice("normal", &[-1.0, 0.0, 1.5], &[0.5, 2.0]).unwrap();
        let r = check_proper(&RuleSpec::Crps, &grid, &cfg(), DEFAULT_TOLERANCE).unwrap();
        assert!(r.proper && r.worst_margin > 0.0, "{r:?}");
        assert!(r.inconclusive_columns.is_empty());
    }

    #[test]
    fn infinite_diagonal_is_inconclusive() {
        let rule = RuleSpec::Crps;
        let grid = DistGrid::lattice("normal", &[0.0, 1.0], &[1.0]).unwrap();
        let mut m = score_matrix(&rule, &grid, &cfg());
        m[1][1].score = Some(ScoreValue::infinite());
        let r = assess(&rule, &grid, m, 1e-6);
        assert_eq!(r.inconclusive_columns, vec![1]);
        assert!(r.proper);
    }

    #[test]
    fn violation_is_recorded() {
        let rule = RuleSpec::Crps;
        let grid = DistGrid::lattice("normal", &[0.0, 1.0], &[1.0]).unwrap();
        let mut m = score_matrix(&rule, &grid, &cfg());
        m[1][0].score = Some(ScoreValue::exact(0.0));
        let r = assess(&rule, &grid, m, 1e-6);
        assert!(!r.proper);
        assert_eq!(r.violation.unwrap().forecast, 1);
        assert_eq!(r.violation.unwrap().truth, 0);
    }

    #[test]
    fn raw_rule_is_improper() {
        let l = Distribution::logistic(0.0, 1.0).unwrap();
        // with unit weight the truthful expected score is infinite for α ≥ 1
        let w = find_violation(&RuleSpec::s_tilde(2.0, WeightSpec::default()).unwrap(), &l, &cfg()).unwrap().unwrap();
        assert!(w.truthful_score.divergent && w.margin == f64::INFINITY);
        assert!((w.challenger_score.value - 2.0 * PI).abs() < 1e-6);
        // a decaying weight keeps both finite
        let pdf = WeightSpec::gaussian_pdf(0.0, 1.0).unwrap();
        for alpha in [1.0, 2.0] {
            let w = find_violation(&RuleSpec::s_tilde(alpha, pdf.clone()).unwrap(), &l, &cfg()).unwrap().unwrap();
            assert!(w.margin.is_finite() && w.margin > 1e-4, "{}", w.margin);
        }
        let w = find_violation(&RuleSpec::s_tilde(0.5, WeightSpec::default()).unwrap(), &l, &cfg()).unwrap().unwrap();
        assert_eq!(w.margin, 0.0);
        let g = Distribution::gumbel(0.0, 1.0).unwrap();
        let w = find_violation(&RuleSpec::s_tilde(1.0, WeightSpec::default()).unwrap(), &g, &cfg()).unwrap().unwrap();
        assert!(w.margin > 1e-4);
        assert!(find_violation(&RuleSpec::Crps, &l, &cfg()).is_err());
    }

    #[test]
    fn strictness_examples() {
        let one = WeightSpec::default();
        let lap = Distribution::laplace(0.0, 1.0).unwrap();
        assert!(matches!(strictness_check(&lap, &lap, &one, &cfg(), 1e-8).unwrap(), StrictnessVerdict::Identical { .. }));
        let a = Distribution::logistic(0.0, 1.0).unwrap();
        let b = Distribution::logistic(0.5, 1.0).unwrap();
        let v = strictness_check(&a, &b, &one, &cfg(), 1e-8).unwrap();
        assert!(matches!(v, StrictnessVerdict::StrictGap { .. }) && v.gap() > 0.0);
        let v = strictness_check(&a, &Distribution::gumbel(0.0, 1.0).unwrap(), &one, &cfg(), 1e-8).unwrap();
        assert!(v.gap() > 0.0 && v.is_consistent());
        let d = Distribution::dirac(0.0).unwrap();
        assert!(matches!(strictness_check(&d, &a, &one, &cfg(), 1e-8), Err(Error::Precondition(_))));
    }

    #[test]
    fn bayes_act_examples() {
        let x: Vec<f64> = (0..101).map(|k| -5.0 + 0.1 * k as f64).collect();
        let q = uniform_q_grid::<f64>(100_000);
        let l = Distribution::logistic(0.0, 1.0).unwrap();
        assert!(verify_bayes_act(&l, 1.0, &x, &q).unwrap() < 1e-4);
        assert!(verify_bayes_act(&l, 0.5, &x, &q).unwrap() < 1e-5);
        let x: Vec<f64> = (0..101).map(|k| -2.0 + 0.08 * k as f64).collect();
        let g = Distribution::gumbel(0.0, 1.0).unwrap();
        assert!(verify_bayes_act(&g, 3.0, &x, &q).unwrap() < 1e-4);
    }
}
