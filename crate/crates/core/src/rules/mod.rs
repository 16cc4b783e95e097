//! Scoring rules, their properizations and expected scores.
//!
//! All rules here are negatively oriented (smaller is better) and nonnegative.
//! A rule whose defining integral does not converge evaluates to `+∞` with the
//! `divergent` flag set; that is a value, not an error.

use std::cell::{Cell, RefCell};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dist::{Distribution, DistributionFunction};
use crate::error::{Error, Result};
use crate::quad::{expect_under_with_breaks, integrate, IntegralResult, NonFinitePolicy, QuadConfig};
use crate::scalar::Real;
use crate::weights::WeightSpec;

pub mod crps;
pub mod log_score;
pub mod pointwise;
pub mod properize;
pub mod remark;
pub mod tilde;

pub use crps::{crps, s_alpha, s_alpha_star, wcrps};
pub use log_score::{expected_log_score, log_score, shannon_entropy};
pub use pointwise::{amgm_gap, argmin_g, bg_star_value, g_double_prime, g_eval, g_prime, tilde_star_value};
pub use properize::{p_tilde_star, properize_map_bg, BgStar, TildeStar};
pub use remark::{remark_first, remark_second};
pub use tilde::{entropy_s_tilde, expected_s_tilde_closed, s_tilde, s_tilde_star};

/// A strictly positive, finite exponent.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Alpha<T>(T);

impl<T: Real> Alpha<T> {
    pub fn new(value: T) -> Result<Self> {
        check_alpha(value)?;
        Ok(Self(value))
    }

    pub fn value(self) -> T {
        self.0
    }

    /// `α ∈ (0, 1]`: the `S_α` properization is a point mass at the median.
    pub fn is_median_regime(self) -> bool {
        self.0 <= T::one()
    }
}

impl<T: Real> Serialize for Alpha<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for Alpha<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Alpha::new(T::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha.is_finite() && alpha > T::zero() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")))
    }
}

/// Which rule to evaluate, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RuleRepr<T>", into = "RuleRepr<T>", bound = "T: Real")]
pub enum RuleSpec<T> {
    Crps,
    Wcrps { weight: WeightSpec<T> },
    SAlpha { alpha: Alpha<T> },
    SAlphaStar { alpha: Alpha<T> },
    STilde { alpha: Alpha<T>, weight: WeightSpec<T> },
    /// The closed form does not depend on `alpha`; it is kept for reporting.
    STildeStar { alpha: Alpha<T>, weight: WeightSpec<T> },
    LogScore,
    RemarkFirst { alpha: Alpha<T> },
    RemarkSecond { alpha: Alpha<T> },
}

impl<T: Real> RuleSpec<T> {
    pub fn wcrps(weight: WeightSpec<T>) -> Self {
        Self::Wcrps { weight }
    }

    pub fn s_alpha(alpha: T) -> Result<Self> {
        Ok(Self::SAlpha { alpha: Alpha::new(alpha)? })
    }

    pub fn s_alpha_star(alpha: T) -> Result<Self> {
        Ok(Self::SAlphaStar { alpha: Alpha::new(alpha)? })
    }

    pub fn s_tilde(alpha: T, weight: WeightSpec<T>) -> Result<Self> {
        Ok(Self::STilde { alpha: Alpha::new(alpha)?, weight: weight.require_strictly_positive()? })
    }

    pub fn s_tilde_star(weight: WeightSpec<T>) -> Result<Self> {
        Ok(Self::STildeStar { alpha: Alpha(T::one()), weight: weight.require_strictly_positive()? })
    }

    pub fn remark_first(alpha: T) -> Result<Self> {
        Ok(Self::RemarkFirst { alpha: Alpha::new(alpha)? })
    }

    pub fn remark_second(alpha: T) -> Result<Self> {
        Ok(Self::RemarkSecond { alpha: Alpha::new(alpha)? })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Crps => "crps",
            Self::Wcrps { .. } => "wcrps",
            Self::SAlpha { .. } => "s_alpha",
            Self::SAlphaStar { .. } => "s_alpha_star",
            Self::STilde { .. } => "s_tilde",
            Self::STildeStar { .. } => "s_tilde_star",
            Self::LogScore => "log_score",
            Self::RemarkFirst { .. } => "remark_first",
            Self::RemarkSecond { .. } => "remark_second",
        }
    }

    pub fn alpha(&self) -> Option<T> {
        match self {
            Self::SAlpha { alpha }
            | Self::SAlphaStar { alpha }
            | Self::STilde { alpha, .. }
            | Self::STildeStar { alpha, .. }
            | Self::RemarkFirst { alpha }
            | Self::RemarkSecond { alpha } => Some(alpha.value()),
            _ => None,
        }
    }

    pub fn weight(&self) -> Option<&WeightSpec<T>> {
        match self {
            Self::Wcrps { weight } | Self::STilde { weight, .. } | Self::STildeStar { weight, .. } => Some(weight),
            _ => None,
        }
    }

    /// Whether the rule is only defined on distributions in `P_(0,1)`.
    pub fn requires_p01(&self) -> bool {
        matches!(self, Self::STilde { .. } | Self::STildeStar { .. } | Self::RemarkSecond { .. })
    }
}

fn default_alpha<T: Real>() -> T {
    T::one()
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields, bound = "T: Real")]
enum RuleRepr<T> {
    Crps,
    Wcrps {
        #[serde(default)]
        weight: WeightSpec<T>,
    },
    SAlpha {
        alpha: T,
    },
    SAlphaStar {
        alpha: T,
    },
    STilde {
        alpha: T,
        #[serde(default)]
        weight: WeightSpec<T>,
    },
    STildeStar {
        #[serde(default = "default_alpha")]
        alpha: T,
        #[serde(default)]
        weight: WeightSpec<T>,
    },
    LogScore,
    RemarkFirst {
        alpha: T,
    },
    RemarkSecond {
        alpha: T,
    },
}

impl<T: Real> TryFrom<RuleRepr<T>> for RuleSpec<T> {
    type Error = Error;

    fn try_from(r: RuleRepr<T>) -> Result<Self> {
        Ok(match r {
            RuleRepr::Crps => Self::Crps,
            RuleRepr::Wcrps { weight } => Self::Wcrps { weight },
            RuleRepr::SAlpha { alpha } => Self::s_alpha(alpha)?,
            RuleRepr::SAlphaStar { alpha } => Self::s_alpha_star(alpha)?,
            RuleRepr::STilde { alpha, weight } => Self::s_tilde(alpha, weight)?,
            RuleRepr::STildeStar { alpha, weight } => {
                Self::STildeStar { alpha: Alpha::new(alpha)?, weight: weight.require_strictly_positive()? }
            }
            RuleRepr::LogScore => Self::LogScore,
            RuleRepr::RemarkFirst { alpha } => Self::remark_first(alpha)?,
            RuleRepr::RemarkSecond { alpha } => Self::remark_second(alpha)?,
        })
    }
}

impl<T: Real> From<RuleSpec<T>> for RuleRepr<T> {
    fn from(r: RuleSpec<T>) -> Self {
        match r {
            RuleSpec::Crps => Self::Crps,
            RuleSpec::Wcrps { weight } => Self::Wcrps { weight },
            RuleSpec::SAlpha { alpha } => Self::SAlpha { alpha: alpha.0 },
            RuleSpec::SAlphaStar { alpha } => Self::SAlphaStar { alpha: alpha.0 },
            RuleSpec::STilde { alpha, weight } => Self::STilde { alpha: alpha.0, weight },
            RuleSpec::STildeStar { alpha, weight } => Self::STildeStar { alpha: alpha.0, weight },
            RuleSpec::LogScore => Self::LogScore,
            RuleSpec::RemarkFirst { alpha } => Self::RemarkFirst { alpha: alpha.0 },
            RuleSpec::RemarkSecond { alpha } => Self::RemarkSecond { alpha: alpha.0 },
        }
    }
}

/// A nonnegative extended-real score with the diagnostics of the integral behind it.
///
/// `value` is `+∞` exactly when `divergent` is set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ScoreValue<T> {
    #[serde(with = "crate::serde_ext::extended")]
    pub value: T,
    #[serde(with = "crate::serde_ext::extended")]
    pub error_estimate: T,
    pub converged: bool,
    pub divergent: bool,
}

impl<T: Real> ScoreValue<T> {
    pub fn exact(value: T) -> Self {
        Self { value, error_estimate: T::zero(), converged: true, divergent: false }
    }

    pub fn infinite() -> Self {
        Self { value: T::infinity(), error_estimate: T::infinity(), converged: false, divergent: true }
    }

    pub fn is_finite(&self) -> bool {
        !self.divergent
    }
}

impl<T: Real> From<IntegralResult<T>> for ScoreValue<T> {
    fn from(r: IntegralResult<T>) -> Self {
        if r.divergent || r.value.is_infinite() {
            return Self::infinite();
        }
        // the integrands are nonnegative; a rounding-level negative sum is zero
        Self { value: r.value.max(T::zero()), error_estimate: r.error_estimate, converged: r.converged, divergent: false }
    }
}

/// `∫_ℝ f` for a nonnegative integrand, with infinite values read as divergence.
pub(crate) fn score_integral<T: Real, F: Fn(T) -> T>(f: F, breaks: &[T], cfg: &QuadConfig<T>) -> Result<ScoreValue<T>> {
    let r = integrate(f, T::neg_infinity(), T::infinity(), breaks, cfg, NonFinitePolicy::Divergent)?;
    Ok(r.into())
}

/// Evaluates `rule` for forecast `forecast` and observation `y`.
pub fn score<T: Real>(rule: &RuleSpec<T>, forecast: &Distribution<T>, y: T, cfg: &QuadConfig<T>) -> Result<ScoreValue<T>> {
    if !y.is_finite() {
        return Err(Error::InvalidParameter(format!("observation must be finite, got {y}")));
    }
    match rule {
        RuleSpec::Crps => crps(forecast, y, cfg),
        RuleSpec::Wcrps { weight } => wcrps(forecast, y, weight, cfg),
        RuleSpec::SAlpha { alpha } => s_alpha(forecast, y, alpha.value(), cfg),
        RuleSpec::SAlphaStar { alpha } => s_alpha_star(forecast, y, alpha.value(), cfg),
        RuleSpec::STilde { alpha, weight } => s_tilde(forecast, y, alpha.value(), weight, cfg),
        RuleSpec::STildeStar { weight, .. } => s_tilde_star(forecast, y, weight, cfg),
        RuleSpec::LogScore => Ok(ScoreValue::exact(log_score(&log_score::as_discrete(forecast)?, y))),
        RuleSpec::RemarkFirst { alpha } => remark_first(forecast, y, alpha.value(), cfg),
        RuleSpec::RemarkSecond { alpha } => remark_second(forecast, y, alpha.value(), cfg),
    }
}

/// `S(F, G) = ∫ S(F, y) G(dy)`, integrating the score over the observation.
pub fn expected_score<T: Real>(
    rule: &RuleSpec<T>,
    forecast: &Distribution<T>,
    truth: &Distribution<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>> {
    // Per-observation scores far out in the truth's tails can be legitimately huge while
    // carrying negligible mass. Only the structural tail test flags them as divergent;
    // the magnitude threshold applies to the expectation itself.
    let inner = QuadConfig { divergence_threshold: T::max_value(), ..*cfg };
    let cfg_outer = cfg;
    let cfg = &inner;
    match rule {
        RuleSpec::LogScore => {
            let f = log_score::as_discrete(forecast)?;
            let g = log_score::as_discrete(truth)?;
            Ok(ScoreValue::exact(expected_log_score(&f, &g)))
        }
        RuleSpec::SAlphaStar { alpha } => {
            // properize once rather than per observation
            let star = properize_map_bg(forecast, alpha.value())?;
            let a = alpha.value();
            expected_with(|y| s_alpha(&star, y, a, cfg), &forecast.breakpoints(cfg.tail_cutoff_probability), truth, cfg_outer)
        }
        _ => {
            if rule.requires_p01() && !forecast.in_p01() {
                return Err(Error::NotInP01);
            }
            if matches!(rule, RuleSpec::RemarkFirst { .. } | RuleSpec::RemarkSecond { .. })
                && !forecast.is_absolutely_continuous()
            {
                return Err(Error::MissingDensity);
            }
            let mut breaks = forecast.breakpoints(cfg.tail_cutoff_probability);
            if let Some(w) = rule.weight() {
                breaks.extend(w.breakpoints());
            }
            expected_with(|y| score(rule, forecast, y, cfg), &breaks, truth, cfg_outer)
        }
    }
}

/// Averages a per-observation score over `truth`. Inner divergence makes the
/// expectation `+∞`; inner non-convergence is carried into the flag.
pub fn expected_with<T: Real, S>(
    score_at: S,
    breaks: &[T],
    truth: &Distribution<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>>
where
    S: Fn(T) -> Result<ScoreValue<T>>,
{
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let inner_ok = Cell::new(true);
    let r = expect_under_with_breaks(
        truth,
        |y| {
            if failure.borrow().is_some() {
                return T::zero();
            }
            match score_at(y) {
                Ok(s) => {
                    if !s.converged {
                        inner_ok.set(false);
                    }
                    s.value
                }
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    T::zero()
                }
            }
        },
        breaks,
        cfg,
        NonFinitePolicy::Divergent,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let mut out = ScoreValue::from(r);
    out.converged &= inner_ok.get();
    Ok(out)
}
