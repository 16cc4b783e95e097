//! Properization maps as lazy distribution-function views.
//!
//! Both maps act pointwise on the base CDF, so the views compose the pointwise map
//! with the base distribution instead of refitting anything.

use crate::dist::{Distribution, DistributionFunction};
use crate::error::{Error, Result};
use crate::rules::pointwise::{odds_power_map, odds_power_map_ln};
use crate::scalar::Real;

/// `P̃*(x) = (1 + ((1 − P(x))/P(x))^{1/(2α)})^{-1}`, the Bayes act of `S̃_{α,w}` under `P`.
///
/// At `α = 1/2` the view returns the base values unchanged.
#[derive(Clone, Copy, Debug)]
pub struct TildeStar<'a, T, D: ?Sized> {
    base: &'a D,
    exponent: T,
}

impl<'a, T: Real, D: DistributionFunction<T> + ?Sized> TildeStar<'a, T, D> {
    pub fn base(&self) -> &'a D {
        self.base
    }
}

/// Builds the `S̃` properization of `base`; `base` must take values in `(0, 1)`.
pub fn p_tilde_star<T: Real, D: DistributionFunction<T> + ?Sized>(base: &D, alpha: T) -> Result<TildeStar<'_, T, D>> {
    if !(alpha.is_finite() && alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if !base.in_p01() {
        return Err(Error::NotInP01);
    }
    Ok(TildeStar { base, exponent: (T::two() * alpha).recip() })
}

impl<'a, T: Real, D: DistributionFunction<T> + ?Sized> DistributionFunction<T> for TildeStar<'a, T, D> {
    fn cdf(&self, x: T) -> T {
        odds_power_map(self.base.cdf(x), self.base.sf(x), self.exponent).0
    }

    fn sf(&self, x: T) -> T {
        odds_power_map(self.base.cdf(x), self.base.sf(x), self.exponent).1
    }

    fn ln_cdf(&self, x: T) -> T {
        odds_power_map_ln(self.base.ln_cdf(x), self.base.ln_sf(x), self.exponent).0
    }

    fn ln_sf(&self, x: T) -> T {
        odds_power_map_ln(self.base.ln_cdf(x), self.base.ln_sf(x), self.exponent).1
    }

    fn in_p01(&self) -> bool {
        self.base.in_p01()
    }

    fn breakpoints(&self, tail_probability: T) -> Vec<T> {
        self.base.breakpoints(tail_probability)
    }
}

/// The `S_α` properization: pointwise odds power `1/(α − 1)` for `α > 1`, and the
/// point mass at the (lower) median for `α ∈ (0, 1]`.
#[derive(Clone, Debug)]
pub enum BgStar<'a, T> {
    Pointwise { base: &'a Distribution<T>, exponent: T },
    Median(Distribution<T>),
}

pub fn properize_map_bg<T: Real>(base: &Distribution<T>, alpha: T) -> Result<BgStar<'_, T>> {
    if !(alpha.is_finite() && alpha > T::zero()) {
        return Err(Error::InvalidParameter(format!("alpha must be > 0, got {alpha}")));
    }
    if alpha <= T::one() {
        Ok(BgStar::Median(Distribution::dirac(base.median())?))
    } else {
        Ok(BgStar::Pointwise { base, exponent: (alpha - T::one()).recip() })
    }
}

impl<'a, T: Real> DistributionFunction<T> for BgStar<'a, T> {
    fn cdf(&self, x: T) -> T {
        match self {
            Self::Pointwise { base, exponent } => odds_power_map(base.cdf(x), base.sf(x), *exponent).0,
            Self::Median(d) => d.cdf(x),
        }
    }

    fn sf(&self, x: T) -> T {
        match self {
            Self::Pointwise { base, exponent } => odds_power_map(base.cdf(x), base.sf(x), *exponent).1,
            Self::Median(d) => d.sf(x),
        }
    }

    fn ln_cdf(&self, x: T) -> T {
        match self {
            Self::Pointwise { base, exponent } => odds_power_map_ln(base.ln_cdf(x), base.ln_sf(x), *exponent).0,
            Self::Median(d) => d.ln_cdf(x),
        }
    }

    fn ln_sf(&self, x: T) -> T {
        match self {
            Self::Pointwise { base, exponent } => odds_power_map_ln(base.ln_cdf(x), base.ln_sf(x), *exponent).1,
            Self::Median(d) => d.ln_sf(x),
        }
    }

    fn in_p01(&self) -> bool {
        match self {
            Self::Pointwise { base, .. } => base.in_p01(),
            Self::Median(_) => false,
        }
    }

    fn breakpoints(&self, tail_probability: T) -> Vec<T> {
        match self {
            Self::Pointwise { base, .. } => base.breakpoints(tail_probability),
            Self::Median(d) => d.breakpoints(tail_probability),
        }
    }
}
