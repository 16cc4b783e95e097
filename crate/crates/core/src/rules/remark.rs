//! Two rules that integrate against the forecast itself instead of Lebesgue measure:
//!
//! ```text
//! first(F, y)  = ∫ |F(x) − 𝟙{y<x}|^{2α} F(dx)
//! second(F, y) = ∫ |F(x) − 𝟙{y<x}|^{2α} / (F(x)^α (1 − F(x))^α) F(dx)
//! ```
//!
//! At `α = 1` the second is the Anderson–Darling distance between `F` and the point
//! mass at `y`. Nothing is known about their propriety; they are provided for probing.

use crate::dist::{Distribution, DistributionFunction};
use crate::error::{Error, Result};
use crate::quad::{expect_density, NonFinitePolicy, QuadConfig};
use crate::rules::tilde::odds_pow;
use crate::rules::{check_alpha, ScoreValue};
use crate::scalar::Real;

pub fn remark_first<T: Real>(forecast: &Distribution<T>, y: T, alpha: T, cfg: &QuadConfig<T>) -> Result<ScoreValue<T>> {
    check_alpha(alpha)?;
    let e = T::two() * alpha;
    let r = expect_density(
        forecast,
        |x| {
            let miss = if x > y { forecast.sf(x) } else { forecast.cdf(x) };
            if miss == T::zero() {
                T::zero()
            } else {
                miss.powf(e)
            }
        },
        &[y],
        cfg,
        NonFinitePolicy::Divergent,
    )?;
    Ok(r.into())
}

pub fn remark_second<T: Real>(forecast: &Distribution<T>, y: T, alpha: T, cfg: &QuadConfig<T>) -> Result<ScoreValue<T>> {
    check_alpha(alpha)?;
    if !forecast.is_absolutely_continuous() {
        return Err(Error::MissingDensity);
    }
    if !forecast.in_p01() {
        return Err(Error::NotInP01);
    }
    let r = expect_density(
        forecast,
        |x| odds_pow(forecast, x, x > y, alpha),
        &[y],
        cfg,
        NonFinitePolicy::Divergent,
    )?;
    Ok(r.into())
}
