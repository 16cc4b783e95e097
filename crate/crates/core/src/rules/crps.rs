//! CRPS, weighted CRPS, the power rules `S_α` and their properization `S*_α`.

use crate::dist::{Distribution, DistributionFunction};
use crate::error::Result;
use crate::quad::QuadConfig;
use crate::rules::properize::properize_map_bg;
use crate::rules::{check_alpha, score_integral, ScoreValue};
use crate::scalar::Real;
use crate::weights::WeightSpec;

/// `∫ (P(x) − 𝟙{y < x})² w(x) dx`. Zero-weight regions are allowed.
pub fn wcrps<T: Real, D: DistributionFunction<T> + ?Sized>(
    forecast: &D,
    y: T,
    weight: &WeightSpec<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>> {
    let mut breaks = forecast.breakpoints(cfg.tail_cutoff_probability);
    breaks.push(y);
    breaks.extend(weight.breakpoints());
    score_integral(
        |x| {
            let miss = if x > y { forecast.sf(x) } else { forecast.cdf(x) };
            if miss == T::zero() {
                return T::zero();
            }
            miss * miss * weight.eval(x)
        },
        &breaks,
        cfg,
    )
}

/// Continuous ranked probability score, `wcrps` with unit weight.
pub fn crps<T: Real, D: DistributionFunction<T> + ?Sized>(forecast: &D, y: T, cfg: &QuadConfig<T>) -> Result<ScoreValue<T>> {
    wcrps(forecast, y, &WeightSpec::default(), cfg)
}

/// `S_α(P, y) = ∫ |P(x) − 𝟙{y < x}|^α dx`.
pub fn s_alpha<T: Real, D: DistributionFunction<T> + ?Sized>(
    forecast: &D,
    y: T,
    alpha: T,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>> {
    check_alpha(alpha)?;
    let mut breaks = forecast.breakpoints(cfg.tail_cutoff_probability);
    breaks.push(y);
    score_integral(
        |x| {
            let miss = if x > y { forecast.sf(x) } else { forecast.cdf(x) };
            if miss == T::zero() {
                T::zero()
            } else {
                miss.powf(alpha)
            }
        },
        &breaks,
        cfg,
    )
}

/// `S*_α(P, y) = S_α(P*, y)` with `P*` from [`properize_map_bg`].
pub fn s_alpha_star<T: Real>(forecast: &Distribution<T>, y: T, alpha: T, cfg: &QuadConfig<T>) -> Result<ScoreValue<T>> {
    let star = properize_map_bg(forecast, alpha)?;
    s_alpha(&star, y, alpha, cfg)
}
