//! The Anderson–Darling style rule `S̃_{α,w}`, its properized closed form and entropy.
//!
//! With `p = F(x)`, the integrand `|p − 𝟙{y<x}|^{2α} / (p(1 − p))^α` equals
//! `((1 − p)/p)^α` for `x > y` and `(p/(1 − p))^α` for `x ≤ y`, which is how it is
//! evaluated: the ratio of `sf` to `cdf` keeps both tails accurate.

use crate::dist::DistributionFunction;
use crate::error::{Error, Result};
use crate::quad::QuadConfig;
use crate::rules::{check_alpha, score_integral, ScoreValue};
use crate::scalar::Real;
use crate::weights::WeightSpec;

/// Probabilities below this are compared through their logarithms.
fn tiny<T: Real>() -> T {
    T::min_positive_value().sqrt()
}

fn pow_of_ratio<T: Real>(r: T, e: T) -> T {
    if e == T::one() {
        r
    } else if e == T::half() {
        r.sqrt()
    } else {
        r.powf(e)
    }
}

/// `(sf/cdf)^e` if `upper`, else `(cdf/sf)^e`, at `x`. A zero numerator gives zero.
pub(crate) fn odds_pow<T: Real, D: DistributionFunction<T> + ?Sized>(d: &D, x: T, upper: bool, e: T) -> T {
    let (c, s) = (d.cdf(x), d.sf(x));
    let (num, den) = if upper { (s, c) } else { (c, s) };
    if num > tiny() && den > tiny() {
        return pow_of_ratio(num / den, e);
    }
    let (lc, ls) = (d.ln_cdf(x), d.ln_sf(x));
    let (ln_num, ln_den) = if upper { (ls, lc) } else { (lc, ls) };
    if ln_num == T::neg_infinity() {
        return T::zero();
    }
    (e * (ln_num - ln_den)).exp()
}

fn require_p01<T: Real, D: DistributionFunction<T> + ?Sized>(d: &D) -> Result<()> {
    if d.in_p01() {
        Ok(())
    } else {
        Err(Error::NotInP01)
    }
}

fn breaks_for<T: Real, D: DistributionFunction<T> + ?Sized>(d: &D, w: &WeightSpec<T>, cfg: &QuadConfig<T>) -> Vec<T> {
    let mut b = d.breakpoints(cfg.tail_cutoff_probability);
    b.extend(w.breakpoints());
    b
}

/// `S̃_{α,w}(F, y) = ∫ |F − 𝟙{y<x}|^{2α} / (F^α (1 − F)^α) · w dx`.
pub fn s_tilde<T: Real, D: DistributionFunction<T> + ?Sized>(
    forecast: &D,
    y: T,
    alpha: T,
    weight: &WeightSpec<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>> {
    check_alpha(alpha)?;
    require_p01(forecast)?;
    let weight = weight.clone().require_strictly_positive()?;
    let mut breaks = breaks_for(forecast, &weight, cfg);
    breaks.push(y);
    score_integral(
        |x| {
            let wx = weight.eval(x);
            if wx == T::zero() {
                return wx;
            }
            let v = odds_pow(forecast, x, x > y, alpha);
            if v == T::zero() {
                v
            } else {
                v * wx
            }
        },
        &breaks,
        cfg,
    )
}

/// `S̃*_{w}(F, y) = S̃_{α,w}(P̃*, y)`, via its closed form
/// `∫ (1 − F)^{1/2}/F^{1/2} · w` on `x > y` plus `∫ F^{1/2}/(1 − F)^{1/2} · w` on `x ≤ y`.
/// The value does not depend on `α`.
pub fn s_tilde_star<T: Real, D: DistributionFunction<T> + ?Sized>(
    forecast: &D,
    y: T,
    weight: &WeightSpec<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>> {
    s_tilde(forecast, y, T::half(), weight, cfg)
}

/// `2 ∫ √(G(1 − G)) w dx`, the expected `S̃*` score of `G` under itself.
pub fn entropy_s_tilde<T: Real, D: DistributionFunction<T> + ?Sized>(
    truth: &D,
    weight: &WeightSpec<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>> {
    require_p01(truth)?;
    let breaks = breaks_for(truth, weight, cfg);
    score_integral(
        |x| {
            let v = (truth.cdf(x) * truth.sf(x)).sqrt();
            if v == T::zero() {
                v
            } else {
                T::two() * v * weight.eval(x)
            }
        },
        &breaks,
        cfg,
    )
}

/// `∫ [((1 − F)/F)^α G + (F/(1 − F))^α (1 − G)] w dx`, the expected `S̃_{α,w}(F, ·)`
/// under `G` with the order of integration swapped.
pub fn expected_s_tilde_closed<T, F, G>(
    forecast: &F,
    truth: &G,
    alpha: T,
    weight: &WeightSpec<T>,
    cfg: &QuadConfig<T>,
) -> Result<ScoreValue<T>>
where
    T: Real,
    F: DistributionFunction<T> + ?Sized,
    G: DistributionFunction<T> + ?Sized,
{
    check_alpha(alpha)?;
    require_p01(forecast)?;
    let mut breaks = breaks_for(forecast, weight, cfg);
    breaks.extend(truth.breakpoints(cfg.tail_cutoff_probability));
    score_integral(
        |x| {
            let wx = weight.eval(x);
            if wx == T::zero() {
                return wx;
            }
            let (fc, fs) = (forecast.cdf(x), forecast.sf(x));
            let (gc, gs) = (truth.cdf(x), truth.sf(x));
            // G(x) = P(y < x) weights the x > y branch, 1 − G(x) the other; zero weights are
            // skipped so that ∞·0 never occurs
            if fc > tiny() && fs > tiny() && gc > tiny() && gs > tiny() {
                return (pow_of_ratio(fs / fc, alpha) * gc + pow_of_ratio(fc / fs, alpha) * gs) * wx;
            }
            let (lfc, lfs) = (forecast.ln_cdf(x), forecast.ln_sf(x));
            let (lgc, lgs) = (truth.ln_cdf(x), truth.ln_sf(x));
            let lw = wx.ln();
            let mut v = T::zero();
            if lgc > T::neg_infinity() && lfs > T::neg_infinity() {
                v = v + (alpha * (lfs - lfc) + lgc + lw).exp();
            }
            if lgs > T::neg_infinity() && lfc > T::neg_infinity() {
                v = v + (alpha * (lfc - lfs) + lgs + lw).exp();
            }
            v
        },
        &breaks,
        cfg,
    )
}
