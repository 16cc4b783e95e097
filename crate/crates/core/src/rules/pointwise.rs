//! Pointwise building blocks of the Anderson–Darling style rule.
//!
//! For a fixed `x`, with `p = P(x)` and `wx = w(x)`, the expected integrand of
//! `S̃_{α,w}(Q, P)` as a function of `q = Q(x)` is
//!
//! ```text
//! g(q) = [((1 − q)/q)^α · p + (q/(1 − q))^α · (1 − p)] · wx,   q ∈ (0, 1).
//! ```
//!
//! Its unique minimizer is `q* = (1 + ((1 − p)/p)^{1/(2α)})^{-1}` for every `α > 0`.

use crate::scalar::Real;

/// `g(q)` for `q, p ∈ (0, 1)`, `α > 0`, `wx > 0`.
pub fn g_eval<T: Real>(q: T, p: T, alpha: T, wx: T) -> T {
    let odds = (T::one() - q) / q;
    (odds.powf(alpha) * p + odds.recip().powf(alpha) * (T::one() - p)) * wx
}

/// `g′(q)`.
pub fn g_prime<T: Real>(q: T, p: T, alpha: T, wx: T) -> T {
    let one = T::one();
    let odds = (one - q) / q;
    let inv = odds.recip();
    alpha * odds.powf(alpha - one) * (-(q * q).recip()) * p * wx
        + alpha * inv.powf(alpha - one) * ((one - q) * (one - q)).recip() * (one - p) * wx
}

/// `g″(q)`.
pub fn g_double_prime<T: Real>(q: T, p: T, alpha: T, wx: T) -> T {
    let one = T::one();
    let two = T::two();
    let odds = (one - q) / q;
    let inv = odds.recip();
    alpha * odds.powf(alpha - two) * (alpha + one - two * q) / q.powi(4) * p * wx
        + alpha * inv.powf(alpha - two) * (alpha - one + two * q) / (one - q).powi(4) * (one - p) * wx
}

/// The minimizer of [`g_eval`] over `q ∈ (0, 1)`.
pub fn argmin_g<T: Real>(p: T, alpha: T) -> T {
    T::one() / (T::one() + ((T::one() - p) / p).powf((T::two() * alpha).recip()))
}

/// Applies `p ↦ (1 + ((1 − p)/p)^{e})^{-1}` given `(P(x), 1 − P(x))`, returning the image
/// and its complement. The exponent `e = 1` is the identity and returns the input as is.
pub(crate) fn odds_power_map<T: Real>(cdf: T, sf: T, exponent: T) -> (T, T) {
    if exponent == T::one() {
        return (cdf, sf);
    }
    if cdf <= T::zero() {
        return (T::zero(), T::one());
    }
    if sf <= T::zero() {
        return (T::one(), T::zero());
    }
    let rho = (sf / cdf).powf(exponent);
    if rho.is_infinite() {
        return (T::zero(), T::one());
    }
    (T::one() / (T::one() + rho), rho / (T::one() + rho))
}

/// [`odds_power_map`] on `(ln P(x), ln(1 − P(x)))`.
pub(crate) fn odds_power_map_ln<T: Real>(ln_cdf: T, ln_sf: T, exponent: T) -> (T, T) {
    if exponent == T::one() {
        return (ln_cdf, ln_sf);
    }
    if ln_cdf == T::neg_infinity() {
        return (T::neg_infinity(), T::zero());
    }
    if ln_sf == T::neg_infinity() {
        return (T::zero(), T::neg_infinity());
    }
    let ln_rho = exponent * (ln_sf - ln_cdf);
    let sp = crate::dist::softplus(ln_rho);
    (-sp, ln_rho - sp)
}

/// Pointwise value of the `S̃` properization: `(1 + ((1 − p)/p)^{1/(2α)})^{-1}`.
pub fn tilde_star_value<T: Real>(p: T, alpha: T) -> T {
    odds_power_map(p, T::one() - p, (T::two() * alpha).recip()).0
}

/// Pointwise value of the `S_α` properization for `α > 1`:
/// `(1 + ((1 − p)/p)^{1/(α − 1)})^{-1} · 𝟙{p > 0}`.
pub fn bg_star_value<T: Real>(p: T, alpha: T) -> T {
    odds_power_map(p, T::one() - p, (alpha - T::one()).recip()).0
}

/// Arithmetic-minus-geometric mean gap
/// `½[((1 − p)/p)^{1/2} q + ((1 − p)/p)^{−1/2} (1 − q)] − √(q(1 − q))`.
///
/// Nonnegative on `(0, 1)²` and zero exactly when `p = q`.
pub fn amgm_gap<T: Real>(p: T, q: T) -> T {
    let r = ((T::one() - p) / p).sqrt();
    let a = r * q;
    let b = (T::one() - q) / r;
    // (a + b)/2 − √(ab) = (√a − √b)²/2, which is exact at a = b
    let d = a.sqrt() - b.sqrt();
    T::half() * d * d
}
