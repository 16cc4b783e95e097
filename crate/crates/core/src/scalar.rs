//! The scalar abstraction every numerical routine in the crate is written against.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// A real floating-point scalar (`f32` or `f64`).
///
/// On top of [`Float`] this carries the one special function the crate needs
/// that `num-traits` does not provide, the complementary error function.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Complementary error function, accurate in relative terms in both tails.
    fn erfc(self) -> Self;

    /// Converts an `f64` literal into this scalar.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable in scalar type")
    }

    /// Converts a count into this scalar.
    #[inline]
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn half() -> Self {
        Self::of(0.5)
    }

    #[inline]
    fn two() -> Self {
        Self::of(2.0)
    }
}

impl Real for f64 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfc(self)
    }
}

impl Real for f32 {
    #[inline]
    fn erfc(self) -> Self {
        libm::erfcf(self)
    }
}

/// Standard normal CDF `Φ(z)`.
pub(crate) fn std_normal_cdf<T: Real>(z: T) -> T {
    T::half() * (-z / T::SQRT_2()).erfc()
}

/// Standard normal survival function `1 − Φ(z)` without cancellation.
pub(crate) fn std_normal_sf<T: Real>(z: T) -> T {
    T::half() * (z / T::SQRT_2()).erfc()
}

/// `ln Φ(z)`, finite far beyond the point where `Φ(z)` underflows.
pub(crate) fn std_normal_ln_cdf<T: Real>(z: T) -> T {
    if z > T::zero() {
        return (-std_normal_sf(z)).ln_1p();
    }
    if z > T::of(-30.0) {
        let c = std_normal_cdf(z);
        if c > T::min_positive_value() {
            return c.ln();
        }
    }
    // Mills ratio asymptotics: Φ(z) = φ(z)/|z| · (1 − 1/z² + 3/z⁴ − 15/z⁶ + …)
    let r = (z * z).recip();
    let series = T::one() - r * (T::one() - T::of(3.0) * r * (T::one() - T::of(5.0) * r * (T::one() - T::of(7.0) * r * (T::one() - T::of(9.0) * r))));
    -T::half() * z * z - (-z).ln() - T::half() * (T::two() * T::PI()).ln() + series.ln()
}

/// Standard normal density.
pub(crate) fn std_normal_pdf<T: Real>(z: T) -> T {
    (-T::half() * z * z).exp() / (T::two() * T::PI()).sqrt()
}

/// Standard normal quantile: a rational starting point refined by Halley steps on `erfc`.
pub(crate) fn std_normal_quantile<T: Real>(p: T) -> T {
    if p > T::half() {
        return -std_normal_quantile(T::one() - p);
    }
    if p == T::half() {
        return T::zero();
    }
    // Abramowitz & Stegun 26.2.23, |error| < 4.5e-4.
    let t = (-T::two() * p.ln()).sqrt();
    let num = T::of(2.515517) + t * (T::of(0.802853) + t * T::of(0.010328));
    let den = T::one() + t * (T::of(1.432788) + t * (T::of(0.189269) + t * T::of(0.001308)));
    let mut x = -(t - num / den);
    for _ in 0..4 {
        let pdf = std_normal_pdf(x);
        if pdf == T::zero() {
            break;
        }
        let u = (std_normal_cdf(x) - p) / pdf;
        let step = u / (T::one() + T::half() * x * u);
        x = x - step;
        if step.abs() <= T::epsilon() * x.abs().max(T::one()) {
            break;
        }
    }
    x
}
