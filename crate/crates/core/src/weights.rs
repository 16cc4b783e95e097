//! Weight functions `w: ℝ → [0, ∞)` for weighted CRPS and the Anderson–Darling style rules.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{std_normal_cdf, std_normal_pdf, std_normal_sf, Real};

/// A weight function from a small fixed catalogue.
///
/// `Indicator` is `1` on `[a, b]` and `floor` outside; a positive floor makes it usable
/// where strictly positive weights are required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "WeightRepr<T>",
    into = "WeightRepr<T>",
    bound = "T: Real"
)]
pub enum WeightSpec<T> {
    Constant { c: T },
    Indicator { a: T, b: T, floor: T },
    GaussianCdf { mu: T, sigma: T },
    GaussianSf { mu: T, sigma: T },
    GaussianPdf { mu: T, sigma: T },
}

impl<T: Real> Default for WeightSpec<T> {
    fn default() -> Self {
        Self::Constant { c: T::one() }
    }
}

impl<T: Real> WeightSpec<T> {
    pub fn constant(c: T) -> Result<Self> {
        Self::Constant { c }.validated()
    }

    pub fn indicator(a: T, b: T, floor: T) -> Result<Self> {
        Self::Indicator { a, b, floor }.validated()
    }

    pub fn gaussian_cdf(mu: T, sigma: T) -> Result<Self> {
        Self::GaussianCdf { mu, sigma }.validated()
    }

    pub fn gaussian_sf(mu: T, sigma: T) -> Result<Self> {
        Self::GaussianSf { mu, sigma }.validated()
    }

    pub fn gaussian_pdf(mu: T, sigma: T) -> Result<Self> {
        Self::GaussianPdf { mu, sigma }.validated()
    }

    fn validated(self) -> Result<Self> {
        let bad = |m: &str| Err(Error::InvalidParameter(m.to_string()));
        match self {
            Self::Constant { c } if !(c.is_finite() && c > T::zero()) => bad("constant weight must be > 0"),
            Self::Indicator { a, b, floor } => {
                if !(a.is_finite() && b.is_finite() && a <= b) {
                    bad("indicator weight needs finite a <= b")
                } else if !(floor.is_finite() && floor >= T::zero()) {
                    bad("indicator floor must be >= 0")
                } else {
                    Ok(self)
                }
            }
            Self::GaussianCdf { mu, sigma } | Self::GaussianSf { mu, sigma } | Self::GaussianPdf { mu, sigma }
                if !(mu.is_finite() && sigma.is_finite() && sigma > T::zero()) =>
            {
                bad("gaussian weight needs finite mu and sigma > 0")
            }
            _ => Ok(self),
        }
    }

    pub fn eval(&self, x: T) -> T {
        match *self {
            Self::Constant { c } => c,
            Self::Indicator { a, b, floor } => {
                if a <= x && x <= b {
                    T::one()
                } else {
                    floor
                }
            }
            Self::GaussianCdf { mu, sigma } => std_normal_cdf((x - mu) / sigma),
            Self::GaussianSf { mu, sigma } => std_normal_sf((x - mu) / sigma),
            Self::GaussianPdf { mu, sigma } => std_normal_pdf((x - mu) / sigma) / sigma,
        }
    }

    /// Whether `w(x) > 0` for every real `x` (as a function, ignoring floating-point underflow).
    pub fn is_strictly_positive(&self) -> bool {
        match *self {
            Self::Indicator { floor, .. } => floor > T::zero(),
            _ => true,
        }
    }

    /// Passes `self` through when it is strictly positive everywhere.
    pub fn require_strictly_positive(self) -> Result<Self> {
        if self.is_strictly_positive() {
            Ok(self)
        } else {
            Err(Error::WeightNotStrictlyPositive)
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(*self, Self::Constant { c } if c == T::one())
    }

    /// Points where the weight has a jump or its main feature.
    pub fn breakpoints(&self) -> Vec<T> {
        match *self {
            Self::Constant { .. } => Vec::new(),
            Self::Indicator { a, b, .. } => vec![a, b],
            Self::GaussianCdf { mu, sigma } | Self::GaussianSf { mu, sigma } | Self::GaussianPdf { mu, sigma } => {
                vec![mu - T::of(8.0) * sigma, mu, mu + T::of(8.0) * sigma]
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
enum WeightRepr<T> {
    Constant {
        c: T,
    },
    Indicator {
        a: T,
        b: T,
        #[serde(default)]
        floor: T,
    },
    GaussianCdf {
        mu: T,
        sigma: T,
    },
    GaussianSf {
        mu: T,
        sigma: T,
    },
    GaussianPdf {
        mu: T,
        sigma: T,
    },
}

impl<T: Real> TryFrom<WeightRepr<T>> for WeightSpec<T> {
    type Error = Error;

    fn try_from(r: WeightRepr<T>) -> Result<Self> {
        match r {
            WeightRepr::Constant { c } => Self::constant(c),
            WeightRepr::Indicator { a, b, floor } => Self::indicator(a, b, floor),
            WeightRepr::GaussianCdf { mu, sigma } => Self::gaussian_cdf(mu, sigma),
            WeightRepr::GaussianSf { mu, sigma } => Self::gaussian_sf(mu, sigma),
            WeightRepr::GaussianPdf { mu, sigma } => Self::gaussian_pdf(mu, sigma),
        }
    }
}

impl<T: Real> From<WeightSpec<T>> for WeightRepr<T> {
    fn from(w: WeightSpec<T>) -> Self {
        match w {
            WeightSpec::Constant { c } => Self::Constant { c },
            WeightSpec::Indicator { a, b, floor } => Self::Indicator { a, b, floor },
            WeightSpec::GaussianCdf { mu, sigma } => Self::GaussianCdf { mu, sigma },
            WeightSpec::GaussianSf { mu, sigma } => Self::GaussianSf { mu, sigma },
            WeightSpec::GaussianPdf { mu, sigma } => Self::GaussianPdf { mu, sigma },
        }
    }
}
