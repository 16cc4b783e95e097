//! Proper scoring rules for probabilistic forecasts of real-valued quantities.
//!
//! The crate covers the CRPS family (CRPS, weighted CRPS, the power rules `S_α` and
//! their median/quantile-type properizations), an Anderson–Darling style rule
//! `S̃_{α,w}` whose properized form `S̃*` has a closed form independent of `α`, the
//! discrete logarithmic score, and a numerical harness that checks propriety on
//! grids of distributions.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which is what the tolerances in the docs assume.
//!
//! Distribution functions follow the left-continuous convention `P(x) = P((−∞, x))`.

pub mod dist;
pub mod error;
pub mod propriety;
pub mod quad;
pub mod rules;
pub mod scalar;
mod serde_ext;
pub mod weights;

pub use dist::DistributionFunction;
pub use error::{Error, Result};
pub use quad::NonFinitePolicy;
pub use scalar::Real;

pub type Distribution = dist::Distribution<f64>;
pub type DiscreteDistribution = dist::DiscreteDistribution<f64>;
pub type WeightSpec = weights::WeightSpec<f64>;
pub type QuadConfig = quad::QuadConfig<f64>;
pub type IntegralResult = quad::IntegralResult<f64>;
pub type McEstimate = quad::McEstimate<f64>;
pub type Alpha = rules::Alpha<f64>;
pub type RuleSpec = rules::RuleSpec<f64>;
pub type ScoreValue = rules::ScoreValue<f64>;
pub type DistGrid = propriety::DistGrid<f64>;
pub type PropReport = propriety::PropReport<f64>;

pub type Distribution32 = dist::Distribution<f32>;
pub type WeightSpec32 = weights::WeightSpec<f32>;
pub type QuadConfig32 = quad::QuadConfig<f32>;
