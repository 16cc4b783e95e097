//! The logarithmic score on finitely supported distributions, in bits.
//!
//! Off the support the score is `0` by convention, so `S(P, P)` is the Shannon entropy.

use crate::dist::{DiscreteDistribution, Distribution};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `−log₂ p(outcome)`, or `0` when `outcome` is not an atom of `d`.
pub fn log_score<T: Real>(d: &DiscreteDistribution<T>, outcome: T) -> T {
    let p = d.mass_at(outcome);
    if p > T::zero() {
        -p.log2()
    } else {
        T::zero()
    }
}

/// `−Σ pᵢ log₂ pᵢ`.
pub fn shannon_entropy<T: Real>(d: &DiscreteDistribution<T>) -> T {
    d.iter().map(|(_, p)| -p * p.log2()).sum()
}

/// `Σ_j q_j · log_score(forecast, x_j)` for `truth = {(x_j, q_j)}`.
pub fn expected_log_score<T: Real>(forecast: &DiscreteDistribution<T>, truth: &DiscreteDistribution<T>) -> T {
    truth.iter().map(|(x, q)| q * log_score(forecast, x)).sum()
}

/// Views a purely atomic [`Distribution`] as a [`DiscreteDistribution`].
pub(crate) fn as_discrete<T: Real>(d: &Distribution<T>) -> Result<DiscreteDistribution<T>> {
    if d.has_continuous_part() {
        return Err(Error::RuleNotApplicable {
            rule: "log_score".into(),
            reason: "forecast has a continuous part".into(),
        });
    }
    let (points, masses): (Vec<T>, Vec<T>) = d.atoms().into_iter().unzip();
    // merged mixture masses can drift from 1 by rounding; renormalise
    let total: T = masses.iter().copied().sum();
    DiscreteDistribution::new(points, masses.into_iter().map(|m| m / total).collect())
}
