//! Exact order-statistic probabilities: confidence bounds for extreme and
//! intermediate order statistics, distribution-free tolerance intervals,
//! minimum sample-size planners and the joint order-statistic CDF with and
//! without a continuous underlying distribution.
//!
//! Everything here is a pure function of its arguments.

mod confidence;
mod joint;
mod planner;
mod special;

pub use confidence::{
    lower_bound_confidence, mu, order_stat_cdf_uniform, tolerance_confidence,
    upper_bound_confidence, ConfidenceQuery,
};
pub use joint::{
    joint_cdf_noncontinuous, joint_orderstat_cdf, joint_orderstat_probability, JointCdfEvaluation,
    JointQuery, JointTerm, ENUMERATION_BUDGET,
};
pub use planner::{min_sample_size_extreme, min_sample_size_tolerance, PLANNER_MAX};
pub use special::{ln_beta, ln_gamma, log_binomial, regularized_incomplete_beta};

use thiserror::Error;

/// Slack within which a computed probability is silently clamped to [0, 1].
pub const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no convergence: {0}")]
    Convergence(String),
    #[error("enumeration budget exceeded: {terms} terms needed, budget is {budget}")]
    BudgetExceeded { terms: u128, budget: u128 },
    #[error("internal consistency error: probability {0} is outside [0, 1]")]
    Inconsistent(f64),
    #[error("no sample size up to {max} reaches the requested risk level")]
    PlannerRange { max: u64 },
}

/// Clamp a probability that may have drifted outside [0, 1] by rounding.
pub(crate) fn clamp_probability(p: f64) -> Result<f64, StatsError> {
    if !(-PROBABILITY_SLACK..=1.0 + PROBABILITY_SLACK).contains(&p) {
        return Err(StatsError::Inconsistent(p));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Checks that an accuracy or risk level lies in the open unit interval.
pub(crate) fn check_open_unit(name: &str, value: f64) -> Result<(), StatsError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(StatsError::Domain(format!("{name} must lie in (0, 1), got {value}")))
    }
}
