use super::confidence::mu_unchecked;
use super::{check_open_unit, StatsError};

/// Upper end of the tolerance planner's search range.
pub const PLANNER_MAX: u64 = 1 << 40;

/// Least N >= 2 with μ(N) <= δ, i.e. the smallest sample size for which
/// (û_1, û_N] holds at least 1 - ε of the mass with confidence 1 - δ.
///
/// μ is strictly decreasing in N, so integer bisection over [2, 2^40]
/// finds the boundary.
pub fn min_sample_size_tolerance(epsilon: f64, delta: f64) -> Result<u64, StatsError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    if mu_unchecked(PLANNER_MAX, epsilon) > delta {
        return Err(StatsError::PlannerRange { max: PLANNER_MAX });
    }
    // invariant: μ(lo) > δ (μ(1) = 1), μ(hi) <= δ
    let (mut lo, mut hi) = (1u64, PLANNER_MAX);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if mu_unchecked(mid, epsilon) <= delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.max(2))
}

/// Least N with N >= ln(1/δ) / ln(1/(1-ε)), the sufficient sample size for
/// P{P{u > û_N} <= ε} >= 1 - δ.
///
/// The ceiling of the floating-point ratio is checked against the
/// inequality `N ln(1/(1-ε)) >= ln(1/δ)` and nudged by one when rounding put
/// it on the wrong side, so an exactly integral ratio is returned as is.
pub fn min_sample_size_extreme(epsilon: f64, delta: f64) -> Result<u64, StatsError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    let need = -delta.ln();
    let per_sample = -(-epsilon).ln_1p();
    let ratio = need / per_sample;
    if !ratio.is_finite() || ratio > PLANNER_MAX as f64 {
        return Err(StatsError::PlannerRange { max: PLANNER_MAX });
    }
    let mut n = (ratio.ceil() as u64).max(1);
    let enough = |n: u64| n as f64 * per_sample >= need;
    while n > 1 && enough(n - 1) {
        n -= 1;
    }
    while !enough(n) {
        n += 1;
    }
    Ok(n)
}
