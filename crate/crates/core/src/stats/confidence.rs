use serde::{Deserialize, Serialize};

use super::special::regularized_incomplete_beta;
use super::{check_open_unit, StatsError};

/// Bundle of indices and levels for the single-statistic confidence
/// statements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceQuery {
    /// Index of the order statistic used as an upper estimate.
    pub n: u64,
    /// Index of the order statistic used as a lower estimate.
    pub m: u64,
    pub sample_size: u64,
    pub epsilon: f64,
    #[serde(default)]
    pub delta: Option<f64>,
}

impl ConfidenceQuery {
    pub fn new(n: u64, m: u64, sample_size: u64, epsilon: f64) -> Result<Self, StatsError> {
        let query = Self { n, m, sample_size, epsilon, delta: None };
        query.validate()?;
        Ok(query)
    }

    pub fn with_delta(mut self, delta: f64) -> Result<Self, StatsError> {
        self.delta = Some(delta);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), StatsError> {
        check_index("n", self.n, self.sample_size)?;
        check_index("m", self.m, self.sample_size)?;
        check_open_unit("epsilon", self.epsilon)?;
        if let Some(delta) = self.delta {
            check_open_unit("delta", delta)?;
        }
        Ok(())
    }

    /// Confidence that at most `epsilon` of the mass lies above û_n.
    pub fn upper(&self) -> Result<f64, StatsError> {
        upper_bound_confidence(self.n, self.sample_size, self.epsilon)
    }

    /// Confidence that at most `epsilon` of the mass lies below û_m.
    pub fn lower(&self) -> Result<f64, StatsError> {
        lower_bound_confidence(self.m, self.sample_size, self.epsilon)
    }

    /// Confidence that (û_m, û_n] holds at least `1 - epsilon` of the mass.
    pub fn tolerance(&self) -> Result<f64, StatsError> {
        tolerance_confidence(self.m, self.n, self.sample_size, self.epsilon)
    }
}

pub(crate) fn check_index(name: &str, index: u64, sample_size: u64) -> Result<(), StatsError> {
    if sample_size == 0 {
        return Err(StatsError::Domain("sample size must be positive".into()));
    }
    if index == 0 || index > sample_size {
        return Err(StatsError::Domain(format!(
            "{name} must lie in 1..={sample_size}, got {index}"
        )));
    }
    Ok(())
}

/// P{Û_n <= t} for the n-th of N uniform order statistics, I_t(n, N - n + 1).
pub fn order_stat_cdf_uniform(t: f64, n: u64, sample_size: u64) -> Result<f64, StatsError> {
    check_index("n", n, sample_size)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(StatsError::Domain(format!("threshold must lie in [0, 1], got {t}")));
    }
    regularized_incomplete_beta(t, n as f64, (sample_size - n + 1) as f64)
}

/// Lower bound on P{P{u > û_n} <= ε}: `1 - I_{1-ε}(n, N - n + 1)`.
///
/// Exact when sup{F(x) : F(x) < 1 - ε} = 1 - ε, in particular for every
/// continuous F.
pub fn upper_bound_confidence(n: u64, sample_size: u64, epsilon: f64) -> Result<f64, StatsError> {
    check_index("n", n, sample_size)?;
    check_open_unit("epsilon", epsilon)?;
    // 1 - I_{1-ε}(n, N-n+1) == I_ε(N-n+1, n); the right side has no cancellation.
    regularized_incomplete_beta(epsilon, (sample_size - n + 1) as f64, n as f64)
}

/// Lower bound on P{P{u < û_m} <= ε}: `1 - I_{1-ε}(N - m + 1, m)`.
///
/// Exact when inf{F(x) : F(x) > ε} = ε. Equal to
/// `upper_bound_confidence(N + 1 - m, N, ε)`.
pub fn lower_bound_confidence(m: u64, sample_size: u64, epsilon: f64) -> Result<f64, StatsError> {
    check_index("m", m, sample_size)?;
    check_open_unit("epsilon", epsilon)?;
    regularized_incomplete_beta(epsilon, m as f64, (sample_size - m + 1) as f64)
}

/// P{P{û_m < u <= û_n} >= 1 - ε} for a continuous distribution:
/// `1 - I_{1-ε}(n - m, N - n + m + 1)`. Depends on (m, n) only via n - m.
pub fn tolerance_confidence(m: u64, n: u64, sample_size: u64, epsilon: f64) -> Result<f64, StatsError> {
    check_index("m", m, sample_size)?;
    check_index("n", n, sample_size)?;
    if m >= n {
        return Err(StatsError::Domain(format!("tolerance interval needs m < n, got m = {m}, n = {n}")));
    }
    check_open_unit("epsilon", epsilon)?;
    let gap = n - m;
    regularized_incomplete_beta(epsilon, (sample_size - gap + 1) as f64, gap as f64)
}

/// μ(N) = (1 - ε)^(N-1) [1 + (N - 1) ε], the exact failure probability of
/// the (û_1, û_N] tolerance statement under a continuous distribution.
pub fn mu(sample_size: u64, epsilon: f64) -> Result<f64, StatsError> {
    if sample_size == 0 {
        return Err(StatsError::Domain("sample size must be positive".into()));
    }
    check_open_unit("epsilon", epsilon)?;
    Ok(mu_unchecked(sample_size, epsilon))
}

pub(crate) fn mu_unchecked(sample_size: u64, epsilon: f64) -> f64 {
    let k = (sample_size - 1) as f64;
    (k * (-epsilon).ln_1p()).exp() * (1.0 + k * epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_order_stat_cdf_examples() {
        assert!((order_stat_cdf_uniform(0.5, 2, 2).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(order_stat_cdf_uniform(1.0, 3, 7).unwrap(), 1.0);
        assert!(order_stat_cdf_uniform(0.5, 0, 2).is_err());
        assert!(order_stat_cdf_uniform(0.5, 3, 2).is_err());
        assert!(order_stat_cdf_uniform(1.5, 1, 2).is_err());
    }

    #[test]
    fn upper_bound_anchor_values() {
        let got = upper_bound_confidence(8000, 8000, 0.001).unwrap();
        assert!((got - 0.999666).abs() < 1e-6);
        assert!(got >= 0.99966);
        assert!((upper_bound_confidence(1, 1, 0.5).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lower_bound_first_statistic() {
        for &(n, eps) in &[(1u64, 0.5), (10, 0.1), (500, 0.01)] {
            let got = lower_bound_confidence(1, n, eps).unwrap();
            let expected = 1.0 - (1.0 - eps).powi(n as i32);
            assert!((got - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn reflection_identity_is_exact() {
        for big_n in [1u64, 2, 7, 50, 333] {
            for m in 1..=big_n {
                let lower = lower_bound_confidence(m, big_n, 0.07).unwrap();
                let upper = upper_bound_confidence(big_n + 1 - m, big_n, 0.07).unwrap();
                assert_eq!(lower, upper);
            }
        }
    }

    #[test]
    fn tolerance_requires_ordered_indices() {
        assert!(tolerance_confidence(3, 3, 10, 0.1).is_err());
        assert!(tolerance_confidence(4, 3, 10, 0.1).is_err());
        assert!(tolerance_confidence(1, 11, 10, 0.1).is_err());
    }

    #[test]
    fn tolerance_closed_form_at_extremes() {
        let got = tolerance_confidence(1, 20, 20, 0.2).unwrap();
        let expected = 1.0 - 0.8f64.powi(19) * (1.0 + 19.0 * 0.2);
        assert!((got - expected).abs() < 1e-14);
        assert!((got - 0.930_824_709_723_589).abs() < 1e-12);
    }

    #[test]
    fn tolerance_shift_invariance() {
        for n in 2..30u64 {
            for m in 1..n {
                let a = tolerance_confidence(m, n, 30, 0.15).unwrap();
                let b = tolerance_confidence(m + 1, n + 1, 30, 0.15).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu(1, 0.3).unwrap(), 1.0);
        assert!(mu(1483, 0.005).unwrap() <= 0.005);
        assert!(mu(1482, 0.005).unwrap() > 0.005);
        assert!((mu(1483, 0.005).unwrap() - 0.004_995_761_088_054_982).abs() < 1e-15);
        assert!(mu(0, 0.3).is_err());
        assert!(mu(5, 0.0).is_err());
        assert!(mu(5, 1.0).is_err());
    }

    #[test]
    fn epsilon_boundaries_rejected() {
        assert!(upper_bound_confidence(1, 2, 0.0).is_err());
        assert!(upper_bound_confidence(1, 2, 1.0).is_err());
        assert!(lower_bound_confidence(1, 2, -0.1).is_err());
        assert!(lower_bound_confidence(1, 2, f64::NAN).is_err());
    }

    #[test]
    fn query_bundle_delegates() {
        let q = ConfidenceQuery::new(20, 1, 20, 0.2).unwrap();
        assert_eq!(q.upper().unwrap(), upper_bound_confidence(20, 20, 0.2).unwrap());
        assert_eq!(q.lower().unwrap(), lower_bound_confidence(1, 20, 0.2).unwrap());
        assert_eq!(q.tolerance().unwrap(), tolerance_confidence(1, 20, 20, 0.2).unwrap());
        assert!(q.with_delta(1.2).is_err());
        assert!(ConfidenceQuery::new(21, 1, 20, 0.2).is_err());
    }
}
