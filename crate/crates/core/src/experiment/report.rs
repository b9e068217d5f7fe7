use std::io::{self, Write};
use std::ops::RangeInclusive;

use serde::Serialize;

use super::EmpiricalOrderStats;
use crate::stats::{
    lower_bound_confidence, min_sample_size_extreme, min_sample_size_tolerance, tolerance_confidence,
    upper_bound_confidence, StatsError,
};

/// û_1 and û_N with the confidence that each misses at most ε of the mass
/// on its side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremeEstimates {
    pub epsilon: f64,
    pub minimum: f64,
    /// Lower bound on P{P{u < û_1} <= ε}.
    pub minimum_confidence: f64,
    pub maximum: f64,
    /// Lower bound on P{P{u > û_N} <= ε}.
    pub maximum_confidence: f64,
}

/// Tolerance interval (û_m, û_n].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceInterval {
    pub m: u64,
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
    pub epsilon: f64,
    /// Lower bound on P{P{û_m < u <= û_n} >= 1 - ε}.
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub n: u64,
    pub bound: f64,
}

/// Minimum sample sizes for the requested (ε, δ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlannerEcho {
    pub epsilon: f64,
    pub delta: f64,
    pub extreme_sample_size: u64,
    pub tolerance_sample_size: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub label: String,
    pub expression: String,
    pub sample_size: u64,
    pub seed: u64,
    pub rejected: u64,
    pub extremes: ExtremeEstimates,
    pub tolerance: ToleranceInterval,
    pub planner: PlannerEcho,
    /// Upper-bound confidence of û_n over the requested index range.
    pub curve: Vec<CurvePoint>,
}

impl AnalysisReport {
    pub fn build(
        stats: &EmpiricalOrderStats,
        expression: &str,
        epsilon: f64,
        delta: f64,
        (m, n): (u64, u64),
        curve: RangeInclusive<u64>,
    ) -> Result<Self, StatsError> {
        Ok(Self {
            label: stats.label.clone(),
            expression: expression.to_string(),
            sample_size: stats.sample_size,
            seed: stats.seed,
            rejected: stats.rejected,
            extremes: estimate_extremes(stats, epsilon)?,
            tolerance: tolerance_report(stats, m, n, epsilon)?,
            planner: PlannerEcho {
                epsilon,
                delta,
                extreme_sample_size: min_sample_size_extreme(epsilon, delta)?,
                tolerance_sample_size: min_sample_size_tolerance(epsilon, delta)?,
            },
            curve: tradeoff_curve(stats.sample_size, epsilon, curve)?,
        })
    }
}

pub fn estimate_extremes(stats: &EmpiricalOrderStats, epsilon: f64) -> Result<ExtremeEstimates, StatsError> {
    let n = stats.sample_size;
    Ok(ExtremeEstimates {
        epsilon,
        minimum: stats.order_stat(1),
        minimum_confidence: lower_bound_confidence(1, n, epsilon)?,
        maximum: stats.order_stat(n),
        maximum_confidence: upper_bound_confidence(n, n, epsilon)?,
    })
}

/// upper_bound_confidence(n, N, ε) for each n in `range`, ascending.
pub fn tradeoff_curve(sample_size: u64, epsilon: f64, range: RangeInclusive<u64>) -> Result<Vec<CurvePoint>, StatsError> {
    let (lo, hi) = (*range.start(), *range.end());
    if lo < 1 || lo > hi || hi > sample_size {
        return Err(StatsError::Domain(format!("curve range {lo}..={hi} must lie within 1..={sample_size}")));
    }
    range
        .map(|n| Ok(CurvePoint { n, bound: upper_bound_confidence(n, sample_size, epsilon)? }))
        .collect()
}

pub fn tolerance_report(stats: &EmpiricalOrderStats, m: u64, n: u64, epsilon: f64) -> Result<ToleranceInterval, StatsError> {
    let confidence = tolerance_confidence(m, n, stats.sample_size, epsilon)?;
    Ok(ToleranceInterval { m, n, lower: stats.order_stat(m), upper: stats.order_stat(n), epsilon, confidence })
}

/// Writes `n,bound` CSV with a header row and LF line endings. Values use
/// the shortest representation that round-trips (at most 17 significant
/// digits).
pub fn write_curve_csv<W: Write>(mut out: W, points: &[CurvePoint]) -> io::Result<()> {
    out.write_all(b"n,bound\n")?;
    for p in points {
        writeln!(out, "{},{:?}", p.n, p.bound)?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(values: Vec<f64>) -> EmpiricalOrderStats {
        EmpiricalOrderStats { label: "t".into(), sample_size: values.len() as u64, seed: 0, rejected: 0, values }
    }

    #[test]
    fn single_sample_extremes() {
        let e = estimate_extremes(&stats(vec![0.25]), 0.5).unwrap();
        assert_eq!((e.minimum, e.maximum), (0.25, 0.25));
        assert!((e.minimum_confidence - 0.5).abs() < 1e-15);
        assert!((e.maximum_confidence - 0.5).abs() < 1e-15);
    }

    #[test]
    fn curve_is_monotone_and_anchored() {
        let curve = tradeoff_curve(8000, 0.001, 7800..=8000).unwrap();
        assert_eq!(curve.len(), 201);
        assert!(curve.windows(2).all(|w| w[0].bound <= w[1].bound));
        let last = curve.last().unwrap();
        assert!((last.bound - (1.0 - 0.999f64.powi(8000))).abs() < 1e-12);
        assert!(tradeoff_curve(10, 0.1, 0..=3).is_err());
        assert!(tradeoff_curve(10, 0.1, 3..=11).is_err());
    }

    #[test]
    fn tolerance_indices_checked() {
        let s = stats(vec![1.0, 2.0, 3.0]);
        let t = tolerance_report(&s, 1, 3, 0.3).unwrap();
        assert_eq!((t.lower, t.upper), (1.0, 3.0));
        assert!(tolerance_report(&s, 2, 2, 0.3).is_err());
        assert!(tolerance_report(&s, 1, 4, 0.3).is_err());
    }

    #[test]
    fn csv_format() {
        let mut buf = Vec::new();
        let points = [CurvePoint { n: 1, bound: 1e-300 }, CurvePoint { n: 2, bound: 0.1 + 0.2 }];
        write_curve_csv(&mut buf, &points).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,bound\n1,1e-300\n2,0.30000000000000004\n");
    }
}
