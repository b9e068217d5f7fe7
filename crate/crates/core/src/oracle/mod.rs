//! Simulation and exhaustive-search cross-checks of the closed forms in
//! [`crate::stats`].
//!
//! Checks produce [`Verdict`]s rather than panics so a whole suite can be
//! reported at once.

mod fixtures;

pub use fixtures::{builtin_fixtures, load_fixtures, InequalityFixture};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::distributions::PiecewiseCdf;
use crate::experiment::{substream, with_workers, ExperimentError};
use crate::stats::{
    joint_cdf_noncontinuous, joint_orderstat_probability, min_sample_size_extreme, min_sample_size_tolerance, mu,
    JointQuery, StatsError,
};

/// Fewest trials a simulation accepts.
pub const MIN_TRIALS: u64 = 1_000;

/// Simulated probabilities must land within this many standard errors.
pub const SIGMA_BAND: f64 = 4.0;

/// Trials per generator substream: block `b` covers trials
/// `b * TRIAL_BLOCK ..` and draws from `substream(seed, b)`.
pub const TRIAL_BLOCK: u64 = 1024;

/// Default trial count of the inequality suite.
pub const SUITE_TRIALS: u64 = 200_000;

/// Closed forms that should agree exactly must agree to this tolerance.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("need at least {MIN_TRIALS} trials, got {0}")]
    TooFewTrials(u64),
    #[error("invalid fixture at '{pointer}': {message}")]
    Fixture { pointer: String, message: String },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationEstimate {
    pub estimate: f64,
    /// Binomial standard error sqrt(p̂(1 - p̂) / trials).
    pub std_error: f64,
    pub trials: u64,
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub fixture: String,
    pub check: String,
    pub expected: f64,
    pub observed: f64,
    /// Standard error behind the band for simulation checks, 0 otherwise.
    pub sigma: f64,
    pub pass: bool,
}

/// Estimates P{F(û_{i_1}) < t_1, ..., F(û_{i_k}) < t_k} by drawing
/// `trials` samples of size N from `cdf`.
///
/// The count of hits is a sum of integers over fixed trial blocks, so the
/// estimate does not depend on `workers` (0 = rayon default).
pub fn simulate_joint_probability(
    cdf: &PiecewiseCdf,
    query: &JointQuery,
    sample_size: u64,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimulationEstimate, OracleError> {
    if trials < MIN_TRIALS {
        return Err(OracleError::TooFewTrials(trials));
    }
    query.validate(sample_size)?;
    let blocks = trials.div_ceil(TRIAL_BLOCK);
    let hits: u64 = with_workers(workers, || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut rng = substream(seed, b);
                let mut draws = vec![0.0; sample_size as usize];
                let count = TRIAL_BLOCK.min(trials - b * TRIAL_BLOCK);
                let mut hits = 0u64;
                for _ in 0..count {
                    for d in draws.iter_mut() {
                        *d = cdf.sample(&mut rng);
                    }
                    draws.sort_by(f64::total_cmp);
                    let event = query
                        .indices
                        .iter()
                        .zip(&query.thresholds)
                        .all(|(&i, &t)| cdf.eval(draws[(i - 1) as usize]) < t);
                    hits += event as u64;
                }
                hits
            })
            .sum()
    })?;
    let p = hits as f64 / trials as f64;
    Ok(SimulationEstimate { estimate: p, std_error: (p * (1.0 - p) / trials as f64).sqrt(), trials })
}

/// Compares a simulation against a closed form p using the standard error
/// sqrt(p(1 - p) / trials) implied by p itself; when p is 0 or 1 the
/// simulation must match exactly.
pub fn simulation_verdict(fixture: &str, check: &str, expected: f64, sim: &SimulationEstimate) -> Verdict {
    let sigma = (expected * (1.0 - expected) / sim.trials as f64).max(0.0).sqrt();
    let gap = (sim.estimate - expected).abs();
    let pass = if sigma == 0.0 { gap == 0.0 } else { gap <= SIGMA_BAND * sigma };
    Verdict { fixture: fixture.into(), check: check.into(), expected, observed: sim.estimate, sigma, pass }
}

fn exact_verdict(fixture: &str, check: &str, expected: f64, observed: f64, pass: bool) -> Verdict {
    Verdict { fixture: fixture.into(), check: check.into(), expected, observed, sigma: 0.0, pass }
}

fn describe(query: &JointQuery) -> String {
    let parts: Vec<String> =
        query.indices.iter().zip(&query.thresholds).map(|(i, t)| format!("{i}:{t}")).collect();
    parts.join(",")
}

/// Checks the τ-adjusted joint CDF on every fixture query:
///
/// * `simulation`: simulated F̃ within 4σ of the τ-adjusted closed form;
/// * `bound`: τ-adjusted value <= the uniform joint CDF at the original
///   thresholds;
/// * `equality` (continuous fixtures): both closed forms agree;
/// * `strict` (single-index queries whose threshold falls inside a jump):
///   the τ-adjusted value is strictly smaller.
///
/// Query `j` of fixture `f` is simulated with seed `seed + 1000 f + j`.
pub fn verify_inequality_suite(
    fixtures: &[InequalityFixture],
    seed: u64,
    trials: u64,
    workers: usize,
) -> Result<Vec<Verdict>, OracleError> {
    let mut verdicts = Vec::new();
    for (f, fixture) in fixtures.iter().enumerate() {
        let n = fixture.sample_size;
        for (j, query) in fixture.queries.iter().enumerate() {
            let id = format!("{}[{}]", fixture.id, describe(query));
            let adjusted = joint_cdf_noncontinuous(&fixture.cdf, query, n)?;
            let original = joint_orderstat_probability(query, n)?;
            let query_seed = seed.wrapping_add(1000 * f as u64 + j as u64);
            let sim = simulate_joint_probability(&fixture.cdf, query, n, trials, query_seed, workers)?;
            verdicts.push(simulation_verdict(&id, "simulation", adjusted, &sim));
            verdicts.push(exact_verdict(&id, "bound", original, adjusted, adjusted <= original + 1e-12));
            if fixture.cdf.is_continuous() {
                let pass = (adjusted - original).abs() <= CLOSED_FORM_TOLERANCE;
                verdicts.push(exact_verdict(&id, "equality", original, adjusted, pass));
            } else if query.k() == 1 {
                let t = query.thresholds[0];
                let inside_jump = fixture.cdf.sup_below(t) < t;
                if inside_jump && original > 0.0 {
                    verdicts.push(exact_verdict(&id, "strict", original, adjusted, adjusted < original));
                }
            }
        }
    }
    Ok(verdicts)
}

/// Accuracy and risk levels covered by the planner suite.
pub const PLANNER_GRID: [f64; 4] = [0.05, 0.01, 0.005, 0.001];

/// Checks both planners on [`PLANNER_GRID`]²:
///
/// * `tolerance_bracket`: μ(N*) <= δ < μ(N* - 1);
/// * `extreme_search`: the extreme planner equals the least N with
///   (1 - ε)^N <= δ found by counting up;
/// * `tolerance_search` at (0.05, 0.05): equals the least N <= 10^4 with
///   μ(N) <= δ found by counting up.
pub fn verify_planner_suite() -> Result<Vec<Verdict>, OracleError> {
    let mut verdicts = Vec::new();
    for &epsilon in &PLANNER_GRID {
        for &delta in &PLANNER_GRID {
            let id = format!("eps={epsilon},delta={delta}");
            let n = min_sample_size_tolerance(epsilon, delta)?;
            let at = mu(n, epsilon)?;
            let before = if n > 1 { mu(n - 1, epsilon)? } else { 1.0 };
            verdicts.push(exact_verdict(&id, "tolerance_bracket", delta, at, at <= delta && delta < before));

            let planned = min_sample_size_extreme(epsilon, delta)?;
            let searched = (1..).find(|&k| (1.0 - epsilon).powi(k) <= delta).expect("terminates") as u64;
            verdicts.push(exact_verdict(&id, "extreme_search", searched as f64, planned as f64, planned == searched));
        }
    }
    let searched = (2..=10_000u64).find(|&k| mu(k, 0.05).map(|m| m <= 0.05).unwrap_or(false));
    let planned = min_sample_size_tolerance(0.05, 0.05)?;
    let expected = searched.map_or(f64::NAN, |k| k as f64);
    verdicts.push(exact_verdict(
        "eps=0.05,delta=0.05",
        "tolerance_search",
        expected,
        planned as f64,
        searched == Some(planned),
    ));
    Ok(verdicts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Atom, CdfSpec, Segment};

    #[test]
    fn two_uniform_draws() {
        let u = PiecewiseCdf::uniform(0.0, 1.0).unwrap();
        let q = JointQuery::new(vec![2], vec![0.5]).unwrap();
        let sim = simulate_joint_probability(&u, &q, 2, 200_000, 7, 1).unwrap();
        assert!((sim.estimate - 0.25).abs() < 4.0 * sim.std_error, "{sim:?}");
    }

    #[test]
    fn single_draw_inside_jump_never_hits() {
        let cdf = PiecewiseCdf::new(CdfSpec {
            segments: vec![Segment { x_lo: 0.0, x_hi: 0.5, f_lo: 0.5, f_hi: 1.0 }],
            atoms: vec![Atom { x: 0.0, mass: 0.5 }],
        })
        .unwrap();
        let q = JointQuery::new(vec![1], vec![0.3]).unwrap();
        let sim = simulate_joint_probability(&cdf, &q, 1, 10_000, 7, 1).unwrap();
        assert_eq!((sim.estimate, sim.std_error), (0.0, 0.0));
    }

    #[test]
    fn worker_count_does_not_matter() {
        let u = PiecewiseCdf::uniform(0.0, 1.0).unwrap();
        let q = JointQuery::new(vec![1, 3], vec![0.2, 0.6]).unwrap();
        let a = simulate_joint_probability(&u, &q, 4, 5000, 3, 1).unwrap();
        let b = simulate_joint_probability(&u, &q, 4, 5000, 3, 4).unwrap();
        assert_eq!(a, b);
        assert!(matches!(simulate_joint_probability(&u, &q, 4, 999, 3, 1), Err(OracleError::TooFewTrials(999))));
    }

    #[test]
    fn planner_suite_passes() {
        let verdicts = verify_planner_suite().unwrap();
        assert_eq!(verdicts.len(), 33);
        assert!(verdicts.iter().all(|v| v.pass), "{verdicts:#?}");
    }

    #[test]
    fn inequality_suite_passes_on_builtin_fixtures() {
        let verdicts = verify_inequality_suite(&builtin_fixtures(), 42, SUITE_TRIALS, 0).unwrap();
        let failed: Vec<_> = verdicts.iter().filter(|v| !v.pass).collect();
        assert!(failed.is_empty(), "{failed:#?}");
        assert!(verdicts.iter().any(|v| v.check == "strict"));
    }
}
