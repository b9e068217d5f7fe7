//! Seeded Monte Carlo engine: draw N parameter samples, evaluate the
//! uncertain quantity, sort into order statistics and attach confidence
//! statements to the estimates.
//!
//! Sample `i` of a run with seed `s` draws from its own generator
//! [`substream`]`(s, i)`, so results do not depend on how samples are
//! spread over worker threads.

mod report;

pub use report::{
    estimate_extremes, tolerance_report, tradeoff_curve, write_curve_csv, AnalysisReport, CurvePoint,
    ExtremeEstimates, PlannerEcho, ToleranceInterval,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::distributions::DistributionError;
use crate::model::UncertainModel;
use crate::stats::StatsError;

/// Consecutive undefined evaluations tolerated for one sample slot under
/// [`UndefinedPolicy::Resample`].
pub const RETRY_CAP: u32 = 10_000;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("sample size must be at least 1")]
    EmptySample,
    #[error("sample {index}: {reason}")]
    Undefined { index: u64, reason: String },
    #[error("sample {index}: {RETRY_CAP} consecutive undefined evaluations (last: {reason})")]
    RetriesExhausted { index: u64, reason: String },
    #[error("sample {index}: {source}")]
    Sampling { index: u64, source: DistributionError },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("worker pool: {0}")]
    Pool(String),
}

/// What to do when u(q) is undefined at a drawn q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UndefinedPolicy {
    /// Discard q and draw again from the same slot's substream.
    #[default]
    Resample,
    /// Abort the run.
    Fail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunConfig {
    /// Worker threads; 0 uses the rayon default.
    pub workers: usize,
    pub policy: UndefinedPolicy,
}

/// Sorted observations û_1 <= ... <= û_N of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalOrderStats {
    pub label: String,
    pub sample_size: u64,
    pub seed: u64,
    /// Undefined samples discarded and redrawn.
    pub rejected: u64,
    pub values: Vec<f64>,
}

impl EmpiricalOrderStats {
    /// û_i, 1-based.
    pub fn order_stat(&self, i: u64) -> f64 {
        self.values[(i - 1) as usize]
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for slot `index` of a run seeded with `seed`.
///
/// The ChaCha8 seed is `splitmix64(seed ^ splitmix64(index))`, with
/// splitmix64 the standard 64-bit finalizer (golden-gamma increment, then
/// shifts 30/27/31 and multipliers 0xBF58476D1CE4E5B9, 0x94D049BB133111EB).
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

/// Runs `f` on a pool of `workers` threads, or on the global rayon pool
/// when `workers` is 0.
pub(crate) fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, ExperimentError> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| ExperimentError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

fn draw_slot(model: &UncertainModel, seed: u64, index: u64, policy: UndefinedPolicy) -> Result<(f64, u64), ExperimentError> {
    let mut rng = substream(seed, index);
    let mut q = Vec::with_capacity(model.domain.dimension());
    let mut rejected = 0u64;
    loop {
        model
            .domain
            .sample_into(&mut rng, &mut q)
            .map_err(|source| ExperimentError::Sampling { index, source })?;
        match model.evaluate(&q) {
            Ok(v) => return Ok((v, rejected)),
            Err(e) => match policy {
                UndefinedPolicy::Fail => return Err(ExperimentError::Undefined { index, reason: e.reason }),
                UndefinedPolicy::Resample => {
                    rejected += 1;
                    if rejected >= RETRY_CAP as u64 {
                        return Err(ExperimentError::RetriesExhausted { index, reason: e.reason });
                    }
                }
            },
        }
    }
}

/// Draws `sample_size` i.i.d. samples of u(q) and sorts them.
///
/// When several slots fail, the error of the lowest slot index is reported,
/// so errors are as deterministic as results.
pub fn run_experiment(
    model: &UncertainModel,
    sample_size: u64,
    seed: u64,
    config: RunConfig,
) -> Result<EmpiricalOrderStats, ExperimentError> {
    if sample_size == 0 {
        return Err(ExperimentError::EmptySample);
    }
    let draws: Vec<Result<(f64, u64), ExperimentError>> = with_workers(config.workers, || {
        (0..sample_size).into_par_iter().map(|i| draw_slot(model, seed, i, config.policy)).collect()
    })?;
    let mut values = Vec::with_capacity(sample_size as usize);
    let mut rejected = 0;
    for draw in draws {
        let (v, r) = draw?;
        values.push(v);
        rejected += r;
    }
    values.sort_by(f64::total_cmp);
    Ok(EmpiricalOrderStats { label: model.label.clone(), sample_size, seed, rejected, values })
}
