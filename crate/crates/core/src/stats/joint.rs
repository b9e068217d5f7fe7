//! Joint CDF of several uniform order statistics.
//!
//! With j_s the number of the N uniform draws that land in (t_{s-1}, t_s],
//! the event {Û_{i_s} <= t_s for all s} is {i_s <= j_1 + ... + j_s} for all
//! s, and each composition (j_1, ..., j_k) has the multinomial weight
//!
//! ```text
//! G = (1 - t_k)^(N - Σj) · Π_s C(N - j_1 - ... - j_{s-1}, j_s) (t_s - t_{s-1})^j_s
//! ```
//!
//! The probability is the sum of G over all admissible compositions. Zero
//! gaps (t_s = t_{s-1}) force j_s = 0 and t_k = 1 forces Σj = N, so those
//! branches are pruned instead of enumerated.

use serde::{Deserialize, Serialize};

use super::special::ln_gamma;
use super::{clamp_probability, StatsError};
use crate::distributions::PiecewiseCdf;

/// Hard cap on the number of enumerated compositions.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointQuery {
    /// Strictly increasing 1-based order-statistic indices i_1 < ... < i_k.
    pub indices: Vec<u64>,
    /// Nondecreasing thresholds t_1 <= ... <= t_k in [0, 1].
    pub thresholds: Vec<f64>,
}

impl JointQuery {
    pub fn new(indices: Vec<u64>, thresholds: Vec<f64>) -> Result<Self, StatsError> {
        let query = Self { indices, thresholds };
        query.validate_shape()?;
        Ok(query)
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    fn validate_shape(&self) -> Result<(), StatsError> {
        if self.indices.is_empty() {
            return Err(StatsError::Domain("joint query needs at least one index".into()));
        }
        if self.indices.len() != self.thresholds.len() {
            return Err(StatsError::Domain(format!(
                "joint query has {} indices but {} thresholds",
                self.indices.len(),
                self.thresholds.len()
            )));
        }
        if self.indices[0] == 0 {
            return Err(StatsError::Domain("order-statistic indices are 1-based".into()));
        }
        if self.indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StatsError::Domain("indices must be strictly increasing".into()));
        }
        if self.thresholds.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(StatsError::Domain("thresholds must lie in [0, 1]".into()));
        }
        if self.thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(StatsError::Domain("thresholds must be nondecreasing".into()));
        }
        Ok(())
    }

    /// Full validation against a sample size.
    pub fn validate(&self, sample_size: u64) -> Result<(), StatsError> {
        self.validate_shape()?;
        let last = *self.indices.last().expect("nonempty");
        if last > sample_size {
            return Err(StatsError::Domain(format!(
                "index {last} exceeds the sample size {sample_size}"
            )));
        }
        Ok(())
    }
}

/// One admissible composition and its log weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointTerm<'a> {
    pub composition: &'a [u32],
    pub log_weight: f64,
}

/// Record of the enumeration behind a joint CDF value.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct JointCdfEvaluation {
    k: usize,
    compositions: Vec<u32>,
    log_weights: Vec<f64>,
    /// Accumulated probability, clamped to [0, 1].
    pub total: f64,
}

impl JointCdfEvaluation {
    pub fn len(&self) -> usize {
        self.log_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_weights.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = JointTerm<'_>> + '_ {
        self.log_weights.iter().enumerate().map(move |(i, &log_weight)| JointTerm {
            composition: &self.compositions[i * self.k..(i + 1) * self.k],
            log_weight,
        })
    }
}

/// Neumaier compensated sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

struct Enumerator<'a> {
    n: u64,
    indices: &'a [u64],
    ln_gap: Vec<f64>,
    gap_zero: Vec<bool>,
    ln_tail: f64,
    tail_zero: bool,
    ln_fact: Vec<f64>,
    stack: Vec<u32>,
    acc: CompensatedSum,
    record: Option<&'a mut JointCdfEvaluation>,
}

impl Enumerator<'_> {
    fn ln_choose(&self, n: u64, k: u64) -> f64 {
        self.ln_fact[n as usize] - self.ln_fact[k as usize] - self.ln_fact[(n - k) as usize]
    }

    fn visit(&mut self, level: usize, used: u64, log_weight: f64) {
        if level == self.indices.len() {
            let rest = self.n - used;
            if rest > 0 && self.tail_zero {
                return;
            }
            let lw = if rest == 0 { log_weight } else { log_weight + rest as f64 * self.ln_tail };
            self.acc.add(lw.exp());
            if let Some(rec) = self.record.as_deref_mut() {
                rec.compositions.extend_from_slice(&self.stack);
                rec.log_weights.push(lw);
            }
            return;
        }
        let need = self.indices[level];
        let lo = need.saturating_sub(used);
        let hi = if self.gap_zero[level] { 0 } else { self.n - used };
        for j in lo..=hi {
            let mut lw = log_weight + self.ln_choose(self.n - used, j);
            if j > 0 {
                lw += j as f64 * self.ln_gap[level];
            }
            self.stack.push(j as u32);
            self.visit(level + 1, used + j, lw);
            self.stack.pop();
        }
    }
}

/// Number of compositions the enumeration will visit, computed with an
/// O(kN) prefix-sum recursion. Saturates at `u128::MAX`.
fn count_terms(n: u64, indices: &[u64], gap_zero: &[bool], tail_zero: bool) -> u128 {
    let size = n as usize + 1;
    let mut ways = vec![0u128; size];
    ways[0] = 1;
    for (level, &need) in indices.iter().enumerate() {
        if !gap_zero[level] {
            let mut running = 0u128;
            for w in ways.iter_mut() {
                running = running.saturating_add(*w);
                *w = running;
            }
        }
        for w in ways.iter_mut().take((need as usize).min(size)) {
            *w = 0;
        }
    }
    if tail_zero {
        ways[n as usize]
    } else {
        ways.iter().fold(0u128, |a, &w| a.saturating_add(w))
    }
}

fn evaluate(
    query: &JointQuery,
    sample_size: u64,
    record: Option<&mut JointCdfEvaluation>,
) -> Result<f64, StatsError> {
    query.validate(sample_size)?;
    if sample_size > u32::MAX as u64 {
        return Err(StatsError::BudgetExceeded { terms: u128::MAX, budget: ENUMERATION_BUDGET });
    }
    let k = query.k();
    let mut ln_gap = Vec::with_capacity(k);
    let mut gap_zero = Vec::with_capacity(k);
    let mut prev = 0.0;
    for &t in &query.thresholds {
        let gap = t - prev;
        gap_zero.push(gap <= 0.0);
        ln_gap.push(gap.ln());
        prev = t;
    }
    let tail = 1.0 - prev;
    let tail_zero = tail <= 0.0;

    let terms = count_terms(sample_size, &query.indices, &gap_zero, tail_zero);
    if terms > ENUMERATION_BUDGET {
        return Err(StatsError::BudgetExceeded { terms, budget: ENUMERATION_BUDGET });
    }

    let ln_fact = (0..=sample_size).map(|i| ln_gamma(i as f64 + 1.0)).collect();
    let mut enumerator = Enumerator {
        n: sample_size,
        indices: &query.indices,
        ln_gap,
        gap_zero,
        ln_tail: tail.ln(),
        tail_zero,
        ln_fact,
        stack: Vec::with_capacity(k),
        acc: CompensatedSum::default(),
        record,
    };
    if let Some(rec) = enumerator.record.as_deref_mut() {
        rec.k = k;
        rec.compositions.reserve(terms as usize * k);
        rec.log_weights.reserve(terms as usize);
    }
    enumerator.visit(0, 0, 0.0);
    let total = clamp_probability(enumerator.acc.value())?;
    if let Some(rec) = enumerator.record {
        rec.total = total;
    }
    Ok(total)
}

/// P{Û_{i_1} <= t_1, ..., Û_{i_k} <= t_k} for N uniform order statistics,
/// together with the enumerated compositions and their log weights.
///
/// Cost is the number of admissible compositions, roughly N^k / k!; queries
/// needing more than [`ENUMERATION_BUDGET`] terms fail up front.
pub fn joint_orderstat_cdf(
    query: &JointQuery,
    sample_size: u64,
) -> Result<(f64, JointCdfEvaluation), StatsError> {
    let mut record = JointCdfEvaluation::default();
    let p = evaluate(query, sample_size, Some(&mut record))?;
    Ok((p, record))
}

/// Same value as [`joint_orderstat_cdf`] without keeping the term record.
pub fn joint_orderstat_probability(query: &JointQuery, sample_size: u64) -> Result<f64, StatsError> {
    evaluate(query, sample_size, None)
}

/// P{F(û_{i_1}) < t_1, ..., F(û_{i_k}) < t_k} for N draws from an arbitrary
/// (possibly atomic) CDF: the uniform joint CDF evaluated at
/// τ_s = sup{F(x) : F(x) < t_s}. Never exceeds the uniform joint CDF at
/// the original thresholds, with equality when the CDF is continuous.
pub fn joint_cdf_noncontinuous(
    cdf: &PiecewiseCdf,
    query: &JointQuery,
    sample_size: u64,
) -> Result<f64, StatsError> {
    query.validate(sample_size)?;
    let taus = query.thresholds.iter().map(|&t| cdf.sup_below(t)).collect();
    let adjusted = JointQuery { indices: query.indices.clone(), thresholds: taus };
    joint_orderstat_probability(&adjusted, sample_size)
}
