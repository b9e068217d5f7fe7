use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::DistributionError;

/// Smallest acceptance probability tolerated for truncated-gaussian
/// rejection sampling.
pub const MIN_ACCEPTANCE: f64 = 1e-6;

/// Marginal density of one parameter coordinate, restricted to its interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Marginal {
    Uniform,
    TruncatedGaussian { mean: f64, sigma: f64 },
}

/// JSON shape of a [`ParameterDomain`]. `marginals` defaults to all uniform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub marginals: Vec<Marginal>,
}

/// Compact parameter box with independent marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainSpec", into = "DomainSpec")]
pub struct ParameterDomain {
    bounds: Vec<[f64; 2]>,
    marginals: Vec<Marginal>,
    /// Probability that the untruncated marginal lands in the interval.
    acceptance: Vec<f64>,
}

impl From<ParameterDomain> for DomainSpec {
    fn from(d: ParameterDomain) -> Self {
        DomainSpec { bounds: d.bounds, marginals: d.marginals }
    }
}

impl TryFrom<DomainSpec> for ParameterDomain {
    type Error = DistributionError;

    fn try_from(spec: DomainSpec) -> Result<Self, Self::Error> {
        ParameterDomain::new(spec)
    }
}

fn normal_mass(mean: f64, sigma: f64, lo: f64, hi: f64) -> f64 {
    let zl = (lo - mean) / (sigma * std::f64::consts::SQRT_2);
    let zh = (hi - mean) / (sigma * std::f64::consts::SQRT_2);
    // use whichever tail keeps the difference away from cancellation
    if zl > 0.0 {
        0.5 * (erfc(zl) - erfc(zh))
    } else {
        0.5 * (erfc(-zh) - erfc(-zl))
    }
}

impl ParameterDomain {
    pub fn new(spec: DomainSpec) -> Result<Self, DistributionError> {
        let DomainSpec { bounds, mut marginals } = spec;
        if bounds.is_empty() {
            return Err(DistributionError::Invalid {
                pointer: "/box".into(),
                message: "parameter box needs at least one coordinate".into(),
            });
        }
        if marginals.is_empty() {
            marginals = vec![Marginal::Uniform; bounds.len()];
        } else if marginals.len() != bounds.len() {
            return Err(DistributionError::Invalid {
                pointer: "/marginals".into(),
                message: format!("expected {} marginals, got {}", bounds.len(), marginals.len()),
            });
        }
        let mut acceptance = Vec::with_capacity(bounds.len());
        for (i, (&[lo, hi], marginal)) in bounds.iter().zip(&marginals).enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(DistributionError::Invalid {
                    pointer: format!("/box/{i}"),
                    message: format!("interval [{lo}, {hi}] must be finite with lo <= hi"),
                });
            }
            let rate = match *marginal {
                Marginal::Uniform => 1.0,
                Marginal::TruncatedGaussian { mean, sigma } => {
                    if !mean.is_finite() {
                        return Err(DistributionError::Invalid {
                            pointer: format!("/marginals/{i}/mean"),
                            message: "mean must be finite".into(),
                        });
                    }
                    if !(sigma > 0.0 && sigma.is_finite()) {
                        return Err(DistributionError::Invalid {
                            pointer: format!("/marginals/{i}/sigma"),
                            message: "sigma must be positive".into(),
                        });
                    }
                    if lo == hi {
                        1.0
                    } else {
                        normal_mass(mean, sigma, lo, hi)
                    }
                }
            };
            acceptance.push(rate);
        }
        Ok(Self { bounds, marginals, acceptance })
    }

    /// Unit hypercube [0, 1]^dimension with uniform marginals.
    pub fn unit_box(dimension: usize) -> Self {
        Self::new(DomainSpec { bounds: vec![[0.0, 1.0]; dimension], marginals: vec![] })
            .expect("unit box is valid")
    }

    pub fn dimension(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[[f64; 2]] {
        &self.bounds
    }

    pub fn marginals(&self) -> &[Marginal] {
        &self.marginals
    }

    /// Rejection-sampling acceptance probability of coordinate `i`.
    pub fn acceptance_rate(&self, i: usize) -> f64 {
        self.acceptance[i]
    }

    /// Draws q from the product density into `out` (cleared first).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) -> Result<(), DistributionError> {
        out.clear();
        for (i, (&[lo, hi], marginal)) in self.bounds.iter().zip(&self.marginals).enumerate() {
            if lo == hi {
                out.push(lo);
                continue;
            }
            let value = match *marginal {
                Marginal::Uniform => lo + (hi - lo) * rng.random::<f64>(),
                Marginal::TruncatedGaussian { mean, sigma } => {
                    let rate = self.acceptance[i];
                    if rate < MIN_ACCEPTANCE {
                        return Err(DistributionError::Truncation { coordinate: i, acceptance: rate });
                    }
                    let normal = Normal::new(mean, sigma).expect("validated sigma");
                    let cap = (100.0 / rate).ceil() as u64 + 1000;
                    let mut drawn = None;
                    for _ in 0..cap {
                        let v = normal.sample(rng);
                        if (lo..=hi).contains(&v) {
                            drawn = Some(v);
                            break;
                        }
                    }
                    drawn.ok_or(DistributionError::Truncation { coordinate: i, acceptance: rate })?
                }
            };
            out.push(value);
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<f64>, DistributionError> {
        let mut q = Vec::with_capacity(self.dimension());
        self.sample_into(rng, &mut q)?;
        Ok(q)
    }
}
