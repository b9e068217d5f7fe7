//! One-dimensional CDFs with atoms and product densities over a parameter
//! box.
//!
//! Both types have a JSON form:
//!
//! ```json
//! {"segments": [{"x_lo": 0.0, "x_hi": 0.5, "f_lo": 0.5, "f_hi": 1.0}],
//!  "atoms": [{"x": 0.0, "mass": 0.5}]}
//!
//! {"box": [[0.0, 1.0], [-1.0, 1.0]],
//!  "marginals": [{"kind": "uniform"},
//!                {"kind": "truncated_gaussian", "mean": 0.0, "sigma": 0.5}]}
//! ```

mod cdf;
mod domain;

pub use cdf::{Atom, CdfSpec, PiecewiseCdf, Segment};
pub use domain::{DomainSpec, Marginal, ParameterDomain, MIN_ACCEPTANCE};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    /// `pointer` is a JSON pointer relative to the object being validated.
    #[error("invalid distribution at '{pointer}': {message}")]
    Invalid { pointer: String, message: String },
    #[error("truncated gaussian on coordinate {coordinate} accepts only {acceptance:e} of draws")]
    Truncation { coordinate: usize, acceptance: f64 },
}
