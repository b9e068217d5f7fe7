//! Order-statistics confidence calculus for probabilistic robustness
//! analysis.
//!
//! * [`stats`]: exact confidence bounds, tolerance intervals, sample-size
//!   planners and joint order-statistic CDFs.
//! * [`distributions`]: CDFs with atoms and parameter densities.
//! * [`model`]: the uncertain-quantity expression language and its
//!   built-in robustness quantities.
//! * [`experiment`]: the seeded parallel Monte Carlo engine and reports.
//! * [`oracle`]: simulation cross-checks of every closed form.
//! * [`cli`]: the `ordstat` command-line front end.

pub mod cli;
pub mod distributions;
pub mod experiment;
pub mod model;
pub mod oracle;
pub mod stats;
