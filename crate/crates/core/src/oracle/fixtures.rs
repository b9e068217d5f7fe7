use serde::{Deserialize, Serialize};

use super::OracleError;
use crate::distributions::{Atom, CdfSpec, PiecewiseCdf, Segment};
use crate::model::json_pointer;
use crate::stats::JointQuery;

/// A CDF, a sample size and the joint queries to check against it.
///
/// A fixture file is a JSON array of these:
///
/// ```json
/// [{"id": "uniform", "cdf": {"segments": [{"x_lo": 0, "x_hi": 1, "f_lo": 0, "f_hi": 1}]},
///   "sample_size": 5, "queries": [{"indices": [2], "thresholds": [0.5]}]}]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InequalityFixture {
    pub id: String,
    pub cdf: PiecewiseCdf,
    pub sample_size: u64,
    pub queries: Vec<JointQuery>,
}

fn fixture_error(pointer: String, message: impl Into<String>) -> OracleError {
    OracleError::Fixture { pointer, message: message.into() }
}

/// Parses and validates a fixture file.
pub fn load_fixtures(text: &str) -> Result<Vec<InequalityFixture>, OracleError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let fixtures: Vec<InequalityFixture> = serde_path_to_error::deserialize(de)
        .map_err(|e| fixture_error(json_pointer(e.path()), e.inner().to_string()))?;
    if fixtures.is_empty() {
        return Err(fixture_error(String::new(), "no fixtures"));
    }
    for (f, fixture) in fixtures.iter().enumerate() {
        if fixture.sample_size == 0 {
            return Err(fixture_error(format!("/{f}/sample_size"), "sample size must be at least 1"));
        }
        if fixture.queries.is_empty() {
            return Err(fixture_error(format!("/{f}/queries"), "no queries"));
        }
        for (j, query) in fixture.queries.iter().enumerate() {
            query
                .validate(fixture.sample_size)
                .map_err(|e| fixture_error(format!("/{f}/queries/{j}"), e.to_string()))?;
        }
    }
    Ok(fixtures)
}

fn queries(list: &[(&[u64], &[f64])]) -> Vec<JointQuery> {
    list.iter()
        .map(|(i, t)| JointQuery::new(i.to_vec(), t.to_vec()).expect("valid fixture query"))
        .collect()
}

fn cdf(segments: &[[f64; 4]], atoms: &[[f64; 2]]) -> PiecewiseCdf {
    PiecewiseCdf::new(CdfSpec {
        segments: segments
            .iter()
            .map(|&[x_lo, x_hi, f_lo, f_hi]| Segment { x_lo, x_hi, f_lo, f_hi })
            .collect(),
        atoms: atoms.iter().map(|&[x, mass]| Atom { x, mass }).collect(),
    })
    .expect("valid fixture cdf")
}

/// Continuous and atomic fixtures with thresholds on both sides of the
/// jumps.
pub fn builtin_fixtures() -> Vec<InequalityFixture> {
    vec![
        InequalityFixture {
            id: "uniform".into(),
            cdf: cdf(&[[0.0, 1.0, 0.0, 1.0]], &[]),
            sample_size: 5,
            queries: queries(&[
                (&[2], &[0.5]),
                (&[5], &[0.9]),
                (&[1, 4], &[0.2, 0.7]),
                (&[2, 3], &[0.3, 0.3]),
            ]),
        },
        InequalityFixture {
            // F = 0.3 x on [0, 1), flat, then 0.3 -> 1 on [2, 4)
            id: "continuous_with_gap".into(),
            cdf: cdf(&[[0.0, 1.0, 0.0, 0.3], [2.0, 4.0, 0.3, 1.0]], &[]),
            sample_size: 6,
            queries: queries(&[(&[1], &[0.3]), (&[3], &[0.45]), (&[2, 5], &[0.25, 0.8])]),
        },
        InequalityFixture {
            // jump 0 -> 0.5 at 0, then 0.5 + x on [0, 0.5)
            id: "atom_then_ramp".into(),
            cdf: cdf(&[[0.0, 0.5, 0.5, 1.0]], &[[0.0, 0.5]]),
            sample_size: 4,
            queries: queries(&[
                (&[1], &[0.3]),
                (&[2], &[0.5]),
                (&[2], &[0.75]),
                (&[1, 3], &[0.4, 0.8]),
                (&[2, 4], &[0.6, 0.9]),
            ]),
        },
        InequalityFixture {
            // jumps to 0.2 at 0 and to 0.5 at 1, then 0.5 -> 1 on [2, 3)
            id: "two_atoms".into(),
            cdf: cdf(&[[2.0, 3.0, 0.5, 1.0]], &[[0.0, 0.2], [1.0, 0.3]]),
            sample_size: 6,
            queries: queries(&[
                (&[1], &[0.2]),
                (&[2], &[0.35]),
                (&[3], &[0.6]),
                (&[1, 4], &[0.35, 0.5]),
                (&[2, 6], &[0.5, 0.95]),
            ]),
        },
        InequalityFixture {
            // purely discrete: three equal atoms
            id: "three_point".into(),
            cdf: cdf(&[], &[[-1.0, 1.0 / 3.0], [0.0, 1.0 / 3.0], [1.0, 1.0 / 3.0]]),
            sample_size: 3,
            queries: queries(&[(&[1], &[0.5]), (&[2], &[0.9]), (&[1, 3], &[0.5, 1.0])]),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_fixtures_round_trip() {
        let fixtures = builtin_fixtures();
        let text = serde_json::to_string(&fixtures).unwrap();
        assert_eq!(load_fixtures(&text).unwrap(), fixtures);
    }

    #[test]
    fn corrupted_files_point_at_the_problem() {
        let cases = [
            ("[", ""),
            ("[]", ""),
            (r#"[{"id": "x", "cdf": {"atoms": [{"x": 0, "mass": 2}]}, "sample_size": 2, "queries": []}]"#, "/0/cdf"),
            (
                r#"[{"id": "x", "cdf": {"atoms": [{"x": 0, "mass": 1}]}, "sample_size": 2,
                    "queries": [{"indices": [3], "thresholds": [0.5]}]}]"#,
                "/0/queries/0",
            ),
        ];
        for (text, pointer) in cases {
            match load_fixtures(text) {
                Err(OracleError::Fixture { pointer: p, .. }) => assert_eq!(p, pointer, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }
}
