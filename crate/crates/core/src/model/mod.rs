//! Uncertain quantities u(q): a small expression language over parameter
//! coordinates, the built-in robustness quantities, and the model file that
//! ties an expression to a parameter domain.
//!
//! Model file schema:
//!
//! ```json
//! {
//!   "label": "uncertain cubic",
//!   "domain": {"box": [[2.0, 4.0], [3.0, 5.0]], "marginals": [...]},
//!   "expression": "max_re_root(1, q[0], q[1], 1)"
//! }
//! ```
//!
//! `marginals` is optional (all uniform). Unknown fields are rejected.

mod ast;
mod eval;
mod parser;
pub mod poly;

pub use ast::{Arity, BinaryOp, Builtin, Expr};
pub use eval::{evaluate, Undefined};
pub use parser::{parse_expression, ParseError, ParseErrorKind};
pub use poly::{max_re_root, peak_gain, polynomial_roots, PolyError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::{DistributionError, DomainSpec, ParameterDomain};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// `pointer` is a JSON pointer into the model document.
    #[error("invalid model at '{pointer}': {message}")]
    Schema { pointer: String, message: String },
}

impl ModelError {
    pub fn pointer(&self) -> &str {
        match self {
            ModelError::Schema { pointer, .. } => pointer,
        }
    }
}

/// JSON shape of an [`UncertainModel`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default)]
    pub label: String,
    pub domain: DomainSpec,
    pub expression: String,
}

/// Parameter domain, density and quantity expression together.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertainModel {
    pub label: String,
    pub domain: ParameterDomain,
    pub expression: Expr,
    source: String,
}

impl UncertainModel {
    pub fn new(label: impl Into<String>, domain: ParameterDomain, expression: Expr) -> Result<Self, ModelError> {
        if let Some(max) = expression.max_param() {
            if max >= domain.dimension() {
                return Err(ModelError::Schema {
                    pointer: "/expression".into(),
                    message: format!(
                        "q[{max}] is out of range for a {}-dimensional domain",
                        domain.dimension()
                    ),
                });
            }
        }
        let source = expression.to_string();
        Ok(Self { label: label.into(), domain, expression, source })
    }

    pub fn from_spec(spec: ModelSpec) -> Result<Self, ModelError> {
        let domain = ParameterDomain::new(spec.domain).map_err(|e| match e {
            DistributionError::Invalid { pointer, message } => {
                ModelError::Schema { pointer: format!("/domain{pointer}"), message }
            }
            other => ModelError::Schema { pointer: "/domain".into(), message: other.to_string() },
        })?;
        let expression = parse_expression(&spec.expression)
            .map_err(|e| ModelError::Schema { pointer: "/expression".into(), message: e.to_string() })?;
        let mut model = Self::new(spec.label, domain, expression)?;
        model.source = spec.expression;
        Ok(model)
    }

    /// Parses and validates a model document. Errors carry a JSON pointer to
    /// the offending field.
    pub fn from_json_str(text: &str) -> Result<Self, ModelError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let spec: ModelSpec = serde_path_to_error::deserialize(de).map_err(|e| ModelError::Schema {
            pointer: json_pointer(e.path()),
            message: e.inner().to_string(),
        })?;
        Self::from_spec(spec)
    }

    /// Expression text as given in the model file.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn evaluate(&self, q: &[f64]) -> Result<f64, Undefined> {
        evaluate(&self.expression, q)
    }
}

/// Converts a serde path into an RFC 6901 JSON pointer.
pub(crate) fn json_pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}
