use thiserror::Error;

use crate::omega::Generator;

/// Failure to parse a rational, a form expression, or a tensor expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            message: message.into(),
        }
    }
}

/// Errors raised by algebraic operations on ill-matched operands.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("generator mismatch: expected {expected}, found {found}")]
    GeneratorMismatch { expected: Generator, found: Generator },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("expected a degree-{expected} element, found degree {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("expected a homogeneous element of degree {expected}")]
    NotHomogeneous { expected: usize },
    #[error("matrix is not invertible")]
    Singular,
    #[error("the twisting parameter q must be nonzero")]
    ZeroParameter,
}

/// Errors raised while loading a scenario file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
    #[error("{0} not invertible")]
    NotInvertible(&'static str),
    #[error("field `{field}`: potential entry {entry} must be homogeneous of degree 1")]
    Degree { field: String, entry: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn messages() {
        assert_eq!(ScenarioError::NotInvertible("S_matrix").to_string(), "S_matrix not invertible");
        let e = ScenarioError::Field {
            field: "colour".into(),
            message: "unknown field".into(),
        };
        assert_eq!(e.to_string(), "field `colour`: unknown field");
        assert_eq!(
            AlgebraError::GeneratorMismatch {
                expected: Generator::X,
                found: Generator::Y
            }
            .to_string(),
            "generator mismatch: expected x, found y"
        );
    }
}
