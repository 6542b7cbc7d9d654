//! Safety specifications of the form `G[i1,i2] !(lhs op rhs)` and model files.
//!
//! The proposition inside the negation describes the unsafe half-space Ψ.
//! Both sides are linear expressions over the state names; `>=` is flipped so
//! that Ψ is always stored as `a·x <= b`.

mod model;
mod parser;

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::LinearConstraint;

pub use model::{load_model, parse_model, Model, ModelFile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{col}: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("unknown variable `{name}` at {line}:{col}")]
    UnknownVariable {
        name: String,
        line: usize,
        col: usize,
    },
    #[error("empty interval [{lower},{upper}]")]
    EmptyInterval { lower: usize, upper: usize },
    #[error("unsupported fragment at {line}:{col}: {construct}")]
    Unsupported {
        construct: String,
        line: usize,
        col: usize,
    },
}

/// `G[lower,upper] ¬Ψ` with Ψ a single half-space over the state.
#[derive(Debug, Clone, PartialEq)]
pub struct SafetySpec {
    lower: usize,
    upper: usize,
    unsafe_set: LinearConstraint,
}

impl SafetySpec {
    pub fn new(lower: usize, upper: usize, unsafe_set: LinearConstraint) -> Result<Self, ParseError> {
        if lower > upper {
            return Err(ParseError::EmptyInterval { lower, upper });
        }
        Ok(Self {
            lower,
            upper,
            unsafe_set,
        })
    }

    pub fn parse(text: &str, names: &[String]) -> Result<Self, ParseError> {
        parser::parse(text, names)
    }

    pub fn interval(&self) -> (usize, usize) {
        (self.lower, self.upper)
    }

    /// Ψ as `a·x <= b`.
    pub fn unsafe_set(&self) -> &LinearConstraint {
        &self.unsafe_set
    }

    /// Canonical text that parses back to an identical spec.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut expr = String::new();
        for (c, name) in self.unsafe_set.coefficients().iter().zip(names) {
            if *c == 0.0 {
                continue;
            }
            if expr.is_empty() {
                let _ = write!(expr, "{c}*{name}");
            } else if *c < 0.0 {
                let _ = write!(expr, " - {}*{name}", -c);
            } else {
                let _ = write!(expr, " + {c}*{name}");
            }
        }
        if expr.is_empty() {
            expr.push('0');
        }
        format!(
            "G[{},{}] !({expr} <= {})",
            self.lower,
            self.upper,
            self.unsafe_set.bound()
        )
    }
}

/// Parses `text` against the state names; see [`SafetySpec::parse`].
pub fn parse_spec(text: &str, names: &[String]) -> Result<SafetySpec, ParseError> {
    SafetySpec::parse(text, names)
}
