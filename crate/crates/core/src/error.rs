use thiserror::Error;

use crate::formulas::TheoryId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("{solver} solver cannot decide atom {atom}")]
    Contract { solver: &'static str, atom: String },

    #[error("unresolved relation `{0}`")]
    UnresolvedRelation(String),

    #[error("relation `{name}` has arity {expected}, atom has {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("{what}: {found} exceeds the bound of {bound}")]
    BoundExceeded {
        what: &'static str,
        found: usize,
        bound: usize,
    },

    #[error("theory `{0}` is not declared convex; use the complete mode")]
    ConvexityNotDeclared(TheoryId),

    #[error("theory `{0}` is declared convex but behaved non-convexly on this instance")]
    ConvexityRefuted(TheoryId),

    #[error("unknown theory `{0}`")]
    UnknownTheory(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("witness check failed: {0}")]
    Witness(String),
}

pub type Result<T, E = SolveError> = std::result::Result<T, E>;
