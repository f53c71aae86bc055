use thiserror::Error;

use crate::Vertex;

/// Errors produced by the graph, chain and verification layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degree sequence is not graphical: {0}")]
    NonGraphical(String),

    #[error("invalid degree sequence: {0}")]
    InvalidDegrees(String),

    #[error("invalid switch ({a1}, {a2}, {a3}, {a4}): {reason}")]
    InvalidSwitch {
        a1: Vertex,
        a2: Vertex,
        a3: Vertex,
        a4: Vertex,
        reason: &'static str,
    },

    #[error("graph has no pair of vertex-disjoint edges")]
    NoValidPair,

    #[error("minimum degree {0} is below 3")]
    MinDegreeTooSmall(usize),

    #[error("triangle planting precondition failed: {0}")]
    PlantPrecondition(String),

    #[error("cannot plant a triangle on the forced neighbour (5-cycle without 4-cycle)")]
    PlantImpossible,

    #[error("no simulation-path case applies: {0}")]
    InternalContradiction(String),

    #[error("state space exceeds the limit of {limit} states")]
    SpaceTooLarge { limit: usize },

    #[error("transition matrix is not irreducible")]
    NotIrreducible,

    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("transition matrix has not been built")]
    MatrixMissing,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
