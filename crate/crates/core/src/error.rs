use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures reported by graph construction and the numerical routines.
///
/// Validation failures (`NonPositiveWeight` through `EmptyGraph`) are
/// distinguished from numerical ones so the command line front end can map
/// them to different exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-positive weight: {what} = {value}")]
    NonPositiveWeight { what: String, value: f64 },
    #[error("non-finite value: {what} = {value}")]
    NonFinite { what: String, value: f64 },
    #[error("duplicate edge {{{u}, {v}}}")]
    DuplicateEdge { u: VertexId, v: VertexId },
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("graph is disconnected: vertex {unreachable} is not reachable from {root}")]
    Disconnected { root: VertexId, unreachable: VertexId },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("[{0}, {1}] is not an edge of the graph")]
    NotAnEdge(VertexId, VertexId),
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("no holonomy target for the basis cycle through [{0}, {1}]")]
    MissingTarget(VertexId, VertexId),
    #[error("subgraph {index} is not connected")]
    DisconnectedSubgraph { index: usize },
    #[error("invalid subgraph {index}: {reason}")]
    InvalidSubgraph { index: usize, reason: String },
    #[error("invalid covering: {0}")]
    InvalidCovering(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("vector is not a solution: residual {residual:e} exceeds {tolerance:e}")]
    NotASolution { residual: f64, tolerance: f64 },
    #[error("family generator failed at radius {radius}: {reason}")]
    GeneratorFailure { radius: usize, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// True for errors caused by malformed input data rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveWeight { .. }
                | Error::NonFinite { .. }
                | Error::DuplicateEdge { .. }
                | Error::DuplicateVertex(_)
                | Error::SelfLoop(_)
                | Error::Disconnected { .. }
                | Error::EmptyGraph
                | Error::UnknownVertex(_)
                | Error::NotAnEdge(..)
                | Error::InvalidCycle(_)
                | Error::InvalidTree(_)
                | Error::MissingTarget(..)
                | Error::DisconnectedSubgraph { .. }
                | Error::InvalidSubgraph { .. }
                | Error::InvalidCovering(_)
        )
    }
}
