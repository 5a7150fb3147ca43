//! Multiresolution representations for piecewise-smooth signals on graphs.
//!
//! The pipeline: recursively bisect a connected weighted graph into a binary
//! partition tree ([`multires::decompose`]), derive a Haar-like orthonormal
//! wavelet basis ([`multires::wavelet_basis`]) and two redundant dictionaries
//! ([`dictionary::build_pc_dict`], [`dictionary::build_ps_dict`]), then use
//! them for sparse approximation, denoising and localization of graph
//! signals ([`approx`]).
//!
//! All randomness flows through explicitly seeded generators; every
//! operation is a pure function of its inputs, so repeated runs are
//! bit-identical.

pub mod approx;
pub mod dictionary;
pub mod graph;
pub mod io;
pub mod multires;
pub mod partition;
pub mod signals;
pub mod sparse;
pub mod spectral;

use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(usize),

    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeOutOfRange { index: usize, n: usize },

    #[error("duplicate edge ({j}, {k}) with conflicting weights {w1} and {w2}")]
    ConflictingDuplicateEdge { j: usize, k: usize, w1: f64, w2: f64 },

    #[error("edge ({j}, {k}) has nonpositive weight {w}")]
    NonpositiveWeight { j: usize, k: usize, w: f64 },

    #[error("graph is disconnected: {0}")]
    Disconnected(String),

    #[error("subset induces a disconnected subgraph")]
    DisconnectedPiece,

    #[error("piece must be nonempty")]
    EmptyPiece,

    #[error("pieces overlap on node {0}")]
    OverlappingPieces(usize),

    #[error("node sets do not form a partition of the vertex set: {0}")]
    NotAPartition(String),

    #[error("matrix is not symmetric at ({i}, {j}): {a} vs {b}")]
    NotSymmetric { i: usize, j: usize, a: f64, b: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("signal has zero norm")]
    ZeroSignal,

    #[error("budget {m} out of range [1, {max}]")]
    BudgetOutOfRange { m: usize, max: usize },

    #[error("graph too small: need at least {need} nodes, have {have}")]
    GraphTooSmall { need: usize, have: usize },

    #[error("piece of size {size} too small for bandwidth {k}: eigenvalue {idx} does not exist")]
    PieceTooSmallForBandwidth { size: usize, k: usize, idx: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("could not generate a connected graph after {0} attempts")]
    UnconnectableGraph(usize),

    #[error("eigensolver did not converge within {sweeps} sweeps (off-diagonal {off:e})")]
    EigNonConvergence { sweeps: usize, off: f64 },

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse error class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad input: rejected preconditions, malformed files, invalid flags.
    InvalidInput,
    /// Numerical failure (eigensolver non-convergence).
    Numerical,
    /// An internal invariant did not hold.
    Invariant,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::EigNonConvergence { .. } => ErrorClass::Numerical,
            Error::InvariantViolation(_) => ErrorClass::Invariant,
            _ => ErrorClass::InvalidInput,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
