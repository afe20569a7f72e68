//! Extremal Lipschitz extensions and wide-stencil schemes for the infinity
//! Laplacian on discretized domains.
//!
//! Given Lipschitz boundary data `F` on the boundary nodes of a grid domain,
//! this crate evaluates the McShane and Whitney extensions (the largest and
//! smallest extensions with a prescribed Lipschitz constant), solves the
//! associated gradient-constrained equations and the infinity-Laplace
//! equation with monotone epsilon-ball schemes, and numerically certifies
//! the structural facts that connect them: the sandwich inequality, the
//! boundary-attainment threshold, one-sided residual bounds for arbitrary
//! extensions, and scheme monotonicity/consistency.
//!
//! The main entry points are:
//!
//! - [`grid::build_domain`] / [`grid::GridDomain`] for domains and stencils,
//! - [`extension::mcshane_extension`] / [`extension::whitney_extension`],
//! - [`scheme::solve`] for the fixed-point solvers,
//! - [`verify`] for the certification checks.
//!
//! A narrative guide with runnable examples lives in the `book/` directory of
//! the repository and is mirrored under [`guide`] so its code stays compiled
//! and tested.

pub mod extension;
pub mod grid;
pub mod guide;
pub mod io;
pub mod scheme;
pub mod verify;

use thiserror::Error as ThisError;

/// Errors reported by domain construction, configuration, and file parsing.
#[derive(Debug, ThisError)]
pub enum Error {
    #[error("domain needs at least 3 nodes per axis, got {0}")]
    TooFewNodes(usize),
    #[error("domain has no interior nodes")]
    EmptyInterior,
    #[error("domain has no boundary nodes")]
    EmptyBoundary,
    #[error("mask parse error at line {line}, column {col}: {msg}")]
    MaskParse { line: usize, col: usize, msg: String },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("ball stencil radius {eps} is below the grid spacing {h}")]
    StencilTooSmall { eps: f64, h: f64 },
    #[error("node {0} has an empty clipped neighborhood")]
    EmptyNeighborhood(usize),
    #[error("fields live on different domains")]
    DomainMismatch,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
