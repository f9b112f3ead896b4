//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("symmetric matrix has a near-zero eigenvalue ({0:.3e})")]
    DegenerateHessian(f64),
    #[error("closed-form index formula inapplicable: eigenvalue {0:.6} has modulus >= 2*pi")]
    FormulaInapplicable(f64),
    #[error("path endpoint is degenerate: |det(Psi(1) - I)| = {0:.3e}")]
    DegeneratePath(f64),
    #[error("sampling too coarse to resolve: {0}")]
    ResolutionTooCoarse(String),
    #[error("samples do not close up into a loop (gap {0:.3e})")]
    NotALoop(f64),
    #[error("no integer fits the index window [{0}, {1}]")]
    EmptyWindow(i64, i64),
    #[error("point outside the injectivity radius (dist {dist:.6}, inj {inj:.6})")]
    OutsideInjectivity { dist: f64, inj: f64 },
    #[error("loop diameter {diam:.6} exceeds the allowed bound {bound:.6}")]
    DiameterExceedsInjectivity { diam: f64, bound: f64 },
    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),
    #[error("flow integration failed: {0}")]
    IntegrationFailure(String),
    #[error("point is not a fixed critical point of the Hamiltonian")]
    NotACriticalPoint,
    #[error("no epsilon on the grid yields an admissible comparison Hamiltonian")]
    NoAdmissibleEpsilon,
    #[error("Hamiltonian is unbounded on this model; extrema undefined")]
    Unbounded,
    #[error("reparameterization margin {0} outside (0, 1/4)")]
    InvalidMargin(f64),
    #[error("experiment precondition could not be certified: {0}")]
    PreconditionUnverified(String),
    #[error("Hamiltonian has a single critical value; no energy gap")]
    NoGap,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
