use crate::lattice::LatMat;
use thiserror::Error;

/// Errors surfaced by the numerical kernels.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A lattice sum hit a term with R(z,M) below the on-cycle tolerance;
    /// the evaluation point lies (numerically) on the special cycle T(det M).
    #[error("point lies on the cycle of {matrix:?} (R = {r:.3e})")]
    OnCycle { matrix: LatMat, r: f64 },

    /// The requested tail bound could not be met within the resource cap.
    #[error("truncation failure: best tail bound {best_bound:.3e} > requested {requested:.3e}")]
    Truncation { best_bound: f64, requested: f64 },

    /// A finite-difference stencil sampled a non-finite value.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// The scalar boundary check was requested too close to the cone wall
    /// |b/s| = |cs|, where the piecewise I-profile switches branch.
    #[error("cone wall proximity: |b/s| - |cs| = {gap:.3e}")]
    ConeWall { gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
