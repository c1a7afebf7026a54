//! Desk-scale numerics for lattice-sum Green functions on the product of
//! two modular curves.
//!
//! The crate evaluates, with certified truncation, the Green function
//!
//!   Xi(v,z,m) = (1/2) sum_{det M = m} -Ei(-2 pi v R(z,M)),   z in H^2,
//!
//! its boundary expansions and partition-of-unity modifications, the
//! Kudla-Millson (1,1)-form attached to the signature (2,2) quadratic
//! space M_2(R), a family of theta series with numerically verifiable
//! functional equations, Hurwitz class-number identities, and the
//! archimedean height values whose generating series reproduces Hecke's
//! non-holomorphic Eisenstein series of weight 2.
//!
//! Modules
//!
//! - [`special`]: -Ei(-t), erf/erfc/erfcx and the B, beta kernels.
//! - [`lattice`]: the quadratic space, majorant kernel R(z,M), lattice
//!   enumeration and Hecke representatives.
//! - [`green`]: Xi(v,z,m), Fourier and boundary analysis, the modified
//!   Green functions and the zero term.
//! - [`forms`]: (1,1)-forms, the Schwartz form, numerical dd^c and the
//!   restriction identities.
//! - [`qseries`]: Delta, j, E_2, Hurwitz class numbers, theta series and
//!   the corrected Poisson summation.
//! - [`heights`]: archimedean heights and their generating series.
//!
//! All evaluations are pure and deterministic; internal parallelism
//! reduces in canonical term order, so results do not depend on the
//! number of worker threads.

pub mod error;
pub mod forms;
pub mod green;
pub mod heights;
pub mod lattice;
pub mod qseries;
pub mod special;
pub mod sum;

pub use error::{Error, Result};
pub use lattice::{LatMat, PointH2};
