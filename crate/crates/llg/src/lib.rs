//! Structure-preserving finite-difference solvers for Landau-Lifshitz
//! magnetization dynamics on uniform grids with homogeneous Neumann walls,
//! plus the verification harness that reproduces the accompanying
//! convergence, norm-preservation and stability studies.
//!
//! The crate is organized around a small set of modules:
//!
//! - [`grid`]: cell-centered grids, fields, the Neumann Laplacian and the
//!   discrete error norms;
//! - [`helmholtz`]: fast `(I - c lap)^{-1}` solves by cosine-transform
//!   diagonalization, with a conjugate-gradient cross-check;
//! - [`cayley`]: the pointwise norm-preserving rotation update;
//! - [`schemes`]: the time steppers (Gauss-Seidel projection baseline,
//!   explicit and smoothed rotation schemes) and the evolution loop;
//! - [`manufactured`]: closed-form reference solutions, forcing terms and
//!   the initial-condition catalog;
//! - [`harness`]: convergence ladders, norm tests, method comparisons and
//!   order fits;
//! - [`io`]: JSON run configs, CSV tables, VTK snapshots;
//! - [`reference`]: slow dense implementations used as validation oracles.

pub mod cayley;
mod dct;
pub mod error;
pub mod grid;
pub mod harness;
pub mod helmholtz;
pub mod io;
pub mod manufactured;
pub mod reference;
pub mod schemes;
pub mod source;

pub use error::{Error, Result};
pub use grid::{error_norms, gradient_sq_sum, laplacian, norm_drift, ErrorNorms, Grid, ScalarField, VectorField};
pub use schemes::{evolve, RunReport, Scheme, SchemeConfig, Stepper};
pub use source::SourceTerm;
