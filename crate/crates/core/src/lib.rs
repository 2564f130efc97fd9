//! Orthonormal polynomials of ergodic Jacobi matrices.
//!
//! The crate evaluates orthonormal polynomials, Christoffel–Darboux kernels,
//! transfer matrices and zeros for finite prefixes of Jacobi parameters, and
//! builds m-functions, Deift–Simon waves and density-of-states estimates for
//! ergodic families such as the almost Mathieu operator.

// `!(x > 0.0)` style guards are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod bounds;
pub mod dos;
pub mod error;
pub mod harness;
pub mod jacobi;
pub mod kernel;
pub mod models;
pub mod transfer;
pub mod zeros;

pub use error::{Error, Result};
pub use jacobi::{evaluate_polys, JacobiParams, PolySequence};
pub use models::{realize, ErgodicModel, ModelKind};
pub use transfer::{transfer_matrix, transfer_norm_cesaro, Mat2, TransferMatrix};
