//! Wave equation with finitely many point interactions.
//!
//! * [`bc_algebra`] builds interaction configurations and classifies their
//!   boundary conditions as local or nonlocal.
//! * [`free_wave`] evaluates the free wave from compactly supported bump data.
//! * [`charge_dynamics`] integrates the retarded charge equations.
//! * [`wavefield`] assembles the full field and runs propagation experiments.
//! * [`scenario`] and [`commands`] provide the file format and CLI plumbing.

// negated comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bc_algebra;
pub mod charge_dynamics;
pub mod commands;
mod error;
pub mod free_wave;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod scenario;
pub mod wavefield;

pub use error::{Error, Result};
