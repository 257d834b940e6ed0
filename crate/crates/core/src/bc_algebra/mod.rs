//! Point-interaction configurations and the algebra of their boundary
//! conditions `A φ^r = B φ^s`: validation, the boundary symplectic form,
//! Lagrangian planes, and the local/nonlocal classification.

mod boundary;
mod classify;
mod config;
mod validate;

pub use boundary::{boundary_kernel_basis, boundary_symplectic_form, initial_charges, BoundaryVector};
pub use classify::{classify_locality, DiagonalForm, ExtensionClass, Verdict, PARALLEL_TOLERANCE};
pub use config::{green_function, InteractionConfig};
pub use validate::{validate_pair, CheckKind, CheckResult, ValidationReport, RANK_TOLERANCE};
