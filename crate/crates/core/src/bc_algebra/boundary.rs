use num_complex::Complex64;

use super::{validate_pair, InteractionConfig};
use crate::linalg::{hstack, null_space, solve, CMatrix, CVector};
use crate::{Error, Result};

/// Regular and singular boundary values `(φ^r, φ^s)` at the interaction points.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryVector {
    pub regular: CVector,
    pub singular: CVector,
}

impl BoundaryVector {
    pub fn new(regular: CVector, singular: CVector) -> Result<Self> {
        if regular.len() != singular.len() {
            return Err(Error::DimensionMismatch(format!(
                "regular part has {} entries, singular part {}",
                regular.len(),
                singular.len()
            )));
        }
        Ok(Self { regular, singular })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            regular: CVector::zeros(n),
            singular: CVector::zeros(n),
        }
    }

    pub fn dim(&self) -> usize {
        self.regular.len()
    }

    /// `A φ^r - B φ^s`
    pub fn condition_residual(&self, a: &CMatrix, b: &CMatrix) -> CVector {
        a * &self.regular - b * &self.singular
    }
}

/// `⟨(u^r, u^s), J (v^r, v^s)⟩` with `J = [[0, I], [-I, 0]]` and the inner
/// product antilinear in its first slot, i.e. `Σ conj(u^r_j) v^s_j - conj(u^s_j) v^r_j`.
pub fn boundary_symplectic_form(u: &BoundaryVector, v: &BoundaryVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "boundary vectors of dimension {} and {}",
            u.dim(),
            v.dim()
        )));
    }
    Ok(u.regular.dotc(&v.singular) - u.singular.dotc(&v.regular))
}

/// Orthonormal basis of the plane `{(φ^r, φ^s) : A φ^r = B φ^s}`.
pub fn boundary_kernel_basis(config: &InteractionConfig) -> Result<Vec<BoundaryVector>> {
    let report = validate_pair(config);
    if let Some(check) = report.first_failure() {
        return Err(Error::InvalidPair(format!(
            "{} check failed (residual {:.3e})",
            check.kind.code(),
            check.residual
        )));
    }
    let n = config.n();
    let constraint = hstack(config.a(), &(-config.b()));
    Ok(null_space(&constraint, n)
        .into_iter()
        .map(|x| BoundaryVector {
            regular: x.rows(0, n).into_owned(),
            singular: x.rows(n, n).into_owned(),
        })
        .collect())
}

/// Charges `ζ` solving `(B - A G) ζ = A φ₀(Y)`.
pub fn initial_charges(config: &InteractionConfig, phi0_at_points: &[Complex64]) -> Result<CVector> {
    let n = config.n();
    if phi0_at_points.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} regular values for {n} points",
            phi0_at_points.len()
        )));
    }
    let g = crate::linalg::from_real(config.green_matrix());
    let lhs = config.b() - config.a() * g;
    let rhs = config.a() * CMatrix::from_column_slice(n, 1, phi0_at_points);
    let zeta = solve(&lhs, &rhs, "B - AG")?;
    Ok(zeta.column(0).into_owned())
}
