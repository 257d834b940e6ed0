use std::fmt;

use num_complex::Complex64;

use super::InteractionConfig;
use crate::linalg::{condition_number, hstack, singular_values, CMatrix, CONDITION_LIMIT};

/// Relative floor for the smallest singular value of `(A, B)`.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// `A B* = B A*`
    Symmetry,
    /// `rank (A, B) = n`
    Rank,
}

impl CheckKind {
    pub fn code(self) -> &'static str {
        match self {
            CheckKind::Symmetry => "symmetry",
            CheckKind::Rank => "rank",
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct CheckResult {
    pub kind: CheckKind,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
    /// `det(A A* + B B*)`, real and non-negative.
    pub gram_determinant: f64,
    /// `|det(iA + B)|²`, equal to `gram_determinant` whenever the symmetry check holds.
    pub pencil_determinant_sq: f64,
    pub a_condition: f64,
    pub a_invertible: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for check in &self.checks {
            writeln!(
                f,
                "{:<10} {}  residual={:.6e} threshold={:.6e}  {}",
                check.kind.code(),
                if check.passed { "PASS" } else { "FAIL" },
                check.residual,
                check.threshold,
                check.message
            )?;
        }
        writeln!(f, "det(AA*+BB*)   = {:.12e}", self.gram_determinant)?;
        writeln!(f, "|det(iA+B)|^2  = {:.12e}", self.pencil_determinant_sq)?;
        writeln!(
            f,
            "A invertible   = {} (condition number {:.6e})",
            self.a_invertible, self.a_condition
        )?;
        write!(f, "valid          = {}", self.is_valid())
    }
}

fn determinant(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        Complex64::new(1.0, 0.0)
    } else {
        m.clone().determinant()
    }
}

/// Checks the symmetry and maximal-rank conditions on `(A, B)` and records
/// whether `A` is invertible. Failures are report entries, not errors.
pub fn validate_pair(config: &InteractionConfig) -> ValidationReport {
    let a = config.a();
    let b = config.b();

    let sym_residual = (a * b.adjoint() - b * a.adjoint()).norm();
    let sym_threshold = 1e-10 * (1.0 + a.norm() * b.norm());
    let symmetry = CheckResult {
        kind: CheckKind::Symmetry,
        passed: sym_residual <= sym_threshold,
        residual: sym_residual,
        threshold: sym_threshold,
        message: "||AB* - BA*||_F".to_string(),
    };

    let sv = singular_values(&hstack(a, b));
    let rank_ratio = match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        (Some(_), Some(_)) => 0.0,
        _ => 1.0,
    };
    let rank = CheckResult {
        kind: CheckKind::Rank,
        passed: rank_ratio > RANK_TOLERANCE,
        residual: rank_ratio,
        threshold: RANK_TOLERANCE,
        message: "sigma_min / sigma_max of (A, B)".to_string(),
    };

    let gram = a * a.adjoint() + b * b.adjoint();
    let gram_determinant = determinant(&gram).re;
    let i = Complex64::new(0.0, 1.0);
    let pencil_determinant_sq = determinant(&(a * i + b)).norm_sqr();

    let a_condition = condition_number(a);
    ValidationReport {
        checks: vec![symmetry, rank],
        gram_determinant,
        pencil_determinant_sq,
        a_condition,
        a_invertible: a_condition < CONDITION_LIMIT,
    }
}
