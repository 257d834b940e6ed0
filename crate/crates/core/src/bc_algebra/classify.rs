use std::fmt;

use num_complex::Complex64;

use super::{validate_pair, CheckKind, InteractionConfig};
use crate::linalg::{condition_number, singular_values, solve, CMatrix, CONDITION_LIMIT};

/// Relative floor for the second singular value of a column pair `[a_k b_k]`.
pub const PARALLEL_TOLERANCE: f64 = 1e-10;

/// Simultaneous diagonal form `M A = diag(diag_a)`, `M B = diag(diag_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalForm {
    pub transform: CMatrix,
    pub diag_a: Vec<Complex64>,
    pub diag_b: Vec<Complex64>,
}

impl DiagonalForm {
    /// Per-point coupling `h_k` of `φ^r_k = h_k φ^s_k`; `None` where the
    /// condition degenerates to `φ^s_k = 0`.
    pub fn local_parameters(&self) -> Vec<Option<f64>> {
        self.diag_a
            .iter()
            .zip(&self.diag_b)
            .map(|(a, b)| {
                if a.norm() <= PARALLEL_TOLERANCE * b.norm() {
                    None
                } else {
                    Some((b / a).re)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Invalid { code: CheckKind, message: String },
    Local(DiagonalForm),
    NonLocal,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Invalid { .. } => "Invalid",
            Verdict::Local(_) => "Local",
            Verdict::NonLocal => "NonLocal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionClass {
    pub verdict: Verdict,
    pub a_invertible: bool,
    /// `A⁻¹ B`, present when `A` is invertible.
    pub hermitian_h: Option<CMatrix>,
}

impl ExtensionClass {
    pub fn is_local(&self) -> bool {
        matches!(self.verdict, Verdict::Local(_))
    }
}

/// Decides whether the boundary conditions decouple across points.
///
/// The pair is local exactly when, for every `k`, the `k`-th columns of `A`
/// and `B` span a one-dimensional space; the representatives `v_k` then form
/// an invertible matrix `V` and `M = V⁻¹` diagonalises both `A` and `B`.
pub fn classify_locality(config: &InteractionConfig) -> ExtensionClass {
    let report = validate_pair(config);
    let hermitian_h = if report.a_invertible {
        solve(config.a(), config.b(), "A").ok()
    } else {
        None
    };
    let verdict = match report.first_failure() {
        Some(check) => Verdict::Invalid {
            code: check.kind,
            message: format!(
                "{} check failed: {} = {:.3e} (threshold {:.3e})",
                check.kind.code(),
                check.message,
                check.residual,
                check.threshold
            ),
        },
        None => match diagonal_form(config.a(), config.b()) {
            Some(form) => Verdict::Local(form),
            None => Verdict::NonLocal,
        },
    };
    ExtensionClass {
        verdict,
        a_invertible: report.a_invertible,
        hermitian_h,
    }
}

fn diagonal_form(a: &CMatrix, b: &CMatrix) -> Option<DiagonalForm> {
    let n = a.nrows();
    let mut reps = CMatrix::zeros(n, n);
    for k in 0..n {
        let ak = a.column(k).into_owned();
        let bk = b.column(k).into_owned();
        let sv = singular_values(&CMatrix::from_columns(&[ak.clone(), bk.clone()]));
        // a 1x2 pair has a single singular value and is always rank one
        let second = sv.get(1).copied().unwrap_or(0.0);
        if sv[0] == 0.0 || second > PARALLEL_TOLERANCE * sv[0] {
            return None;
        }
        let rep = if ak.norm() >= bk.norm() { ak } else { bk };
        reps.set_column(k, &rep);
    }
    if !(condition_number(&reps) < CONDITION_LIMIT) {
        return None;
    }
    let transform = reps.try_inverse()?;
    let ma = &transform * a;
    let mb = &transform * b;
    Some(DiagonalForm {
        diag_a: ma.diagonal().iter().copied().collect(),
        diag_b: mb.diagonal().iter().copied().collect(),
        transform,
    })
}

impl fmt::Display for ExtensionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", self.verdict.label())?;
        match &self.verdict {
            Verdict::Invalid { code, message } => writeln!(f, "reason: {} ({message})", code.code())?,
            Verdict::Local(form) => {
                writeln!(f, "diag_A: {}", join(&form.diag_a))?;
                writeln!(f, "diag_B: {}", join(&form.diag_b))?;
                let params: Vec<String> = form
                    .local_parameters()
                    .iter()
                    .map(|p| match p {
                        Some(h) => format!("{h:.12e}"),
                        None => "inf".to_string(),
                    })
                    .collect();
                writeln!(f, "local parameters h_k: {}", params.join(", "))?;
                writeln!(f, "transform M:")?;
                write_matrix(f, &form.transform)?;
            }
            Verdict::NonLocal => {}
        }
        writeln!(f, "A invertible: {}", self.a_invertible)?;
        if let Some(h) = &self.hermitian_h {
            writeln!(f, "H = A^-1 B:")?;
            write_matrix(f, h)?;
        }
        Ok(())
    }
}

fn fmt_complex(z: &Complex64) -> String {
    format!("[{:.12e}, {:.12e}]", z.re, z.im)
}

fn join(values: &[Complex64]) -> String {
    values.iter().map(fmt_complex).collect::<Vec<_>>().join(", ")
}

fn write_matrix(f: &mut fmt::Formatter<'_>, m: &CMatrix) -> fmt::Result {
    for row in m.row_iter() {
        let entries: Vec<String> = row.iter().map(fmt_complex).collect();
        writeln!(f, "  {}", entries.join(", "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, Vec3};

    fn two_points() -> Vec<Vec3> {
        vec![Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0)]
    }

    fn real(rows: usize, data: &[f64]) -> CMatrix {
        CMatrix::from_row_slice(rows, data.len() / rows, &data.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn diagonal_h_is_local() {
        let cfg = InteractionConfig::with_hermitian(two_points(), real(2, &[2.0, 0.0, 0.0, -3.0])).unwrap();
        let class = classify_locality(&cfg);
        assert!(class.is_local());
        let h = class.hermitian_h.unwrap();
        assert!((h - real(2, &[2.0, 0.0, 0.0, -3.0])).norm() < 1e-14);
        if let Verdict::Local(form) = class.verdict {
            assert_eq!(form.local_parameters(), vec![Some(2.0), Some(-3.0)]);
        }
    }

    #[test]
    fn single_point_is_local() {
        let cfg = InteractionConfig::with_hermitian(vec![Vec3::zeros()], real(1, &[2.0])).unwrap();
        let Verdict::Local(form) = classify_locality(&cfg).verdict else {
            panic!("expected local");
        };
        assert_eq!(form.local_parameters(), vec![Some(2.0)]);
    }

    #[test]
    fn off_diagonal_h_is_nonlocal() {
        let cfg = InteractionConfig::with_hermitian(two_points(), real(2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(classify_locality(&cfg).verdict, Verdict::NonLocal);
    }

    #[test]
    fn disguised_diagonal_pair_is_local() {
        let a = real(2, &[1.0, 1.0, 1.0, -1.0]);
        let b = real(2, &[2.0, 3.0, 2.0, -3.0]);
        // AB* = BA* = [[5,-1],[-1,5]]
        assert!((&a * b.adjoint() - real(2, &[5.0, -1.0, -1.0, 5.0])).norm() < 1e-15);
        let cfg = InteractionConfig::new(two_points(), a.clone(), b.clone()).unwrap();
        let class = classify_locality(&cfg);
        let Verdict::Local(form) = &class.verdict else {
            panic!("expected Local, got {:?}", class.verdict);
        };
        let ma = &form.transform * &a;
        let mb = &form.transform * &b;
        for (i, j) in [(0, 1), (1, 0)] {
            assert!(ma[(i, j)].norm() < 1e-14);
            assert!(mb[(i, j)].norm() < 1e-14);
        }
        let params = form.local_parameters();
        assert!((params[0].unwrap() - 2.0).abs() < 1e-13);
        assert!((params[1].unwrap() - 3.0).abs() < 1e-13);
        let h = class.hermitian_h.unwrap();
        assert!((h - real(2, &[2.0, 0.0, 0.0, 3.0])).norm() < 1e-14);
    }

    #[test]
    fn dirichlet_like_column_is_local() {
        // A = diag(1, 0), B = diag(0, 1): second point has φ^s = 0.
        let cfg = InteractionConfig::new(two_points(), real(2, &[1.0, 0.0, 0.0, 0.0]), real(2, &[0.0, 0.0, 0.0, 1.0]))
            .unwrap();
        let class = classify_locality(&cfg);
        assert!(!class.a_invertible);
        assert!(class.hermitian_h.is_none());
        let Verdict::Local(form) = class.verdict else { panic!() };
        assert_eq!(form.local_parameters(), vec![Some(0.0), None]);
    }

    #[test]
    fn invalid_pair_reports_first_failure() {
        let cfg = InteractionConfig::new(
            vec![Vec3::zeros()],
            CMatrix::from_element(1, 1, c(1.0, 0.0)),
            CMatrix::from_element(1, 1, c(0.0, 1.0)),
        )
        .unwrap();
        let class = classify_locality(&cfg);
        assert!(matches!(class.verdict, Verdict::Invalid { code: CheckKind::Symmetry, .. }));
    }

    #[test]
    fn empty_config_is_local() {
        let cfg = InteractionConfig::new(vec![], CMatrix::zeros(0, 0), CMatrix::zeros(0, 0)).unwrap();
        assert!(classify_locality(&cfg).is_local());
    }
}
