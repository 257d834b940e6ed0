use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::linalg::{CMatrix, Vec3};
use crate::{Error, Result};

/// Green function of `-Δ` in three dimensions, `1 / (4π|x|)`.
pub fn green_function(x: &Vec3) -> Result<f64> {
    let r = x.norm();
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(1.0 / (4.0 * PI * r))
}

/// Interaction points together with the boundary-condition pair `(A, B)` and
/// the derived Green and distance matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionConfig {
    points: Vec<Vec3>,
    a: CMatrix,
    b: CMatrix,
    green: DMatrix<f64>,
    distance: DMatrix<f64>,
}

impl InteractionConfig {
    pub fn new(points: Vec<Vec3>, a: CMatrix, b: CMatrix) -> Result<Self> {
        let n = points.len();
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{} but there are {n} points",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let mut green = DMatrix::zeros(n, n);
        let mut distance = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in (i + 1)..n {
                let diff = points[i] - points[j];
                let g = green_function(&diff)
                    .map_err(|_| Error::DuplicatePoint { first: i, second: j })?;
                let d = diff.norm();
                green[(i, j)] = g;
                green[(j, i)] = g;
                distance[(i, j)] = d;
                distance[(j, i)] = d;
            }
        }
        Ok(Self {
            points,
            a,
            b,
            green,
            distance,
        })
    }

    /// Local boundary conditions `φ^r = H φ^s`, i.e. the pair `(I, H)`.
    pub fn with_hermitian(points: Vec<Vec3>, h: CMatrix) -> Result<Self> {
        let n = points.len();
        Self::new(points, CMatrix::identity(n, n), h)
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn a(&self) -> &CMatrix {
        &self.a
    }

    pub fn b(&self) -> &CMatrix {
        &self.b
    }

    pub fn green_matrix(&self) -> &DMatrix<f64> {
        &self.green
    }

    pub fn distance_matrix(&self) -> &DMatrix<f64> {
        &self.distance
    }

    /// Smallest pairwise distance, `None` for fewer than two points.
    pub fn min_delay(&self) -> Option<f64> {
        let n = self.n();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| self.distance[(i, j)])
            .min_by(f64::total_cmp)
    }

    /// The same points with the pair `(M A, M B)`.
    pub fn left_multiplied(&self, m: &CMatrix) -> Result<Self> {
        if m.nrows() != self.n() || m.ncols() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "transform is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols(),
                n = self.n()
            )));
        }
        Ok(Self {
            points: self.points.clone(),
            a: m * &self.a,
            b: m * &self.b,
            green: self.green.clone(),
            distance: self.distance.clone(),
        })
    }
}
