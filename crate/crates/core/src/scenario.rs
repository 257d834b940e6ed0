//! Scenario files: TOML text describing points, boundary conditions, bump data,
//! and run parameters.
//!
//! ```toml
//! name = "local-two-point"
//! points = [[0, 0, 0], [10, 0, 0]]
//! horizon = 15.0
//! step = 0.01                      # optional
//! direction = "forward"            # or "backward"
//! snapshot_times = "auto"          # or [0.0, 3.0, ...]
//!
//! [matrices]
//! h = [[1, 0], [0, 1]]             # shorthand for A = I, B = H
//! # a = [[...]]  b = [[...]]       # general pair; entries are reals or [re, im]
//!
//! [[initial.position]]
//! center = [-2, 0, 0]
//! radius = 0.5
//! amplitude = 1.0                  # real or [re, im]
//!
//! [grid]                           # all optional
//! spacing = 0.25
//! shell_radii = [0.2, 0.4, 0.6, 0.8, 1.0]
//! exclusion_radius = 0.1
//! box = [[-3, -3, -3], [3, 3, 3]]
//!
//! [thresholds]
//! activation = "auto"
//! support = "auto"
//!
//! [quadrature]
//! polar = 24
//! azimuth = 48
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bc_algebra::InteractionConfig;
use crate::charge_dynamics::default_step;
use crate::free_wave::{BumpProfile, InitialData, QuadratureOrders};
use crate::linalg::{CMatrix, Vec3};
use crate::wavefield::{ExperimentSpec, GridSpec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario field `{path}`: {message}")]
    Semantic { path: String, message: String },
}

fn semantic(path: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Semantic {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    Forward,
    Backward,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSpec {
    /// `A = I`, `B = H`.
    Hermitian(CMatrix),
    Pair { a: CMatrix, b: CMatrix },
}

/// A parsed scenario with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub matrices: MatrixSpec,
    pub config: InteractionConfig,
    pub initial: InitialData,
    pub horizon: f64,
    pub step: f64,
    pub direction: Direction,
    pub grid: GridSpec,
    pub snapshot_times: Option<Vec<f64>>,
    pub activation_threshold: Option<f64>,
    pub support_threshold: Option<f64>,
    pub quadrature: QuadratureOrders,
}

impl Scenario {
    /// Data actually propagated forward in time: the backward direction is
    /// reduced to a forward run with reflected velocity.
    pub fn propagated_data(&self) -> InitialData {
        match self.direction {
            Direction::Forward => self.initial.clone(),
            Direction::Backward => self.initial.time_reversed(),
        }
    }

    /// `+1` or `-1`, applied to reported times.
    pub fn time_sign(&self) -> f64 {
        match self.direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }

    pub fn experiment(&self, workers: usize) -> ExperimentSpec {
        ExperimentSpec {
            name: self.name.clone(),
            config: self.config.clone(),
            data: self.propagated_data(),
            horizon: self.horizon,
            step: Some(self.step),
            grid: self.grid.clone(),
            snapshot_times: self.snapshot_times.clone(),
            activation_threshold: self.activation_threshold,
            support_threshold: self.support_threshold,
            quadrature: self.quadrature,
            workers,
            time_sign: self.time_sign(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawEntry {
    Real(f64),
    Complex([f64; 2]),
}

impl RawEntry {
    fn value(self) -> Complex64 {
        match self {
            RawEntry::Real(re) => Complex64::new(re, 0.0),
            RawEntry::Complex([re, im]) => Complex64::new(re, im),
        }
    }

    fn from_value(z: Complex64) -> Self {
        RawEntry::Complex([z.re, z.im])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawMatrix {
    Scalar(RawEntry),
    Full(Vec<Vec<RawEntry>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum AutoOr<T> {
    Auto(AutoKeyword),
    Value(T),
}

impl<T> AutoOr<T> {
    fn into_option(self) -> Option<T> {
        match self {
            AutoOr::Auto(_) => None,
            AutoOr::Value(v) => Some(v),
        }
    }

    fn from_option(v: Option<T>) -> Self {
        v.map_or(AutoOr::Auto(AutoKeyword::Auto), AutoOr::Value)
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: Option<String>,
    points: Option<Vec<[f64; 3]>>,
    horizon: Option<f64>,
    step: Option<f64>,
    direction: Option<Direction>,
    snapshot_times: Option<AutoOr<Vec<f64>>>,
    matrices: Option<RawMatrices>,
    initial: Option<RawInitial>,
    grid: Option<RawGrid>,
    thresholds: Option<RawThresholds>,
    quadrature: Option<RawQuadrature>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrices {
    h: Option<RawMatrix>,
    a: Option<RawMatrix>,
    b: Option<RawMatrix>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    #[serde(default)]
    position: Vec<RawBump>,
    #[serde(default)]
    velocity: Vec<RawBump>,
    charges: Option<Vec<RawEntry>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBump {
    center: [f64; 3],
    radius: f64,
    amplitude: Option<RawEntry>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    spacing: Option<f64>,
    shell_radii: Option<Vec<f64>>,
    exclusion_radius: Option<f64>,
    #[serde(rename = "box")]
    bounds: Option<AutoOr<[[f64; 3]; 2]>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawThresholds {
    activation: Option<AutoOr<f64>>,
    support: Option<AutoOr<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    polar: Option<usize>,
    azimuth: Option<usize>,
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

fn syntax_error(text: &str, err: &toml::de::Error) -> ScenarioError {
    let (line, column) = err.span().map_or((0, 0), |s| line_column(text, s.start));
    ScenarioError::Syntax {
        line,
        column,
        message: err.message().to_string(),
    }
}

fn matrix(raw: RawMatrix, n: usize, path: &str) -> Result<CMatrix, ScenarioError> {
    let rows = match raw {
        RawMatrix::Scalar(e) => vec![vec![e]],
        // a one-point scenario may spell its scalar as a single [re, im] row
        RawMatrix::Full(rows)
            if n == 1
                && rows.len() == 1
                && rows[0].len() == 2
                && rows[0].iter().all(|e| matches!(e, RawEntry::Real(_))) =>
        {
            let (RawEntry::Real(re), RawEntry::Real(im)) = (rows[0][0], rows[0][1]) else {
                unreachable!()
            };
            vec![vec![RawEntry::Complex([re, im])]]
        }
        RawMatrix::Full(rows) => rows,
    };
    if rows.len() != n {
        return Err(semantic(path, format!("expected {n} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(semantic(
                format!("{path}[{i}]"),
                format!("matrix must be square ({n}x{n}); row has {} entries", row.len()),
            ));
        }
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j].value()))
}

fn raw_matrix(m: &CMatrix) -> RawMatrix {
    RawMatrix::Full(
        m.row_iter()
            .map(|row| row.iter().map(|z| RawEntry::from_value(*z)).collect())
            .collect(),
    )
}

fn positive(value: f64, path: &str) -> Result<f64, ScenarioError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(semantic(path, format!("must be positive and finite, got {value}")))
    }
}

fn bumps(raw: Vec<RawBump>, path: &str) -> Result<Vec<BumpProfile>, ScenarioError> {
    raw.into_iter()
        .enumerate()
        .map(|(i, b)| {
            let amplitude = b.amplitude.map_or(Complex64::new(1.0, 0.0), RawEntry::value);
            BumpProfile::new(Vec3::from(b.center), b.radius, amplitude)
                .map_err(|e| semantic(format!("{path}[{i}]"), e.to_string()))
        })
        .collect()
}

/// Parses and validates scenario text, filling in all defaults.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let table: toml::Table = text.parse().map_err(|e| syntax_error(text, &e))?;
    let raw: RawScenario =
        serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let path = e.path().to_string();
            semantic(path, e.into_inner().message().to_string())
        })?;

    let name = raw.name.ok_or_else(|| semantic("name", "missing required field"))?;
    let points: Vec<Vec3> = raw
        .points
        .ok_or_else(|| semantic("points", "missing required field"))?
        .into_iter()
        .map(Vec3::from)
        .collect();
    let n = points.len();
    let horizon = positive(
        raw.horizon.ok_or_else(|| semantic("horizon", "missing required field"))?,
        "horizon",
    )?;

    let raw_matrices = raw.matrices.unwrap_or_default();
    let matrices = match (raw_matrices.h, raw_matrices.a, raw_matrices.b) {
        (Some(h), None, None) => MatrixSpec::Hermitian(matrix(h, n, "matrices.h")?),
        (None, Some(a), Some(b)) => MatrixSpec::Pair {
            a: matrix(a, n, "matrices.a")?,
            b: matrix(b, n, "matrices.b")?,
        },
        (None, None, None) if n == 0 => MatrixSpec::Hermitian(CMatrix::zeros(0, 0)),
        (None, None, None) => return Err(semantic("matrices", "missing required field")),
        _ => {
            return Err(semantic(
                "matrices",
                "give either `h` alone or both `a` and `b`",
            ))
        }
    };
    let config = match &matrices {
        MatrixSpec::Hermitian(h) => InteractionConfig::with_hermitian(points, h.clone()),
        MatrixSpec::Pair { a, b } => InteractionConfig::new(points, a.clone(), b.clone()),
    }
    .map_err(|e| semantic("points", e.to_string()))?;

    let raw_initial = raw.initial.unwrap_or_default();
    let mut initial = InitialData::new(
        bumps(raw_initial.position, "initial.position")?,
        bumps(raw_initial.velocity, "initial.velocity")?,
        n,
    );
    if let Some(charges) = raw_initial.charges {
        if charges.len() != n {
            return Err(semantic(
                "initial.charges",
                format!("expected {n} entries, found {}", charges.len()),
            ));
        }
        initial.charges = charges.into_iter().map(RawEntry::value).collect();
    }

    let step = match raw.step {
        Some(h) => positive(h, "step")?,
        None => default_step(&config),
    };

    let defaults = GridSpec::default();
    let raw_grid = raw.grid.unwrap_or_default();
    let grid = GridSpec {
        spacing: positive(raw_grid.spacing.unwrap_or(defaults.spacing), "grid.spacing")?,
        shell_radii: raw_grid.shell_radii.unwrap_or(defaults.shell_radii),
        exclusion_radius: raw_grid.exclusion_radius.unwrap_or(defaults.exclusion_radius),
        bounds: raw_grid
            .bounds
            .and_then(AutoOr::into_option)
            .map(|[lo, hi]| (Vec3::from(lo), Vec3::from(hi))),
    };
    for (i, r) in grid.shell_radii.iter().enumerate() {
        positive(*r, &format!("grid.shell_radii[{i}]"))?;
    }
    if !(grid.exclusion_radius >= 0.0) {
        return Err(semantic("grid.exclusion_radius", "must be non-negative"));
    }
    if let Some((lo, hi)) = &grid.bounds {
        if (0..3).any(|k| lo[k] > hi[k]) {
            return Err(semantic("grid.box", "lower corner exceeds upper corner"));
        }
    }

    let snapshot_times = raw.snapshot_times.and_then(AutoOr::into_option);
    if let Some(times) = &snapshot_times {
        for (i, t) in times.iter().enumerate() {
            if !(*t >= 0.0 && *t <= horizon) {
                return Err(semantic(
                    format!("snapshot_times[{i}]"),
                    format!("must lie in [0, horizon], got {t}"),
                ));
            }
        }
    }

    let thresholds = raw.thresholds.unwrap_or_default();
    let activation_threshold = thresholds.activation.and_then(AutoOr::into_option);
    let support_threshold = thresholds.support.and_then(AutoOr::into_option);
    if let Some(v) = activation_threshold {
        positive(v, "thresholds.activation")?;
    }
    if let Some(v) = support_threshold {
        positive(v, "thresholds.support")?;
    }

    let default_orders = QuadratureOrders::default();
    let raw_quad = raw.quadrature.unwrap_or_default();
    let quadrature = QuadratureOrders {
        polar: raw_quad.polar.unwrap_or(default_orders.polar),
        azimuth: raw_quad.azimuth.unwrap_or(default_orders.azimuth),
    };
    if quadrature.polar == 0 || quadrature.azimuth == 0 {
        return Err(semantic("quadrature", "orders must be at least 1"));
    }

    Ok(Scenario {
        name,
        matrices,
        config,
        initial,
        horizon,
        step,
        direction: raw.direction.unwrap_or_default(),
        grid,
        snapshot_times,
        activation_threshold,
        support_threshold,
        quadrature,
    })
}

fn raw_bumps(bumps: &[BumpProfile]) -> Vec<RawBump> {
    bumps
        .iter()
        .map(|b| RawBump {
            center: b.center.into(),
            radius: b.radius,
            amplitude: Some(RawEntry::from_value(b.amplitude)),
        })
        .collect()
}

/// Serializes a scenario with every default written out explicitly.
pub fn to_toml(scenario: &Scenario) -> String {
    let (h, a, b) = match &scenario.matrices {
        MatrixSpec::Hermitian(h) => (Some(raw_matrix(h)), None, None),
        MatrixSpec::Pair { a, b } => (None, Some(raw_matrix(a)), Some(raw_matrix(b))),
    };
    let raw = RawScenario {
        name: Some(scenario.name.clone()),
        points: Some(scenario.config.points().iter().map(|p| (*p).into()).collect()),
        horizon: Some(scenario.horizon),
        step: Some(scenario.step),
        direction: Some(scenario.direction),
        snapshot_times: Some(AutoOr::from_option(scenario.snapshot_times.clone())),
        matrices: Some(RawMatrices { h, a, b }),
        initial: Some(RawInitial {
            position: raw_bumps(&scenario.initial.position),
            velocity: raw_bumps(&scenario.initial.velocity),
            charges: Some(scenario.initial.charges.iter().map(|z| RawEntry::from_value(*z)).collect()),
        }),
        grid: Some(RawGrid {
            spacing: Some(scenario.grid.spacing),
            shell_radii: Some(scenario.grid.shell_radii.clone()),
            exclusion_radius: Some(scenario.grid.exclusion_radius),
            bounds: Some(AutoOr::from_option(
                scenario.grid.bounds.map(|(lo, hi)| [lo.into(), hi.into()]),
            )),
        }),
        thresholds: Some(RawThresholds {
            activation: Some(AutoOr::from_option(scenario.activation_threshold)),
            support: Some(AutoOr::from_option(scenario.support_threshold)),
        }),
        quadrature: Some(RawQuadrature {
            polar: Some(scenario.quadrature.polar),
            azimuth: Some(scenario.quadrature.azimuth),
        }),
    };
    toml::to_string(&raw).expect("scenario serialization is infallible")
}
