//! Compactly supported initial data and the free wave it generates.
//!
//! The free solution is evaluated with the three-dimensional Kirchhoff
//! formula
//!
//! ```text
//! φ_f(t, x) = mean_{|y-x|=t} [ φ₀(y) + ∇φ₀(y)·(y-x) + t φ̇₀(y) ]
//! ```
//!
//! using a product rule on the sphere: Gauss–Legendre in `cos θ` times a
//! uniform azimuthal rule. For every bump the polar axis is turned towards
//! the bump centre and the polar range is cut to the spherical cap that
//! actually meets the bump ball, so each integrand is a polynomial in
//! `cos θ` on its integration range.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::Vector3;
use num_complex::Complex64;

use crate::bc_algebra::InteractionConfig;
use crate::linalg::Vec3;
use crate::quadrature::{adaptive_simpson, gauss_legendre};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `a (1 - |x-c|²/R²)⁴` inside the ball `B(c, R)`, zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpProfile {
    pub center: Vec3,
    pub radius: f64,
    pub amplitude: Complex64,
}

impl BumpProfile {
    pub fn new(center: Vec3, radius: f64, amplitude: Complex64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Inadmissible(format!("bump radius must be positive, got {radius}")));
        }
        Ok(Self {
            center,
            radius,
            amplitude,
        })
    }

    /// Real shape factor `(1 - s)⁴` with `s = r²/R²`.
    fn shape(&self, r_sq: f64) -> f64 {
        let s = r_sq / (self.radius * self.radius);
        if s >= 1.0 {
            0.0
        } else {
            (1.0 - s).powi(4)
        }
    }

    pub fn value(&self, x: &Vec3) -> Complex64 {
        self.amplitude * self.shape((x - self.center).norm_squared())
    }

    pub fn gradient(&self, x: &Vec3) -> Vector3<Complex64> {
        let rel = x - self.center;
        let r2 = self.radius * self.radius;
        let s = rel.norm_squared() / r2;
        if s >= 1.0 {
            return Vector3::from_element(ZERO);
        }
        let factor = -8.0 * (1.0 - s).powi(3) / r2;
        rel.map(|v| self.amplitude * (factor * v))
    }

    /// Profile value at distance `r` from the centre.
    pub fn radial(&self, r: f64) -> Complex64 {
        self.amplitude * self.shape(r * r)
    }

    fn radial_derivative(&self, r: f64) -> Complex64 {
        let r2 = self.radius * self.radius;
        let s = r * r / r2;
        if s >= 1.0 {
            return ZERO;
        }
        self.amplitude * (-8.0 * r * (1.0 - s).powi(3) / r2)
    }

    /// Distance from `y` to the closed support ball (zero inside it).
    pub fn distance_to(&self, y: &Vec3) -> f64 {
        ((y - self.center).norm() - self.radius).max(0.0)
    }
}

/// Cauchy data: position bumps `φ₀`, velocity bumps `φ̇₀`, and the initial charges.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InitialData {
    pub position: Vec<BumpProfile>,
    pub velocity: Vec<BumpProfile>,
    pub charges: Vec<Complex64>,
}

impl InitialData {
    pub fn new(position: Vec<BumpProfile>, velocity: Vec<BumpProfile>, n_points: usize) -> Self {
        Self {
            position,
            velocity,
            charges: vec![ZERO; n_points],
        }
    }

    pub fn bumps(&self) -> impl Iterator<Item = &BumpProfile> {
        self.position.iter().chain(&self.velocity)
    }

    pub fn is_empty(&self) -> bool {
        self.position.is_empty() && self.velocity.is_empty()
    }

    /// Diameter of the union of all bump balls.
    pub fn support_diameter(&self) -> f64 {
        let bumps: Vec<_> = self.bumps().collect();
        let mut diam: f64 = 0.0;
        for (i, p) in bumps.iter().enumerate() {
            for q in &bumps[i..] {
                diam = diam.max((p.center - q.center).norm() + p.radius + q.radius);
            }
        }
        diam
    }

    /// `dist(y, S₀)`, infinite for empty data.
    pub fn distance_to_support(&self, y: &Vec3) -> f64 {
        self.bumps().map(|b| b.distance_to(y)).fold(f64::INFINITY, f64::min)
    }

    /// Simulation admissibility: zero initial charges, no bump ball containing
    /// an interaction point, and hence `A φ₀(Y) = 0`.
    pub fn check_admissible(&self, config: &InteractionConfig) -> Result<()> {
        if self.charges.len() != config.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} initial charges for {} points",
                self.charges.len(),
                config.n()
            )));
        }
        if let Some(j) = self.charges.iter().position(|z| *z != ZERO) {
            return Err(Error::Inadmissible(format!(
                "initial charge at point {j} is nonzero; only zero initial charges are supported"
            )));
        }
        for (j, y) in config.points().iter().enumerate() {
            for b in self.bumps() {
                if (y - b.center).norm() < b.radius {
                    return Err(Error::Inadmissible(format!(
                        "interaction point {j} lies inside the bump centred at ({}, {}, {})",
                        b.center.x, b.center.y, b.center.z
                    )));
                }
            }
        }
        let phi0: Vec<Complex64> = config.points().iter().map(|y| eval_initial(self, y).0).collect();
        let residual: f64 = phi0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() * config.a().norm();
        if residual > 1e-12 {
            return Err(Error::Inadmissible(format!("||A phi0(Y)|| = {residual:.3e}")));
        }
        Ok(())
    }

    /// Data for the time-reversed problem, `φ(-t; φ₀, φ̇₀) = φ(t; φ₀, -φ̇₀)`.
    pub fn time_reversed(&self) -> Self {
        let mut out = self.clone();
        for b in &mut out.velocity {
            b.amplitude = -b.amplitude;
        }
        out
    }
}

/// Value and gradient of `φ₀` at `x`.
pub fn eval_initial(data: &InitialData, x: &Vec3) -> (Complex64, Vector3<Complex64>) {
    let mut value = ZERO;
    let mut grad = Vector3::from_element(ZERO);
    for b in &data.position {
        value += b.value(x);
        grad += b.gradient(x);
    }
    (value, grad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct QuadratureOrders {
    pub polar: usize,
    pub azimuth: usize,
}

impl Default for QuadratureOrders {
    fn default() -> Self {
        Self {
            polar: 24,
            azimuth: 48,
        }
    }
}

impl QuadratureOrders {
    /// Polar order `n` with `2n` azimuthal nodes.
    pub fn with_polar(polar: usize) -> Self {
        Self {
            polar,
            azimuth: 2 * polar,
        }
    }
}

/// Spherical-mean evaluator for the Kirchhoff formula.
#[derive(Debug, Clone)]
pub struct Kirchhoff {
    orders: QuadratureOrders,
    // GL nodes/weights mapped to [0, 1]
    nodes: Vec<f64>,
    weights: Vec<f64>,
    azimuth: Vec<(f64, f64)>,
}

impl Kirchhoff {
    pub fn new(orders: QuadratureOrders) -> Self {
        assert!(orders.polar > 0 && orders.azimuth > 0, "quadrature orders must be positive");
        let (x, w) = gauss_legendre(orders.polar);
        let nodes = x.iter().map(|xi| 0.5 * (xi + 1.0)).collect();
        let weights = w.iter().map(|wi| 0.5 * wi).collect();
        let azimuth = (0..orders.azimuth)
            .map(|k| {
                let psi = 2.0 * PI * (k as f64 + 0.5) / orders.azimuth as f64;
                (psi.cos(), psi.sin())
            })
            .collect();
        Self {
            orders,
            nodes,
            weights,
            azimuth,
        }
    }

    pub fn orders(&self) -> QuadratureOrders {
        self.orders
    }

    /// `φ_f(t, x)` for `t ≥ 0`; `t = 0` returns `φ₀(x)` exactly.
    pub fn eval(&self, data: &InitialData, t: f64, x: &Vec3) -> Result<Complex64> {
        if t < 0.0 || t.is_nan() {
            return Err(Error::NegativeTime(t));
        }
        if t == 0.0 {
            return Ok(eval_initial(data, x).0);
        }
        let mut total = ZERO;
        for b in &data.position {
            total += self.bump_mean(b, t, x, Role::Position);
        }
        for b in &data.velocity {
            total += self.bump_mean(b, t, x, Role::Velocity);
        }
        Ok(total)
    }

    /// Spherical mean over `|y-x| = t` of one bump's Kirchhoff integrand.
    fn bump_mean(&self, bump: &BumpProfile, t: f64, x: &Vec3, role: Role) -> Complex64 {
        let to_center = bump.center - x;
        let d = to_center.norm();
        let r = bump.radius;
        let scale = d.max(t).max(r);
        let (axis, mu_lo) = if d <= 1e-14 * scale {
            if t >= r {
                return ZERO;
            }
            (Vec3::z(), -1.0)
        } else {
            let mu0 = (d * d + t * t - r * r) / (2.0 * t * d);
            if mu0 >= 1.0 {
                return ZERO;
            }
            (to_center / d, mu0.max(-1.0))
        };
        let (e1, e2) = orthonormal_complement(&axis);
        let span = 1.0 - mu_lo;
        let r2 = r * r;
        let mut acc = 0.0;
        for (node, weight) in self.nodes.iter().zip(&self.weights) {
            let mu = mu_lo + span * node;
            let sin_theta = (1.0 - mu * mu).max(0.0).sqrt();
            let mut ring = 0.0;
            for &(cos_psi, sin_psi) in &self.azimuth {
                let omega = axis * mu + (e1 * cos_psi + e2 * sin_psi) * sin_theta;
                let rel = x + omega * t - bump.center;
                let s = rel.norm_squared() / r2;
                if s >= 1.0 {
                    continue;
                }
                let one_minus = 1.0 - s;
                ring += match role {
                    Role::Position => {
                        // φ₀ + ∇φ₀·(y-x)
                        let radial = rel.dot(&omega) * t;
                        one_minus.powi(4) - 8.0 * one_minus.powi(3) * radial / r2
                    }
                    Role::Velocity => t * one_minus.powi(4),
                };
            }
            acc += weight * ring / self.azimuth.len() as f64;
        }
        // mean = (1/4π) ∫ dΩ = ½ ∫_{μ_lo}^1 dμ (azimuthal mean)
        bump.amplitude * (0.5 * span * acc)
    }
}

#[derive(Debug, Clone, Copy)]
enum Role {
    Position,
    Velocity,
}

fn orthonormal_complement(axis: &Vec3) -> (Vec3, Vec3) {
    let helper = if axis.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = axis.cross(&helper).normalize();
    let e2 = axis.cross(&e1);
    (e1, e2)
}

fn default_kirchhoff() -> &'static Kirchhoff {
    static RULE: OnceLock<Kirchhoff> = OnceLock::new();
    RULE.get_or_init(|| Kirchhoff::new(QuadratureOrders::default()))
}

/// `φ_f(t, x)` at the default quadrature orders.
pub fn kirchhoff_eval(data: &InitialData, t: f64, x: &Vec3) -> Result<Complex64> {
    default_kirchhoff().eval(data, t, x)
}

/// Closed-form free wave for data whose bumps are all centred at the origin,
/// evaluated at distance `r` from the origin.
///
/// Position bumps use `[(r+t) p(r+t) + (r-t) p(|r-t|)] / 2r` (limit
/// `d/dt (t p(t))` at `r = 0`); velocity bumps use
/// `(1/2r) ∫_{|r-t|}^{r+t} s q(s) ds` by adaptive quadrature.
pub fn radial_oracle(data: &InitialData, t: f64, r: f64) -> Complex64 {
    assert!(t >= 0.0 && r >= 0.0, "radial oracle needs t, r >= 0");
    assert!(
        data.bumps().all(|b| b.center == Vec3::zeros()),
        "radial oracle needs bumps centred at the origin"
    );
    let mut total = ZERO;
    for p in &data.position {
        total += if t == 0.0 {
            p.radial(r)
        } else if r == 0.0 {
            p.radial(t) + p.radial_derivative(t) * t
        } else {
            ((p.radial(r + t) * (r + t)) + p.radial((r - t).abs()) * (r - t)) / (2.0 * r)
        };
    }
    for q in &data.velocity {
        if t == 0.0 {
            continue;
        }
        if r == 0.0 {
            total += q.radial(t) * t;
            continue;
        }
        let lo = (r - t).abs();
        let hi = (r + t).min(q.radius);
        if lo >= hi {
            continue;
        }
        let unit = BumpProfile {
            amplitude: Complex64::new(1.0, 0.0),
            ..q.clone()
        };
        let integral = adaptive_simpson(|s| s * unit.radial(s).re, lo, hi, 1e-14);
        total += q.amplitude * (integral / (2.0 * r));
    }
    total
}

/// Supplies the free-wave values `φ_f(t, y_j)` that drive the charge equations.
pub trait Forcing {
    fn n_points(&self) -> usize;
    fn value(&self, j: usize, t: f64) -> Complex64;
}

/// Table of `φ_f(t_i, y_j)` on a uniform time grid with 4-point Lagrange
/// interpolation between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingTrace {
    step: f64,
    n_points: usize,
    n_nodes: usize,
    // point-major: values[j * n_nodes + i]
    values: Vec<Complex64>,
}

/// Number of grid intervals covering `[0, horizon]` with spacing `step`.
pub fn interval_count(horizon: f64, step: f64) -> usize {
    ((horizon / step) - 1e-9).ceil().max(1.0) as usize
}

impl ForcingTrace {
    pub fn build(
        data: &InitialData,
        config: &InteractionConfig,
        step: f64,
        horizon: f64,
        kirchhoff: &Kirchhoff,
    ) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::Inadmissible(format!("time step must be positive, got {step}")));
        }
        let n_nodes = interval_count(horizon, step) + 1;
        let n_points = config.n();
        let mut values = Vec::with_capacity(n_points * n_nodes);
        for y in config.points() {
            for i in 0..n_nodes {
                values.push(kirchhoff.eval(data, i as f64 * step, y)?);
            }
        }
        Ok(Self {
            step,
            n_points,
            n_nodes,
            values,
        })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn node_value(&self, j: usize, i: usize) -> Complex64 {
        self.values[j * self.n_nodes + i]
    }

    /// Largest `|φ_f(t_i, y_j)|` over the table.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Forcing for ForcingTrace {
    fn n_points(&self) -> usize {
        self.n_points
    }

    fn value(&self, j: usize, t: f64) -> Complex64 {
        let row = &self.values[j * self.n_nodes..(j + 1) * self.n_nodes];
        let u = t / self.step;
        let nearest = u.round();
        if (u - nearest).abs() < 1e-12 && nearest >= 0.0 && (nearest as usize) < self.n_nodes {
            return row[nearest as usize];
        }
        if self.n_nodes < 4 {
            // linear fallback for very short traces
            let i = (u.floor().max(0.0) as usize).min(self.n_nodes.saturating_sub(2));
            let frac = u - i as f64;
            return row[i] * (1.0 - frac) + row[(i + 1).min(self.n_nodes - 1)] * frac;
        }
        let i = u.floor().max(0.0) as usize;
        let start = i.saturating_sub(1).min(self.n_nodes - 4);
        let mut out = ZERO;
        for a in 0..4 {
            let xa = (start + a) as f64;
            let mut weight = 1.0;
            for b in 0..4 {
                if a != b {
                    let xb = (start + b) as f64;
                    weight *= (u - xb) / (xa - xb);
                }
            }
            out += row[start + a] * weight;
        }
        out
    }
}

impl<F: Fn(usize, f64) -> Complex64> Forcing for (usize, F) {
    fn n_points(&self) -> usize {
        self.0
    }

    fn value(&self, j: usize, t: f64) -> Complex64 {
        (self.1)(j, t)
    }
}
