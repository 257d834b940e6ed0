//! Retarded charge equations, integrated by the method of steps.
//!
//! With `H = A⁻¹B` the charges obey
//!
//! ```text
//! ζ̇(t) = 4π [ f(t) + g(t) - H ζ(t) ],   g_j(t) = Σ_k θ(t - d_jk) G_jk ζ_k(t - d_jk)
//! ```
//!
//! where `f_j(t) = φ_f(t, y_j)`. The step never exceeds the smallest delay, so
//! every retarded lookup falls on already-completed history.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bc_algebra::{validate_pair, InteractionConfig};
use crate::free_wave::{interval_count, Forcing};
use crate::linalg::{condition_number, from_real, solve, CMatrix, CVector, CONDITION_LIMIT};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const FOUR_PI: f64 = 4.0 * PI;

/// Dense record of `ζ(t)` and `ζ̇(t)` on the nodes `t_i = i h`, with cubic
/// Hermite interpolation between nodes and zero prehistory.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeHistory {
    step: f64,
    n_points: usize,
    n_nodes: usize,
    // node-major: values[i * n_points + k]
    values: Vec<Complex64>,
    derivatives: Vec<Complex64>,
}

impl ChargeHistory {
    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn end_time(&self) -> f64 {
        (self.n_nodes - 1) as f64 * self.step
    }

    pub fn node_time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn node_values(&self, i: usize) -> &[Complex64] {
        &self.values[i * self.n_points..(i + 1) * self.n_points]
    }

    pub fn node_derivatives(&self, i: usize) -> &[Complex64] {
        &self.derivatives[i * self.n_points..(i + 1) * self.n_points]
    }

    /// `ζ_k(s)`; zero for `s < 0`.
    pub fn zeta(&self, k: usize, s: f64) -> Complex64 {
        hermite(&self.values, &self.derivatives, self.n_points, self.n_nodes, self.step, k, s).0
    }

    /// `ζ̇_k(s)`; zero for `s < 0`.
    pub fn zeta_dot(&self, k: usize, s: f64) -> Complex64 {
        hermite(&self.values, &self.derivatives, self.n_points, self.n_nodes, self.step, k, s).1
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Cubic Hermite value and derivative of component `k` at `s`, using the
/// first `count` nodes. Queries past the last node extrapolate the last interval.
fn hermite(
    values: &[Complex64],
    derivs: &[Complex64],
    n: usize,
    count: usize,
    step: f64,
    k: usize,
    s: f64,
) -> (Complex64, Complex64) {
    if s < 0.0 || count == 0 {
        return (ZERO, ZERO);
    }
    let u = s / step;
    let nearest = u.round();
    if (u - nearest).abs() < 1e-12 && (nearest as usize) < count {
        let i = nearest as usize;
        return (values[i * n + k], derivs[i * n + k]);
    }
    if count == 1 {
        return (values[k] + derivs[k] * s, derivs[k]);
    }
    let i = (u.floor() as usize).min(count - 2);
    let tau = u - i as f64;
    let (y0, y1) = (values[i * n + k], values[(i + 1) * n + k]);
    let (m0, m1) = (derivs[i * n + k] * step, derivs[(i + 1) * n + k] * step);
    let tau2 = tau * tau;
    let tau3 = tau2 * tau;
    let h00 = 2.0 * tau3 - 3.0 * tau2 + 1.0;
    let h10 = tau3 - 2.0 * tau2 + tau;
    let h01 = -2.0 * tau3 + 3.0 * tau2;
    let h11 = tau3 - tau2;
    let value = y0 * h00 + m0 * h10 + y1 * h01 + m1 * h11;
    let dh00 = 6.0 * tau2 - 6.0 * tau;
    let dh10 = 3.0 * tau2 - 4.0 * tau + 1.0;
    let dh01 = -6.0 * tau2 + 6.0 * tau;
    let dh11 = 3.0 * tau2 - 2.0 * tau;
    let deriv = (y0 * dh00 + m0 * dh10 + y1 * dh01 + m1 * dh11) / step;
    (value, deriv)
}

fn heaviside(s: f64) -> f64 {
    if s >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Right-hand side of the charge equations with read access to the history
/// computed so far.
struct RetardedSystem<'a, F: Forcing> {
    config: &'a InteractionConfig,
    h: CMatrix,
    forcing: &'a F,
}

impl<F: Forcing> RetardedSystem<'_, F> {
    fn delayed_sum(&self, j: usize, t: f64, lookup: &dyn Fn(usize, f64) -> Complex64) -> Complex64 {
        let g = self.config.green_matrix();
        let d = self.config.distance_matrix();
        let mut sum = ZERO;
        for k in 0..self.config.n() {
            if k == j {
                continue;
            }
            let lag = t - d[(j, k)];
            if heaviside(lag) > 0.0 {
                sum += lookup(k, lag) * g[(j, k)];
            }
        }
        sum
    }

    fn rhs(&self, t: f64, zeta: &CVector, lookup: &dyn Fn(usize, f64) -> Complex64) -> CVector {
        let n = self.config.n();
        let h_zeta = &self.h * zeta;
        CVector::from_iterator(
            n,
            (0..n).map(|j| (self.forcing.value(j, t) + self.delayed_sum(j, t, lookup) - h_zeta[j]) * FOUR_PI),
        )
    }
}

/// Integrates the retarded charge system on `[0, horizon]` with classical
/// RK4 and step `step`, starting from zero charges.
pub fn solve_charges<F: Forcing>(
    config: &InteractionConfig,
    forcing: &F,
    horizon: f64,
    step: f64,
) -> Result<ChargeHistory> {
    let report = validate_pair(config);
    if let Some(check) = report.first_failure() {
        return Err(Error::InvalidPair(format!(
            "{} check failed (residual {:.3e})",
            check.kind.code(),
            check.residual
        )));
    }
    let condition = condition_number(config.a());
    if !(condition < CONDITION_LIMIT) {
        return Err(Error::UnsupportedPencil { condition });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Inadmissible(format!("time step must be positive, got {step}")));
    }
    if let Some(min_delay) = config.min_delay() {
        if step > min_delay {
            return Err(Error::StepTooLarge { step, min_delay });
        }
    }
    if forcing.n_points() != config.n() {
        return Err(Error::DimensionMismatch(format!(
            "forcing has {} points, configuration {}",
            forcing.n_points(),
            config.n()
        )));
    }

    let n = config.n();
    let h = solve(config.a(), config.b(), "A")?;
    let system = RetardedSystem { config, h, forcing };
    let intervals = interval_count(horizon, step);
    let n_nodes = intervals + 1;
    let mut values: Vec<Complex64> = Vec::with_capacity(n * n_nodes);
    let mut derivs: Vec<Complex64> = Vec::with_capacity(n * n_nodes);

    let mut zeta = CVector::zeros(n);
    values.extend(zeta.iter());
    let k0 = {
        let lookup = |k: usize, s: f64| hermite(&values, &derivs, n, 0, step, k, s).0;
        system.rhs(0.0, &zeta, &lookup)
    };
    derivs.extend(k0.iter());

    for i in 0..intervals {
        let t = i as f64 * step;
        let count = i + 1;
        let k1 = CVector::from_column_slice(&derivs[i * n..(i + 1) * n]);
        let (k2, k3, k4) = {
            let lookup = |k: usize, s: f64| hermite(&values, &derivs, n, count, step, k, s).0;
            let k2 = system.rhs(t + 0.5 * step, &(&zeta + &k1 * Complex64::from(0.5 * step)), &lookup);
            let k3 = system.rhs(t + 0.5 * step, &(&zeta + &k2 * Complex64::from(0.5 * step)), &lookup);
            let k4 = system.rhs(t + step, &(&zeta + &k3 * Complex64::from(step)), &lookup);
            (k2, k3, k4)
        };
        zeta += (k1 + k2 * Complex64::from(2.0) + k3 * Complex64::from(2.0) + k4) * Complex64::from(step / 6.0);
        values.extend(zeta.iter());
        let next = {
            // the node just appended is never needed for lookups at t + h
            let lookup = |k: usize, s: f64| hermite(&values, &derivs, n, count, step, k, s).0;
            system.rhs(t + step, &zeta, &lookup)
        };
        derivs.extend(next.iter());
    }

    Ok(ChargeHistory {
        step,
        n_points: n,
        n_nodes,
        values,
        derivatives: derivs,
    })
}

/// Default step: `min(0.01, min_delay / 4)`.
pub fn default_step(config: &InteractionConfig) -> f64 {
    match config.min_delay() {
        Some(d) => 0.01_f64.min(d / 4.0),
        None => 0.01,
    }
}

/// Default activation threshold: `1e-7` times the largest forcing value, floored at `1e-12`.
pub fn default_activation_threshold(forcing_max_abs: f64) -> f64 {
    (1e-7 * forcing_max_abs).max(1e-12)
}

/// First node time with `|ζ_k| > δ` for each point, `+∞` if never reached.
pub fn activation_times(history: &ChargeHistory, delta: f64) -> Vec<f64> {
    assert!(delta > 0.0, "activation threshold must be positive");
    (0..history.n_points())
        .map(|k| {
            (0..history.n_nodes())
                .find(|&i| history.node_values(i)[k].norm() > delta)
                .map_or(f64::INFINITY, |i| history.node_time(i))
        })
        .collect()
}

/// Boundary-condition residual along a computed trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BcResidual {
    /// `max ‖A r(t) - B ζ(t)‖`
    pub absolute: f64,
    /// `max ‖A r(t) - B ζ(t)‖ / max(1, ‖A r(t)‖ + ‖B ζ(t)‖)`
    pub scaled: f64,
    /// Time at which `scaled` is attained.
    pub worst_time: f64,
}

/// Residual of `A φ^r = B φ^s` along the history, with
/// `φ^r_j = φ_f(t, y_j) + g_j(t) - ζ̇_j(t)/4π` and `φ^s = ζ(t)`, all read from
/// the dense output at the midpoints of the grid intervals (at the nodes the
/// stored `ζ̇` satisfies the equation by construction).
pub fn bc_residual<F: Forcing>(config: &InteractionConfig, history: &ChargeHistory, forcing: &F) -> BcResidual {
    let n = config.n();
    let mut out = BcResidual {
        absolute: 0.0,
        scaled: 0.0,
        worst_time: 0.0,
    };
    if n == 0 {
        return out;
    }
    let g = from_real(config.green_matrix());
    let d = config.distance_matrix();
    for i in 0..history.n_nodes() - 1 {
        let t = (i as f64 + 0.5) * history.step();
        let zeta = CVector::from_iterator(n, (0..n).map(|k| history.zeta(k, t)));
        let regular = CVector::from_iterator(
            n,
            (0..n).map(|j| {
                let mut r = forcing.value(j, t) - history.zeta_dot(j, t) / FOUR_PI;
                for k in 0..n {
                    if k != j && t - d[(j, k)] >= 0.0 {
                        r += g[(j, k)] * history.zeta(k, t - d[(j, k)]);
                    }
                }
                r
            }),
        );
        let ar = config.a() * &regular;
        let bz = config.b() * &zeta;
        let abs = (&ar - &bz).norm();
        let scaled = abs / (ar.norm() + bz.norm()).max(1.0);
        out.absolute = out.absolute.max(abs);
        if scaled > out.scaled {
            out.scaled = scaled;
            out.worst_time = t;
        }
    }
    out
}
