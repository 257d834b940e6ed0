mod common;

use std::f64::consts::PI;

use common::*;
use num_complex::Complex64;
use pointwave::bc_algebra::InteractionConfig;
use pointwave::charge_dynamics::{activation_times, bc_residual, solve_charges};
use pointwave::free_wave::{radial_oracle, ForcingTrace, InitialData, Kirchhoff, QuadratureOrders};
use pointwave::linalg::{CMatrix, Vec3};

fn single(alpha: f64) -> (InteractionConfig, InitialData) {
    let cfg = InteractionConfig::new(
        vec![Vec3::zeros()],
        CMatrix::identity(1, 1),
        CMatrix::from_element(1, 1, c(alpha, 0.0)),
    )
    .unwrap();
    // bump centred 2 away with radius 0.5: first arrival at t = 1.5
    (cfg, InitialData::new(vec![bump([-2.0, 0.0, 0.0], 0.5, 1.0)], vec![], 1))
}

/// Free wave at the point from the closed-form radial solution.
fn oracle_forcing(s: f64) -> Complex64 {
    let centred = InitialData::new(vec![bump([0.0, 0.0, 0.0], 0.5, 1.0)], vec![], 0);
    radial_oracle(&centred, s, 2.0)
}

#[test]
fn duhamel_oracle_for_decaying_and_neutral_couplings() {
    let step = 0.005;
    let horizon = 6.0;
    let kirchhoff = Kirchhoff::new(QuadratureOrders::default());
    for alpha in [0.0, 1.0, 3.0] {
        let (cfg, data) = single(alpha);
        let forcing = ForcingTrace::build(&data, &cfg, step, horizon, &kirchhoff).unwrap();
        let history = solve_charges(&cfg, &forcing, horizon, step).unwrap();
        let oracle = duhamel_oracle(alpha, oracle_forcing, step, history.n_nodes(), 4);
        let err = (0..history.n_nodes())
            .map(|i| (history.node_values(i)[0] - oracle[i]).norm())
            .fold(0.0, f64::max);
        assert!(err <= 1e-6, "alpha = {alpha}: error {err:.3e}");
    }
}

#[test]
fn growing_mode_is_accurate_in_relative_terms() {
    // ζ grows like e^{4πt}; only a relative comparison is meaningful
    let (cfg, data) = single(-1.0);
    let step = 0.005;
    let horizon = 3.0;
    let forcing = ForcingTrace::build(&data, &cfg, step, horizon, &Kirchhoff::new(QuadratureOrders::default())).unwrap();
    let history = solve_charges(&cfg, &forcing, horizon, step).unwrap();
    let oracle = duhamel_oracle(-1.0, oracle_forcing, step, history.n_nodes(), 4);
    // RK4 amplification error for z = 4πh is about z⁵/120 per step
    let z = 4.0 * PI * step;
    let budget = 2.0 * history.n_nodes() as f64 * z.powi(5) / 120.0;
    for (i, want) in oracle.iter().enumerate() {
        let err = (history.node_values(i)[0] - want).norm();
        assert!(err <= budget * (1.0 + want.norm()), "t = {}: {err:.3e}", history.node_time(i));
    }
}

fn manufactured_error(alpha: f64, step: f64) -> f64 {
    let cfg = single(alpha).0;
    let forcing = (1, |_: usize, t: f64| c(t.cos(), 0.0));
    let horizon = 1.4;
    let history = solve_charges(&cfg, &forcing, horizon, step).unwrap();
    let k = 4.0 * PI * alpha;
    (0..history.n_nodes())
        .map(|i| {
            let t = history.node_time(i);
            let exact = 4.0 * PI * (k * t.cos() + t.sin() - k * (-k * t).exp()) / (k * k + 1.0);
            (history.node_values(i)[0] - exact).norm()
        })
        .fold(0.0, f64::max)
}

#[test]
fn fourth_order_convergence_on_smooth_forcing() {
    for alpha in [0.0, 0.5, 1.0] {
        let coarse = manufactured_error(alpha, 0.01);
        let fine = manufactured_error(alpha, 0.005);
        assert!(coarse / fine >= 12.0, "alpha = {alpha}: ratio {}", coarse / fine);
    }
}

#[test]
fn charges_vanish_before_first_arrival() {
    let (cfg, data) = single(2.0);
    let step = 0.01;
    let forcing = ForcingTrace::build(&data, &cfg, step, 3.0, &Kirchhoff::new(QuadratureOrders::default())).unwrap();
    let history = solve_charges(&cfg, &forcing, 3.0, step).unwrap();
    for i in 0..history.n_nodes() {
        if history.node_time(i) <= 1.5 - 1e-12 {
            assert_eq!(history.node_values(i)[0], c(0.0, 0.0));
        }
    }
    let tau = activation_times(&history, 1e-12)[0];
    assert!((1.5..=1.52).contains(&tau), "{tau}");
}

#[test]
fn delayed_coupling_respects_light_cone() {
    // local coupling, forcing only at the first point: the second point stays
    // silent until the first point's field has travelled the distance 3
    let cfg = InteractionConfig::with_hermitian(
        vec![Vec3::zeros(), Vec3::new(3.0, 0.0, 0.0)],
        CMatrix::identity(2, 2),
    )
    .unwrap();
    let forcing = (2, |j: usize, t: f64| if j == 0 { c((t - 1.0).max(0.0).powi(4), 0.0) } else { c(0.0, 0.0) });
    let step = 0.01;
    let history = solve_charges(&cfg, &forcing, 6.0, step).unwrap();
    let tau = activation_times(&history, 1e-14);
    assert!(tau[0] >= 1.0 && tau[0] <= 1.0 + 2.0 * step, "{tau:?}");
    assert!(tau[1] >= 4.0 && tau[1] <= 4.0 + 2.0 * step, "{tau:?}");
}

#[test]
fn residual_decreases_with_step() {
    let (cfg, data) = two_point(CMatrix::identity(2, 2));
    let kirchhoff = Kirchhoff::new(QuadratureOrders::default());
    let residual = |step: f64| {
        let forcing = ForcingTrace::build(&data, &cfg, step, 6.0, &kirchhoff).unwrap();
        let history = solve_charges(&cfg, &forcing, 6.0, step).unwrap();
        bc_residual(&cfg, &history, &forcing)
    };
    let coarse = residual(0.02);
    let fine = residual(0.01);
    assert!(coarse.scaled > 0.0);
    assert!(coarse.scaled / fine.scaled >= 3.0, "{coarse:?} {fine:?}");
}
