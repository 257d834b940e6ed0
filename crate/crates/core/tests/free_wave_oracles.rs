mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use num_complex::Complex64;
use pointwave::free_wave::{eval_initial, kirchhoff_eval, radial_oracle, BumpProfile, InitialData, Kirchhoff, QuadratureOrders};
use pointwave::linalg::Vec3;
use proptest::prelude::*;

fn centred(b: &BumpProfile) -> BumpProfile {
    BumpProfile { center: Vec3::zeros(), ..b.clone() }
}

fn unit_vector(theta: f64, psi: f64) -> Vec3 {
    Vec3::new(theta.sin() * psi.cos(), theta.sin() * psi.sin(), theta.cos())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// A single off-centre bump seen from distance r equals the radial solution at r.
    #[test]
    fn translated_bump_matches_radial_oracle(
        cx in -3.0..3.0f64, cy in -3.0..3.0f64, cz in -3.0..3.0f64,
        radius in 0.2..2.0f64, amp in -2.0..2.0f64, velocity in any::<bool>(),
        t in 0.0..5.0f64, r in 0.0..6.0f64, theta in 0.0..PI, psi in 0.0..TAU,
    ) {
        let b = BumpProfile::new(Vec3::new(cx, cy, cz), radius, c(amp, 0.3)).unwrap();
        let x = b.center + unit_vector(theta, psi) * r;
        let (data, radial) = if velocity {
            (InitialData::new(vec![], vec![b.clone()], 0), InitialData::new(vec![], vec![centred(&b)], 0))
        } else {
            (InitialData::new(vec![b.clone()], vec![], 0), InitialData::new(vec![centred(&b)], vec![], 0))
        };
        let got = kirchhoff_eval(&data, t, &x).unwrap();
        let want = radial_oracle(&radial, t, (x - b.center).norm());
        prop_assert!((got - want).norm() <= 1e-9 * (1.0 + amp.abs()), "got {got}, want {want}");
    }

    /// The sphere |y - x| = t misses every ball: the free wave vanishes identically.
    #[test]
    fn huygens_lacuna(
        radius in 0.2..1.5f64, t in 0.01..6.0f64, r in 0.0..10.0f64,
        theta in 0.0..PI, psi in 0.0..TAU,
    ) {
        prop_assume!((r - t).abs() > radius * 1.0001);
        let b = bump([0.3, -0.2, 0.1], radius, 1.0);
        let data = InitialData::new(vec![b.clone()], vec![b.clone()], 0);
        let x = b.center + unit_vector(theta, psi) * r;
        prop_assert_eq!(kirchhoff_eval(&data, t, &x).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn superposition(t in 0.0..3.0f64, x in -2.0..2.0f64, y in -2.0..2.0f64, s in -3.0..3.0f64) {
        let p = bump([0.5, 0.0, 0.0], 1.0, 1.0);
        let q = bump([-0.5, 0.4, 0.0], 0.7, 2.0);
        let pt = Vec3::new(x, y, 0.2);
        let both = kirchhoff_eval(&InitialData::new(vec![p.clone()], vec![q.clone()], 0), t, &pt).unwrap();
        let only_p = kirchhoff_eval(&InitialData::new(vec![p.clone()], vec![], 0), t, &pt).unwrap();
        let only_q = kirchhoff_eval(&InitialData::new(vec![], vec![q.clone()], 0), t, &pt).unwrap();
        prop_assert!((both - only_p - only_q).norm() <= 1e-13);
        let scaled = BumpProfile { amplitude: p.amplitude * s, ..p.clone() };
        let v = kirchhoff_eval(&InitialData::new(vec![scaled], vec![], 0), t, &pt).unwrap();
        prop_assert!((v - only_p * s).norm() <= 1e-13 * (1.0 + s.abs()));
    }

    /// Reflecting the velocity flips the sign of its contribution, as used for backward runs.
    #[test]
    fn velocity_reflection(t in 0.0..3.0f64, x in -2.0..2.0f64) {
        let data = InitialData::new(vec![bump([0.0, 0.0, 0.0], 1.0, 1.0)], vec![bump([0.2, 0.0, 0.0], 0.8, 1.5)], 0);
        let pt = Vec3::new(x, 0.3, 0.0);
        let fwd = kirchhoff_eval(&data, t, &pt).unwrap();
        let bwd = kirchhoff_eval(&data.time_reversed(), t, &pt).unwrap();
        let pos = kirchhoff_eval(&InitialData::new(data.position.clone(), vec![], 0), t, &pt).unwrap();
        prop_assert!((fwd + bwd - pos * 2.0).norm() <= 1e-13);
    }
}

#[test]
fn time_zero_returns_initial_data() {
    let data = InitialData::new(vec![bump([0.0, 0.0, 0.0], 1.0, 1.0)], vec![bump([0.0, 0.0, 0.0], 1.0, 5.0)], 0);
    for x in [Vec3::zeros(), Vec3::new(0.3, 0.4, 0.0), Vec3::new(2.0, 0.0, 0.0)] {
        assert_eq!(kirchhoff_eval(&data, 0.0, &x).unwrap(), eval_initial(&data, &x).0);
    }
}

#[test]
fn low_orders_already_exact() {
    let data = InitialData::new(vec![bump([0.4, 0.1, -0.3], 0.9, 1.0)], vec![bump([-0.2, 0.0, 0.5], 0.6, -0.7)], 0);
    let coarse = Kirchhoff::new(QuadratureOrders::with_polar(4));
    let fine = Kirchhoff::new(QuadratureOrders::with_polar(40));
    for (t, x) in [(0.5, Vec3::new(1.0, 0.0, 0.0)), (1.3, Vec3::new(-0.4, 0.9, 0.2)), (2.2, Vec3::new(0.0, 0.0, -1.5))] {
        let a = coarse.eval(&data, t, &x).unwrap();
        let b = fine.eval(&data, t, &x).unwrap();
        assert!((a - b).norm() < 1e-13, "{a} vs {b}");
    }
}

#[test]
fn negative_time_is_rejected() {
    let data = InitialData::new(vec![bump([0.0, 0.0, 0.0], 1.0, 1.0)], vec![], 0);
    assert!(kirchhoff_eval(&data, -0.1, &Vec3::zeros()).is_err());
}
