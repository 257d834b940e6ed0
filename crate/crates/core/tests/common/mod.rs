#![allow(dead_code)]

use num_complex::Complex64;
use pointwave::bc_algebra::InteractionConfig;
use pointwave::free_wave::{BumpProfile, InitialData};
use pointwave::linalg::{CMatrix, Vec3};
use rand::Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| random_complex(rng));
    (&m + m.adjoint()) * c(0.5, 0.0)
}

/// Random matrix with condition number bounded by about 10.
pub fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = CMatrix::from_fn(n, n, |_, _| random_complex(rng) * 0.3);
    CMatrix::identity(n, n) + m * c(1.0 / n as f64, 0.0)
}

/// Well separated points on a line with jitter; pairwise distance at least 1.
pub fn spread_points<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec3> {
    (0..n)
        .map(|k| {
            Vec3::new(
                2.0 * k as f64 + rng.random_range(-0.4..0.4),
                rng.random_range(-0.4..0.4),
                rng.random_range(-0.4..0.4),
            )
        })
        .collect()
}

/// A random diagonal pair: column k is `(cos θ_k, sin θ_k)` times a positive scale.
pub fn random_diagonal_pair<R: Rng>(rng: &mut R, n: usize) -> (CMatrix, CMatrix) {
    let mut a = CMatrix::zeros(n, n);
    let mut b = CMatrix::zeros(n, n);
    for k in 0..n {
        let theta: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let scale: f64 = rng.random_range(0.5..2.0);
        a[(k, k)] = c(scale * theta.cos(), 0.0);
        b[(k, k)] = c(scale * theta.sin(), 0.0);
    }
    (a, b)
}

pub fn config(points: Vec<Vec3>, a: CMatrix, b: CMatrix) -> InteractionConfig {
    InteractionConfig::new(points, a, b).expect("valid dimensions")
}

pub fn bump(center: [f64; 3], radius: f64, amplitude: f64) -> BumpProfile {
    BumpProfile::new(Vec3::from(center), radius, c(amplitude, 0.0)).unwrap()
}

/// Local two-point scenario shared by several checks.
pub fn two_point(h: CMatrix) -> (InteractionConfig, InitialData) {
    let cfg = InteractionConfig::with_hermitian(vec![Vec3::zeros(), Vec3::new(10.0, 0.0, 0.0)], h).unwrap();
    let data = InitialData::new(vec![bump([-2.0, 0.0, 0.0], 0.5, 1.0)], vec![], 2);
    (cfg, data)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

const GL5_NODES: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683_1, 0.0, 0.538_469_310_105_683_1, 0.906_179_845_938_664];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// 5-point Gauss-Legendre on `[a, b]`.
pub fn gl5<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS)
        .map(|(x, w)| f(mid + half * x) * (w * half))
        .sum()
}

/// `ζ(t_i) = 4π ∫₀^{t_i} e^{-4πα(t_i - s)} f(s) ds` on `t_i = i·h`, marched
/// interval by interval with composite 5-point Gauss-Legendre on `sub` pieces.
pub fn duhamel_oracle<F: Fn(f64) -> Complex64>(alpha: f64, f: F, step: f64, nodes: usize, sub: usize) -> Vec<Complex64> {
    let k = 4.0 * std::f64::consts::PI * alpha;
    let mut out = vec![c(0.0, 0.0)];
    let mut zeta = c(0.0, 0.0);
    for i in 1..nodes {
        let t0 = (i - 1) as f64 * step;
        let t1 = i as f64 * step;
        let mut inc = c(0.0, 0.0);
        for m in 0..sub {
            let a = t0 + step * m as f64 / sub as f64;
            let b = t0 + step * (m + 1) as f64 / sub as f64;
            inc += gl5(|s| f(s) * (-k * (t1 - s)).exp(), a, b);
        }
        zeta = zeta * (-k * step).exp() + inc * (4.0 * std::f64::consts::PI);
        out.push(zeta);
    }
    out
}
