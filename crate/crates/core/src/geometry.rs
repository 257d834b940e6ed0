//! Exact diameter of large point clouds.

use crate::linalg::Vec3;

const BRUTE_FORCE_LIMIT: usize = 1500;

/// Largest pairwise distance; `0` for fewer than two points.
///
/// Points are bucketed into cells; cell pairs are visited in decreasing order
/// of their bounding-box distance bound and the search stops once no
/// remaining pair can beat the best distance found.
pub fn diameter(points: &[Vec3]) -> f64 {
    if points.len() <= BRUTE_FORCE_LIMIT {
        return brute_force(points);
    }
    let (lo, hi) = bounds(points);
    let per_axis = ((points.len() as f64 / 64.0).cbrt().ceil() as usize).clamp(2, 16);
    let extent = hi - lo;
    let cell_of = |p: &Vec3| -> usize {
        let mut idx = 0;
        for k in 0..3 {
            let f = if extent[k] > 0.0 { (p[k] - lo[k]) / extent[k] } else { 0.0 };
            let c = ((f * per_axis as f64) as usize).min(per_axis - 1);
            idx = idx * per_axis + c;
        }
        idx
    };
    let mut cells: Vec<Vec<Vec3>> = vec![Vec::new(); per_axis.pow(3)];
    for p in points {
        cells[cell_of(p)].push(*p);
    }
    let cells: Vec<(Vec3, Vec3, Vec<Vec3>)> = cells
        .into_iter()
        .filter(|c| !c.is_empty())
        .map(|c| {
            let (l, h) = bounds(&c);
            (l, h, c)
        })
        .collect();

    // initial lower bound from axis and diagonal extremes
    let mut best = seed_lower_bound(points);

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..cells.len() {
        for j in i..cells.len() {
            let ub = box_max_distance(&cells[i].0, &cells[i].1, &cells[j].0, &cells[j].1);
            if ub > best {
                pairs.push((ub, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    for (ub, i, j) in pairs {
        if ub <= best {
            break;
        }
        for p in &cells[i].2 {
            for q in &cells[j].2 {
                let d = (p - q).norm();
                if d > best {
                    best = d;
                }
            }
        }
    }
    best
}

fn brute_force(points: &[Vec3]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            best = best.max((p - q).norm());
        }
    }
    best
}

fn bounds(points: &[Vec3]) -> (Vec3, Vec3) {
    let mut lo = Vec3::repeat(f64::INFINITY);
    let mut hi = Vec3::repeat(f64::NEG_INFINITY);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    (lo, hi)
}

fn box_max_distance(alo: &Vec3, ahi: &Vec3, blo: &Vec3, bhi: &Vec3) -> f64 {
    let mut sq = 0.0;
    for k in 0..3 {
        let d = (ahi[k] - blo[k]).abs().max((bhi[k] - alo[k]).abs());
        sq += d * d;
    }
    sq.sqrt()
}

fn seed_lower_bound(points: &[Vec3]) -> f64 {
    let directions = [
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, 1.0),
        Vec3::new(1.0, 1.0, -1.0),
        Vec3::new(-1.0, 1.0, 1.0),
    ];
    let mut extremes = Vec::with_capacity(2 * directions.len());
    for d in &directions {
        let mut min = (f64::INFINITY, points[0]);
        let mut max = (f64::NEG_INFINITY, points[0]);
        for p in points {
            let v = d.dot(p);
            if v < min.0 {
                min = (v, *p);
            }
            if v > max.0 {
                max = (v, *p);
            }
        }
        extremes.push(min.1);
        extremes.push(max.1);
    }
    brute_force(&extremes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_sets() {
        assert_eq!(diameter(&[]), 0.0);
        assert_eq!(diameter(&[Vec3::new(1.0, 2.0, 3.0)]), 0.0);
        assert_eq!(diameter(&[Vec3::zeros(), Vec3::new(0.0, 3.0, 4.0)]), 5.0);
    }

    #[test]
    fn sphere_surface() {
        let mut pts = Vec::new();
        for i in 0..60 {
            for j in 0..60 {
                let th = std::f64::consts::PI * (i as f64 + 0.5) / 60.0;
                let ph = 2.0 * std::f64::consts::PI * j as f64 / 60.0;
                pts.push(Vec3::new(th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()) * 2.0);
            }
        }
        assert!((diameter(&pts) - brute_force(&pts)).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn matches_brute_force(coords in prop::collection::vec(-5.0..5.0f64, 3 * 1600..3 * 2500)) {
            let pts: Vec<Vec3> = coords.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2] * 0.3)).collect();
            prop_assert_eq!(diameter(&pts), brute_force(&pts));
        }
    }
}
