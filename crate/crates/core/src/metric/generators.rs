use std::collections::BTreeSet;
use std::f64::consts::TAU;

use itertools::iproduct;

use super::{MeasureSpec, MetricKind, MetricMeasureSpace, SpaceOptions};
use crate::complex::{PrescribedComplex, ScaleComplex};
use crate::error::{Error, Result};
use crate::operators::Cochain;

/// Largest truncation accepted by [`gen_cluster_space`].
pub const CLUSTER_MAX_N: usize = 20;

/// Corners A, B, C, D of the unit square, in cyclic order.
pub fn gen_square() -> MetricMeasureSpace {
    let coords = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
    let labels = ["A", "B", "C", "D"].iter().map(|s| s.to_string()).collect();
    MetricMeasureSpace::from_labeled_points(
        labels,
        coords,
        MetricKind::Euclidean,
        MeasureSpec::Uniform,
        SpaceOptions::default(),
    )
    .expect("square is a valid metric space")
}

/// `n` equally spaced points on a circle with the geodesic metric.
///
/// Distances are computed from index differences, `radius * (h * k)` with
/// `h = 2π/n`, so every distance is an exact multiple of one spacing.
pub fn gen_circle(n: usize, radius: f64) -> Result<MetricMeasureSpace> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("circle needs at least 3 points, got {n}")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("invalid radius {radius}")));
    }
    let h = TAU / n as f64;
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let k = i.abs_diff(j).min(n - i.abs_diff(j));
            dist[i * n + j] = radius * (h * k as f64);
        }
    }
    let coords = (0..n).map(|i| vec![h * i as f64]).collect();
    MetricMeasureSpace::assemble(
        (0..n).map(|i| i.to_string()).collect(),
        dist,
        MeasureSpec::Uniform,
        Some(coords),
        Some(MetricKind::CircleGeodesic { radius }),
        SpaceOptions { normalize: true, triangle_slack: 1e-12, comparison_slack: 0.0 },
    )
}

/// The piecewise test function on `[-1, 1]` with jumps at `±2α`.
///
/// The right branch is `(b−a)/(8α) + b`, mirroring the left one.
pub fn interval_test_function(x: f64, alpha: f64, a: f64, b: f64) -> f64 {
    const EPS: f64 = 1e-12;
    if x < -2.0 * alpha - EPS {
        (a - b) / (8.0 * alpha) + a
    } else if x <= 2.0 * alpha + EPS {
        (b - a) / (4.0 * alpha) * (x - 2.0 * alpha) + b
    } else {
        (b - a) / (8.0 * alpha) + b
    }
}

/// Uniform grid on `[-1, 1]` with mass `2/n` per point and an extra unit
/// atom at 0, together with the test function sampled on the grid.
pub fn gen_interval_with_atom(n_grid: usize, alpha: f64, a: f64, b: f64) -> Result<(MetricMeasureSpace, Cochain)> {
    if a == b {
        return Err(Error::InvalidArgument("a and b must differ".into()));
    }
    if !(alpha > 0.0 && alpha < 0.25) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1/4), got {alpha}")));
    }
    if n_grid < 3 || n_grid.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("grid size must be odd and >= 3, got {n_grid}")));
    }
    let m = (n_grid - 1) as f64;
    let xs: Vec<f64> = (0..n_grid).map(|i| (2.0 * i as f64 - m) / m).collect();
    let mut measure = vec![2.0 / n_grid as f64; n_grid];
    measure[n_grid / 2] += 1.0;
    let values = xs.iter().map(|&x| interval_test_function(x, alpha, a, b)).collect();
    let space = MetricMeasureSpace::from_points(
        xs.into_iter().map(|x| vec![x]).collect(),
        MetricKind::L1,
        MeasureSpec::Weights(measure),
        SpaceOptions { normalize: false, triangle_slack: 1e-12, comparison_slack: 1e-9 },
    )?;
    Ok((space, Cochain::new(0, values)))
}

/// Finite truncation of the three-cluster space in ℓ¹.
///
/// Points are `x_1..x_N`, `y_1..y_{2N+2}`, `z_1..z_N` with masses `2^-k`,
/// `2^(-2^n)` and `2^-k`. Masses below the smallest subnormal are clamped to it.
pub fn gen_cluster_space(n: usize, alpha: f64) -> Result<MetricMeasureSpace> {
    if !(1..=CLUSTER_MAX_N).contains(&n) {
        return Err(Error::InvalidArgument(format!("cluster truncation must lie in 1..={CLUSTER_MAX_N}, got {n}")));
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("cluster alpha must exceed 1, got {alpha}")));
    }
    let width = 2 * n + 3;
    let ny = 2 * n + 2;
    let mut coords = Vec::with_capacity(2 * n + ny);
    let mut labels = Vec::with_capacity(coords.capacity());
    let mut measure = Vec::with_capacity(coords.capacity());

    for k in 1..=n {
        let mut v = vec![0.0; width];
        let idx = [2 * k, 2 * k + 1, 2 * k + 2];
        let s: f64 = idx.iter().map(|&i| 1.0 / i as f64).sum();
        v[0] = -(alpha + 1.0 / (10.0 * k as f64) - s);
        for i in idx {
            v[i] = 1.0 / i as f64;
        }
        coords.push(v);
        labels.push(format!("x_{k}"));
        measure.push(pow2_neg(k as u64));
    }
    for m in 1..=ny {
        let mut v = vec![0.0; width];
        v[m] = 1.0 / m as f64;
        coords.push(v);
        labels.push(format!("y_{m}"));
        measure.push(pow2_neg(1u64.checked_shl(m as u32).unwrap_or(u64::MAX)));
    }
    for k in 1..=n {
        let mut v = vec![0.0; width];
        let idx = [2 * k - 1, 2 * k, 2 * k + 1];
        let s: f64 = idx.iter().map(|&i| 1.0 / i as f64).sum();
        v[0] = alpha + 1.0 / (10.0 * k as f64) - s;
        for i in idx {
            v[i] = 1.0 / i as f64;
        }
        coords.push(v);
        labels.push(format!("z_{k}"));
        measure.push(pow2_neg(k as u64));
    }
    MetricMeasureSpace::from_labeled_points(
        labels,
        coords,
        MetricKind::L1,
        MeasureSpec::Weights(measure),
        SpaceOptions { normalize: false, triangle_slack: 1e-12, comparison_slack: 0.0 },
    )
}

/// `2^-e`, clamped to the smallest positive subnormal.
fn pow2_neg(e: u64) -> f64 {
    if e <= 1022 {
        f64::from_bits((1023 - e) << 52)
    } else if e <= 1074 {
        f64::from_bits(1u64 << (1074 - e))
    } else {
        f64::from_bits(1)
    }
}

/// The stacked-square complex on `{A,B,C,D} × {1, 1/2, …, 1/N}`.
///
/// Vertex `L_r` (letter `L`, level `r` in `1..=N`) has index
/// `letter * N + (r - 1)`. Every listed pattern is instantiated over all
/// level tuples; degenerate instances are dropped.
pub fn gen_tower_complex(n: usize) -> Result<ScaleComplex> {
    if n < 1 {
        return Err(Error::InvalidArgument("tower needs at least one level".into()));
    }
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;
    let v = |letter: usize, level: usize| letter * n + level;
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut add = |vs: &[(usize, usize)]| {
        let mut s: Vec<usize> = vs.iter().map(|&(l, r)| v(l, r)).collect();
        s.sort_unstable();
        if s.windows(2).all(|w| w[0] < w[1]) {
            out.insert(s);
        }
    };

    for (r, s) in iproduct!(0..n, 0..n) {
        for (x, y) in [(A, B), (B, C), (C, D), (A, D)] {
            add(&[(x, r), (y, s)]);
        }
        for x in [A, B, C, D] {
            add(&[(x, r), (x, s)]);
        }
        add(&[(B, r), (D, r)]);
        add(&[(A, r), (C, r)]);
    }
    for (r, s, t) in iproduct!(0..n, 0..n, 0..n) {
        add(&[(A, r), (B, s), (C, r)]);
        add(&[(A, s), (B, r), (D, r)]);
        add(&[(A, r), (C, r), (D, s)]);
        add(&[(B, r), (C, s), (D, r)]);
        add(&[(A, r), (B, s), (B, r)]);
        add(&[(B, r), (C, s), (C, r)]);
        add(&[(C, r), (D, s), (D, r)]);
        add(&[(A, r), (D, s), (D, r)]);
        add(&[(A, s), (A, r), (B, s)]);
        add(&[(B, s), (B, r), (C, s)]);
        add(&[(C, s), (C, r), (D, s)]);
        add(&[(A, s), (A, r), (D, s)]);
        for x in [A, B, C, D] {
            add(&[(x, r), (x, s), (x, t)]);
        }
    }
    for (r, s, t, u) in iproduct!(0..n, 0..n, 0..n, 0..n) {
        add(&[(A, r), (B, s), (B, t), (C, r)]);
        add(&[(A, s), (A, t), (B, r), (D, r)]);
        add(&[(A, r), (C, r), (D, s), (D, t)]);
        add(&[(B, r), (C, s), (C, t), (D, r)]);
        add(&[(A, r), (B, t), (B, s), (B, r)]);
        add(&[(B, r), (C, t), (C, s), (C, r)]);
        add(&[(C, r), (D, t), (D, s), (D, r)]);
        add(&[(A, r), (D, t), (D, s), (D, r)]);
        add(&[(A, t), (A, s), (A, r), (B, s)]);
        add(&[(B, t), (B, s), (B, r), (C, s)]);
        add(&[(C, t), (C, s), (C, r), (D, s)]);
        add(&[(A, t), (A, s), (A, r), (D, s)]);
        for x in [A, B, C, D] {
            add(&[(x, r), (x, s), (x, t), (x, u)]);
        }
    }

    let vertices = ["A", "B", "C", "D"].iter().flat_map(|l| (1..=n).map(move |r| format!("{l}_{r}"))).collect();
    let mut pc = PrescribedComplex::new(vertices);
    for s in out {
        pc.push(s);
    }
    ScaleComplex::from_prescribed(&pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_space;

    #[test]
    fn square_distances() {
        let s = gen_square();
        assert_eq!(s.dist(1, 3), 2f64.sqrt());
        assert_eq!(s.measure(), &[0.25; 4]);
        assert!(validate_space(&s).is_clean());
    }

    #[test]
    fn circle_spacing() {
        let s = gen_circle(4, 1.0).unwrap();
        assert_eq!(s.diameter(), std::f64::consts::PI);
        let s = gen_circle(64, 1.0).unwrap();
        assert_eq!(s.dist(0, 1), TAU / 64.0);
        assert_eq!(s.dist(0, 63), TAU / 64.0);
        assert!(gen_circle(2, 1.0).is_err());
    }

    #[test]
    fn interval_values() {
        let (s, f) = gen_interval_with_atom(401, 0.2, 0.0, 1.0).unwrap();
        assert_eq!(f.coeffs[0], -0.625);
        assert!((f.coeffs[200] - 0.5).abs() < 1e-15);
        assert!((s.total_mass() - 3.0).abs() < 1e-12);
        assert!(gen_interval_with_atom(401, 0.2, 1.0, 1.0).is_err());
        assert!(gen_interval_with_atom(401, 0.25, 0.0, 1.0).is_err());
    }

    #[test]
    fn cluster_adjacency_n3() {
        let s = gen_cluster_space(3, 10.0).unwrap();
        let idx = |l: &str| s.labels().iter().position(|x| x == l).unwrap();
        assert!(s.dist(idx("x_1"), idx("y_2")) < 10.0);
        assert!(s.dist(idx("x_1"), idx("y_4")) < 10.0);
        assert!(s.dist(idx("x_1"), idx("y_5")) >= 10.0);
        for k in 1..=3usize {
            for m in 1..=8usize {
                let near_x = s.dist(idx(&format!("x_{k}")), idx(&format!("y_{m}"))) < 10.0;
                let near_z = s.dist(idx(&format!("z_{k}")), idx(&format!("y_{m}"))) < 10.0;
                assert_eq!(near_x, (2 * k..=2 * k + 2).contains(&m), "x_{k} y_{m}");
                assert_eq!(near_z, (2 * k - 1..=2 * k + 1).contains(&m), "z_{k} y_{m}");
            }
            for j in 1..=3 {
                assert!(s.dist(idx(&format!("x_{k}")), idx(&format!("z_{j}"))) > 10.0);
            }
        }
        assert_eq!(s.measure()[idx("y_3")], 2f64.powi(-8));
        let xs: Vec<usize> = (1..=3).map(|k| idx(&format!("x_{k}"))).collect();
        for &i in &xs {
            for &j in &xs {
                assert!(s.dist(i, j) < 10.0);
            }
        }
        let expected: f64 =
            2.0 * (1..=3).map(|k| 0.5f64.powi(k)).sum::<f64>() + (1..=8).map(|n| 0.5f64.powi(1 << n)).sum::<f64>();
        assert_eq!(s.total_mass(), expected);
    }

    #[test]
    fn pow2_neg_exact() {
        assert_eq!(pow2_neg(1), 0.5);
        assert_eq!(pow2_neg(1024), 2f64.powi(-512) * 2f64.powi(-512));
        assert_eq!(pow2_neg(1074), f64::from_bits(1));
        assert_eq!(pow2_neg(4096), f64::from_bits(1));
    }

    #[test]
    fn cluster_masses_clamped() {
        let s = gen_cluster_space(20, 10.0).unwrap();
        assert!(s.measure().iter().all(|&m| m > 0.0));
        assert!(gen_cluster_space(21, 10.0).is_err());
        assert!(gen_cluster_space(0, 10.0).is_err());
    }

    #[test]
    fn tower_small() {
        let t = gen_tower_complex(1).unwrap();
        assert_eq!(t.counts(), vec![4, 6, 4]);
        let t2 = gen_tower_complex(2).unwrap();
        // A_r, A_s, B_r, D_r with r = 1, s = 2: indices 0, 1, 2, 6.
        assert!(t2.contains(&[0, 1, 2, 6]));
        // A_1, B_1, C_1, D_1
        assert!(!t2.contains(&[0, 2, 4, 6]));
    }
}
