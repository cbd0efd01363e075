#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scale_hodge::{
    operators::{coboundary_matrix, weighted_inner},
    Cochain, Kernel, MeasureSpec, MetricKind, MetricMeasureSpace, ScaleComplex, SpaceOptions,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random points in the unit cube under a Euclidean or ℓ¹ metric, with
/// random positive masses normalized to one.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> MetricMeasureSpace {
    let k = rng.gen_range(1..=3);
    let coords: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.gen::<f64>()).collect()).collect();
    let metric = if rng.gen_bool(0.5) { MetricKind::Euclidean } else { MetricKind::L1 };
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    MetricMeasureSpace::from_points(
        coords,
        metric,
        MeasureSpec::Weights(weights),
        SpaceOptions { normalize: true, triangle_slack: 1e-12, comparison_slack: 0.0 },
    )
    .expect("random points are distinct almost surely")
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn random_cochain(rng: &mut ChaCha8Rng, complex: &ScaleComplex, degree: usize) -> Cochain {
    Cochain::new(degree, random_vec(rng, complex.count(degree)))
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `max|a − b| / max(max|b|, 1e-300)`.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().chain(a).map(|x| x.abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        0.0
    } else {
        max_abs_diff(a, b) / scale
    }
}

pub fn wnorm(complex: &ScaleComplex, degree: usize, v: &[f64]) -> f64 {
    weighted_inner(complex, degree, v, v).unwrap().sqrt()
}

/// Rank over ℚ of a sparse integer matrix given as rows of `(col, value)`,
/// by exact row reduction.
pub fn rational_rank(rows: &[Vec<(usize, i64)>]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for row in rows {
        let mut r: BTreeMap<usize, BigRational> = row
            .iter()
            .filter(|(_, v)| *v != 0)
            .map(|&(c, v)| (c, BigRational::from_integer(BigInt::from(v))))
            .collect();
        while let Some((&lead, lead_val)) = r.iter().next() {
            let Some(p) = pivots.get(&lead) else { break };
            let factor = lead_val.clone() / p[&lead].clone();
            for (c, v) in p {
                let e = r.entry(*c).or_insert_with(BigRational::zero);
                *e -= factor.clone() * v;
                if e.is_zero() {
                    r.remove(c);
                }
            }
        }
        if let Some((&lead, _)) = r.iter().next() {
            pivots.insert(lead, r);
        }
    }
    pivots.len()
}

/// Integer coboundary rows `τ ↦ [(σ, ±1)]` with `K ≡ 1`.
pub fn integer_coboundary(complex: &ScaleComplex, degree: usize) -> Vec<Vec<(usize, i64)>> {
    let d = coboundary_matrix(complex, degree, &Kernel::constant()).unwrap();
    d.matrix.outer_iterator().map(|row| row.iter().map(|(c, v)| (c, v.round() as i64)).collect()).collect()
}

/// Betti numbers `0..=top` from exact ranks of the integer coboundaries.
pub fn exact_betti(complex: &ScaleComplex, top: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=top).map(|d| rational_rank(&integer_coboundary(complex, d))).collect();
    (0..=top).map(|d| complex.count(d) - ranks[d] - if d == 0 { 0 } else { ranks[d - 1] }).collect()
}

/// Connected components of the 1-skeleton by union–find.
pub fn components(complex: &ScaleComplex) -> usize {
    let n = complex.n_vertices();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for e in complex.level(1).unwrap_or(&[]) {
        let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
        if a != b {
            parent[a] = b;
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}
