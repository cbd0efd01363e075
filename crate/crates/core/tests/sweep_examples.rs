mod common;

use common::*;
use faer::Mat;
use scale_hodge::{
    betti_numbers, betti_sweep, build_witness_complex, cluster_series, cluster_sv_decay, corestriction_rank,
    gen_circle, gen_square, gen_tower_complex, harmonic_basis, hodge_report,
    sweep::{cluster_f_term, cluster_g_term},
    ComplexMode, HodgeOptions, Kernel,
};

fn opts() -> HodgeOptions {
    HodgeOptions::default()
}

#[test]
fn circle_below_spacing_is_discrete() {
    let space = gen_circle(64, 1.0).unwrap();
    let c = build_witness_complex(&space, 0.05, 3).unwrap();
    assert_eq!(betti_numbers(&c, &Kernel::constant(), &opts()).unwrap()[..2], [64, 0]);
}

#[test]
fn circle_at_moderate_scale_has_one_loop() {
    let space = gen_circle(64, 1.0).unwrap();
    let c = build_witness_complex(&space, 0.35, 3).unwrap();
    let report = hodge_report(&c, &Kernel::constant(), &opts(), Some(2)).unwrap();
    assert_eq!(report.betti(), vec![1, 1, 0]);
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
}

#[test]
fn circle_loop_survives_corestriction() {
    let space = gen_circle(64, 1.0).unwrap();
    let r = corestriction_rank(&space, 0.35, 0.2, 1, &Kernel::constant(), &opts()).unwrap();
    assert_eq!((r.dim_h_alpha, r.dim_h_beta, r.rank), (1, 1, 1));
}

#[test]
fn square_sweep_profile() {
    let space = gen_square();
    let p = betti_sweep(&space, &[0.5, 1.0, 1.5], 2, ComplexMode::Witness, &Kernel::constant(), &opts(), 1000).unwrap();
    assert_eq!(p.block(0.5), vec![Some(4), Some(0), Some(0)]);
    assert_eq!(p.block(1.0), vec![Some(1), Some(0), Some(1)]);
    assert_eq!(p.block(1.5), vec![Some(1), Some(0), Some(0)]);
    let mut csv = Vec::new();
    p.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("alpha,degree,betti,simplices\n"));
    assert!(text.contains("\n1,2,1,4\n"));
}

#[test]
fn sweep_marks_capped_scales() {
    let space = gen_circle(16, 1.0).unwrap();
    let p = betti_sweep(&space, &[0.1, 3.0], 2, ComplexMode::Witness, &Kernel::constant(), &opts(), 200).unwrap();
    assert_eq!(p.block(0.1), vec![Some(16), Some(0), Some(0)]);
    assert!(p.rows.iter().filter(|r| r.alpha == Some(3.0)).all(|r| r.truncated && r.betti.is_none()));
    assert!(!p.warnings.is_empty());
}

#[test]
fn sweep_rejects_unsorted_scales() {
    let space = gen_square();
    assert!(betti_sweep(&space, &[1.0, 0.5], 1, ComplexMode::Rips, &Kernel::constant(), &opts(), 100).is_err());
}

#[test]
fn series_terms_and_sums() {
    for k in 1..40 {
        assert!((cluster_f_term(1.0, k) - 3.0).abs() < 1e-12);
    }
    assert_eq!(cluster_g_term(1.0, 5), 0.0);
    let a = cluster_series(0.5, 500).unwrap();
    assert!(a.converged_f_at.unwrap() < 500);
    // Geometric sum 3·Σ 4^{-k/2} = 3/(2−1) at λ = 1/2.
    assert!((a.norm_f_sq - 3.0).abs() < 1e-12);
    let gs: Vec<f64> =
        [0.9, 0.99, 0.999].iter().map(|&l| cluster_series(l, 500).unwrap().norm_g1_minus_glambda_sq).collect();
    assert!(gs[0] > gs[1] && gs[1] > gs[2]);
    assert!(gs[2] < 1e-4);
    assert!(cluster_series(1.5, 10).is_err());
}

#[test]
fn cluster_singular_values_are_positive_and_decreasing() {
    let rows = cluster_sv_decay(&[2, 3, 4], &opts()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].smallest_positive_sv <= w[0].smallest_positive_sv);
    }
    assert!(rows.iter().all(|r| r.smallest_positive_sv > 0.0 && r.smallest_positive_sv.is_finite()));
}

/// The boundary of each level's tetrahedron is a 2-cycle; their classes are
/// independent, detected by pairing against a harmonic basis.
#[test]
fn tower_level_spheres_are_independent() {
    for n in 1..=4 {
        let c = gen_tower_complex(n).unwrap();
        let h = harmonic_basis(&c, 2, &Kernel::constant(), &opts()).unwrap();
        let d1 = integer_coboundary(&c, 1);
        let mut pairing = Mat::<f64>::zeros(n, h.dim());
        for r in 0..n {
            let [a, b, cc, d] = [r, n + r, 2 * n + r, 3 * n + r];
            let faces = [(vec![b, cc, d], 1.0), (vec![a, cc, d], -1.0), (vec![a, b, d], 1.0), (vec![a, b, cc], -1.0)];
            let mut z = vec![0.0; c.count(2)];
            for (s, sign) in faces {
                z[c.index_of(&s).expect("level face present")] = sign;
            }
            let mut bz = vec![0.0; c.count(1)];
            for (row, zv) in d1.iter().zip(&z) {
                for &(e, v) in row {
                    bz[e] += v as f64 * zv;
                }
            }
            assert!(bz.iter().all(|&x| x == 0.0), "level {r} sphere is not a cycle");
            for (j, g) in h.basis.iter().enumerate() {
                pairing[(r, j)] = g.coeffs.iter().zip(&z).map(|(a, b)| a * b).sum();
            }
        }
        let sv = pairing.singular_values().unwrap();
        let max = sv.iter().copied().fold(0.0, f64::max);
        assert_eq!(sv.iter().filter(|&&s| s > 1e-8 * max).count(), n);
    }
}

#[test]
fn tower_betti_matches_exact_oracle() {
    for n in 1..=3 {
        let c = gen_tower_complex(n).unwrap();
        let spectral = betti_numbers(&c, &Kernel::constant(), &opts()).unwrap();
        assert_eq!(spectral, exact_betti(&c, c.top_degree()));
        assert_eq!(spectral[2], 4 * n * n + 3 - 6 * n);
    }
}
