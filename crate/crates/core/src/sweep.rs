//! Multi-scale experiments: Betti profiles, corestriction ranks, and the
//! cluster and interval diagnostics.

use std::io::Write;

use faer::Mat;
use serde::Serialize;

use crate::complex::{build_complex, build_witness_complex, ComplexMode, ScaleComplex};
use crate::error::{Error, Result};
use crate::hodge::{harmonic_basis, harmonic_representative_in, hodge_report, HodgeOptions};
use crate::metric::{gen_cluster_space, gen_interval_with_atom, interval_test_function, MetricMeasureSpace};
use crate::operators::{
    explicit_boundary_of_coboundary, scaled_coboundary, simplex_weights, to_dense, Cochain, Kernel,
};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BettiRow {
    pub alpha: Option<f64>,
    pub degree: usize,
    /// `None` when the complex hit the simplex cap.
    pub betti: Option<usize>,
    pub simplices: usize,
    pub truncated: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BettiProfile {
    pub rows: Vec<BettiRow>,
    pub warnings: Vec<String>,
}

impl BettiProfile {
    /// Betti numbers at the `k`-th scale of the sweep.
    pub fn block(&self, alpha: f64) -> Vec<Option<usize>> {
        self.rows.iter().filter(|r| r.alpha == Some(alpha)).map(|r| r.betti).collect()
    }

    /// `alpha,degree,betti,simplices`; truncated rows leave `betti` empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["alpha", "degree", "betti", "simplices"])?;
        for r in &self.rows {
            w.write_record([
                r.alpha.map(|a| a.to_string()).unwrap_or_default(),
                r.degree.to_string(),
                r.betti.map(|b| b.to_string()).unwrap_or_default(),
                r.simplices.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Appends the rows for one complex, degrees `0..=max_dim`.
pub fn profile_rows(
    complex: &ScaleComplex,
    max_dim: usize,
    kernel: &Kernel,
    opts: &HodgeOptions,
    profile: &mut BettiProfile,
) -> Result<()> {
    let top = max_dim.min(complex.top_degree());
    let report = hodge_report(complex, kernel, opts, Some(top))?;
    profile.warnings.extend(report.warnings.iter().cloned());
    for d in 0..=max_dim {
        let betti = report.degrees.get(d).map(|r| r.betti);
        profile.rows.push(BettiRow {
            alpha: complex.alpha(),
            degree: d,
            betti: betti.or(if complex.is_complete() { Some(0) } else { None }),
            simplices: complex.count(d),
            truncated: betti.is_none() && !complex.is_complete(),
        });
    }
    Ok(())
}

/// One complex and Hodge report per scale; rows follow the input order.
pub fn betti_sweep(
    space: &MetricMeasureSpace,
    alphas: &[f64],
    max_dim: usize,
    mode: ComplexMode,
    kernel: &Kernel,
    opts: &HodgeOptions,
    cap: usize,
) -> Result<BettiProfile> {
    if alphas.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("alphas must be sorted ascending".into()));
    }
    let mut profile = BettiProfile::default();
    for &alpha in alphas {
        match build_complex(space, alpha, max_dim + 1, mode, cap) {
            Ok(c) => profile_rows(&c, max_dim, kernel, opts, &mut profile)?,
            Err(Error::SimplexCapExceeded { cap, dim }) => {
                profile.warnings.push(format!("alpha {alpha}: simplex cap {cap} exceeded in dimension {dim}"));
                profile.rows.extend((0..=max_dim).map(|degree| BettiRow {
                    alpha: Some(alpha),
                    degree,
                    betti: None,
                    simplices: 0,
                    truncated: true,
                }));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(profile)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorestrictionResult {
    pub alpha: f64,
    pub beta: f64,
    pub degree: usize,
    pub rank: usize,
    pub dim_h_alpha: usize,
    pub dim_h_beta: usize,
}

/// Rank of the map `H_α → H_β` induced by restricting cochains from the
/// witness complex at `α` to the one at `β ≤ α`.
pub fn corestriction_rank(
    space: &MetricMeasureSpace,
    alpha: f64,
    beta: f64,
    degree: usize,
    kernel: &Kernel,
    opts: &HodgeOptions,
) -> Result<CorestrictionResult> {
    if !(beta <= alpha) {
        return Err(Error::InvalidArgument(format!("beta {beta} must not exceed alpha {alpha}")));
    }
    let big = build_witness_complex(space, alpha, degree + 1)?;
    let small = build_witness_complex(space, beta, degree + 1)?;
    let h_alpha = harmonic_basis(&big, degree, kernel, opts)?;
    let h_beta = harmonic_basis(&small, degree, kernel, opts)?;
    let (da, db) = (h_alpha.dim(), h_beta.dim());
    if da == 0 || db == 0 {
        return Ok(CorestrictionResult { alpha, beta, degree, rank: 0, dim_h_alpha: da, dim_h_beta: db });
    }

    let simplices = small.require_level(degree, degree)?;
    let positions = simplices
        .iter()
        .map(|s| big.index_of(s).ok_or_else(|| Error::SimplexNotFound(s.clone())))
        .collect::<Result<Vec<_>>>()?;
    let w = simplex_weights(&small, degree)?;
    let mut m = Mat::<f64>::zeros(db, da);
    for (i, h) in h_alpha.basis.iter().enumerate() {
        let restricted = Cochain::new(degree, positions.iter().map(|&p| h.coeffs[p]).collect());
        let rep = harmonic_representative_in(&small, &h_beta, &restricted, kernel, 1e-8)?;
        for (j, g) in h_beta.basis.iter().enumerate() {
            m[(j, i)] = rep.coeffs.iter().zip(&g.coeffs).zip(&w).map(|((a, b), w)| a * b * w).sum();
        }
    }
    let sv = m.singular_values().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > opts.rank_tol * max.max(1.0)).count();
    Ok(CorestrictionResult { alpha, beta, degree, rank, dim_h_alpha: da, dim_h_beta: db })
}

/// `k`-th term of `‖f_λ‖²`: `2(2^{2λk}2^{−2k} + 2^{2λk}2^{−2k−1})`.
pub fn cluster_f_term(lambda: f64, k: usize) -> f64 {
    let k = k as f64;
    2.0 * ((2.0 * lambda * k - 2.0 * k).exp2() + (2.0 * lambda * k - 2.0 * k - 1.0).exp2())
}

/// `k`-th term of `‖g₁ − g_λ‖²`: `6|2^{k−1} − 2^{λk}(1 − 2^{−λ})|² 2^{1−3k}`.
pub fn cluster_g_term(lambda: f64, k: usize) -> f64 {
    let kf = k as f64;
    let diff = (kf - 1.0).exp2() - (lambda * kf).exp2() * (1.0 - (-lambda).exp2());
    6.0 * diff * diff * (1.0 - 3.0 * kf).exp2()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesResult {
    pub lambda: f64,
    pub k_max: usize,
    pub norm_f_sq: f64,
    pub norm_g1_minus_glambda_sq: f64,
    /// Bound on the omitted tail of the `f` series (infinite when divergent).
    pub tail_f: f64,
    pub tail_g: f64,
    /// First `K` whose tail bound is below `1e−15`.
    pub converged_f_at: Option<usize>,
    pub converged_g_at: Option<usize>,
}

const SERIES_TOL: f64 = 1e-15;

fn f_tail(lambda: f64, k: usize) -> f64 {
    let rho = (2.0 * lambda - 2.0).exp2();
    if rho >= 1.0 {
        f64::INFINITY
    } else {
        cluster_f_term(lambda, k + 1) / (1.0 - rho)
    }
}

/// `|2^{k−1} − 2^{λk}(1−2^{−λ})| ≤ 2^k` gives a tail bound `48 · 2^{−K}`.
fn g_tail(k: usize) -> f64 {
    48.0 * (-(k as f64)).exp2()
}

/// Partial sums of the two cluster-space series up to `k_max`.
pub fn cluster_series(lambda: f64, k_max: usize) -> Result<SeriesResult> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut f = 0.0;
    let mut g = 0.0;
    let mut converged_f_at = None;
    let mut converged_g_at = None;
    for k in 1..=k_max {
        f += cluster_f_term(lambda, k);
        g += cluster_g_term(lambda, k);
        if converged_f_at.is_none() && f_tail(lambda, k) < SERIES_TOL {
            converged_f_at = Some(k);
        }
        if converged_g_at.is_none() && g_tail(k) < SERIES_TOL {
            converged_g_at = Some(k);
        }
    }
    Ok(SeriesResult {
        lambda,
        k_max,
        norm_f_sq: f,
        norm_g1_minus_glambda_sq: g,
        tail_f: f_tail(lambda, k_max),
        tail_g: g_tail(k_max),
        converged_f_at,
        converged_g_at,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub edges: usize,
    pub triangles: usize,
    pub smallest_positive_sv: f64,
    pub largest_sv: f64,
}

fn cluster_of(label: &str) -> char {
    label.chars().next().unwrap_or('?')
}

/// Smallest positive singular value of the weighted `δ¹` on the cluster
/// space with cluster-internal simplices removed.
pub fn cluster_sv_decay(ns: &[usize], opts: &HodgeOptions) -> Result<Vec<DecayRow>> {
    ns.iter().map(|&n| cluster_sv(n, opts)).collect()
}

fn cluster_sv(n: usize, opts: &HodgeOptions) -> Result<DecayRow> {
    let alpha = 10.0;
    let space = gen_cluster_space(n, alpha)?;
    let complex = build_witness_complex(&space, alpha, 2)?;
    let labels = complex.labels();
    let mixed = |s: &[usize]| s.iter().any(|&v| cluster_of(&labels[v]) != cluster_of(&labels[s[0]]));
    let keep_edges: Vec<usize> = (0..complex.count(1)).filter(|&i| mixed(&complex.level(1).unwrap()[i])).collect();
    let keep_tris: Vec<usize> = (0..complex.count(2)).filter(|&i| mixed(&complex.level(2).unwrap()[i])).collect();
    if keep_edges.len().max(keep_tris.len()) > opts.dense_limit {
        return Err(Error::TooLargeForDense {
            degree: 1,
            size: keep_edges.len().max(keep_tris.len()),
            limit: opts.dense_limit,
        });
    }
    let full = to_dense(&scaled_coboundary(&complex, 1, &Kernel::constant())?);
    let reduced = Mat::from_fn(keep_tris.len(), keep_edges.len(), |r, c| full[(keep_tris[r], keep_edges[c])]);
    let sv = reduced.singular_values().map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let max = sv.iter().copied().fold(0.0, f64::max);
    let thr = opts.rank_tol * max.max(1.0);
    let smallest = sv.iter().copied().filter(|&s| s > thr).fold(f64::INFINITY, f64::min);
    Ok(DecayRow {
        n,
        edges: keep_edges.len(),
        triangles: keep_tris.len(),
        smallest_positive_sv: smallest,
        largest_sv: max,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalRow {
    pub n: usize,
    pub jump_f: f64,
    pub jump_df: f64,
}

/// Jumps of `f` and of `Δ₀f` (slice formula on the witness complex) across
/// the branch points `±2α` of the test function.
pub fn interval_regularity_experiment(grids: &[usize], alpha: f64, a: f64, b: f64) -> Result<Vec<IntervalRow>> {
    grids.iter().map(|&n| interval_row(n, alpha, a, b)).collect()
}

fn interval_row(n: usize, alpha: f64, a: f64, b: f64) -> Result<IntervalRow> {
    let (space, f) = gen_interval_with_atom(n, alpha, a, b)?;
    let complex = build_witness_complex(&space, alpha, 1)?;
    let df = explicit_boundary_of_coboundary(&complex, &f)?;
    let xs: Vec<f64> = space.coords().expect("grid has coordinates").iter().map(|p| p[0]).collect();
    let branch = |x: f64| {
        let v = interval_test_function(x, alpha, a, b);
        if v == interval_test_function(-1.0, alpha, a, b) {
            0
        } else if v == interval_test_function(1.0, alpha, a, b) {
            2
        } else {
            1
        }
    };
    let mut jump_f: f64 = 0.0;
    let mut jump_df: f64 = 0.0;
    let mut crossings = 0;
    for i in 0..n - 1 {
        if branch(xs[i]) != branch(xs[i + 1]) {
            crossings += 1;
            jump_f = jump_f.max((f.coeffs[i + 1] - f.coeffs[i]).abs());
            jump_df = jump_df.max((df.coeffs[i + 1] - df.coeffs[i]).abs());
        }
    }
    if crossings < 2 {
        return Err(Error::InvalidArgument(format!("grid of {n} points does not straddle ±2α")));
    }
    Ok(IntervalRow { n, jump_f, jump_df })
}
