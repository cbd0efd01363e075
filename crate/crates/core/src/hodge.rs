//! Harmonic forms, Betti numbers and Hodge decompositions.
//!
//! All spectral work happens in scaled coordinates `u = W^{1/2} f`, where the
//! Laplacian becomes the symmetric matrix `BᵀB + PPᵀ` with `B`, `P` the scaled
//! coboundaries of degrees `ℓ` and `ℓ−1`.

use faer::Mat;
use serde::Serialize;
use sprs::CsMat;

use crate::complex::{ComplexMode, ScaleComplex};
use crate::error::{Error, Result};
use crate::metric::MetricKind;
use crate::operators::{
    scaled_coboundary, simplex_weights, spmv, spmv_t, symmetrized_laplacian, to_dense, transpose, Cochain, Kernel,
};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct HodgeOptions {
    /// Eigenvalues `≤ rank_tol · max(λ_max, 1)` count as zero.
    pub rank_tol: f64,
    /// Largest matrix handed to the dense eigensolver.
    pub dense_limit: usize,
}

impl Default for HodgeOptions {
    fn default() -> Self {
        Self { rank_tol: 1e-8, dense_limit: 6000 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RankCheck {
    pub dim_ker_delta: usize,
    pub rank_prev: usize,
    pub difference: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub l: usize,
    pub betti: usize,
    /// Smallest eigenvalue above the threshold, if any.
    pub gap: Option<f64>,
    pub rank_check: RankCheck,
    pub simplices: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HodgeReport {
    pub alpha: Option<f64>,
    pub mode: ComplexMode,
    pub degrees: Vec<DegreeReport>,
    pub warnings: Vec<String>,
    pub tolerances: HodgeOptions,
}

impl HodgeReport {
    pub fn betti(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.betti).collect()
    }
}

fn eigen_error(e: impl std::fmt::Debug) -> Error {
    Error::Eigensolver(format!("{e:?}"))
}

fn dense_checked(a: &CsMat<f64>, degree: usize, opts: &HodgeOptions) -> Result<Mat<f64>> {
    let size = a.rows().max(a.cols());
    if size > opts.dense_limit {
        return Err(Error::TooLargeForDense { degree, size, limit: opts.dense_limit });
    }
    Ok(to_dense(a))
}

fn zero_threshold(eigenvalues: &[f64], rank_tol: f64) -> f64 {
    let max = eigenvalues.iter().copied().fold(0.0, f64::max);
    rank_tol * max.max(1.0)
}

fn ambiguous(eigenvalues: &[f64], threshold: f64) -> Vec<f64> {
    eigenvalues.iter().copied().filter(|&v| v > threshold / 10.0 && v < threshold * 10.0).collect()
}

/// Eigenvalues of the symmetrized Laplacian, ascending.
pub fn laplacian_spectrum(
    complex: &ScaleComplex,
    degree: usize,
    kernel: &Kernel,
    opts: &HodgeOptions,
) -> Result<Vec<f64>> {
    let s = symmetrized_laplacian(complex, degree, kernel)?;
    if s.rows() == 0 {
        return Ok(Vec::new());
    }
    let mut ev = dense_checked(&s, degree, opts)?.self_adjoint_eigenvalues(faer::Side::Lower).map_err(eigen_error)?;
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Numerical rank of a sparse matrix through the smaller of its Gram matrices.
pub fn numerical_rank(a: &CsMat<f64>, degree: usize, opts: &HodgeOptions) -> Result<usize> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0);
    }
    let at = transpose(a);
    let gram = if a.rows() <= a.cols() { a * &at } else { &at * a };
    let ev = dense_checked(&gram, degree, opts)?.self_adjoint_eigenvalues(faer::Side::Lower).map_err(eigen_error)?;
    let thr = zero_threshold(&ev, opts.rank_tol);
    Ok(ev.iter().filter(|&&v| v > thr).count())
}

fn degree_report(
    complex: &ScaleComplex,
    degree: usize,
    kernel: &Kernel,
    opts: &HodgeOptions,
    warnings: &mut Vec<String>,
) -> Result<DegreeReport> {
    let ev = laplacian_spectrum(complex, degree, kernel, opts)?;
    let thr = zero_threshold(&ev, opts.rank_tol);
    let betti = ev.iter().filter(|&&v| v <= thr).count();
    let gap = ev.iter().copied().find(|&v| v > thr);
    let near = ambiguous(&ev, thr);
    if !near.is_empty() {
        warnings.push(format!(
            "degree {degree}: {} eigenvalue(s) within a factor 10 of the threshold {thr:e} (first {:e})",
            near.len(),
            near[0]
        ));
    }

    let m = complex.count(degree);
    let rank_here = numerical_rank(&scaled_coboundary(complex, degree, kernel)?, degree, opts)?;
    let rank_prev =
        if degree == 0 { 0 } else { numerical_rank(&scaled_coboundary(complex, degree - 1, kernel)?, degree, opts)? };
    let dim_ker_delta = m - rank_here;
    let difference =
        dim_ker_delta.checked_sub(rank_prev).ok_or(Error::RankMismatch { degree, spectral: betti, rank_nullity: 0 })?;
    if difference != betti {
        return Err(Error::RankMismatch { degree, spectral: betti, rank_nullity: difference });
    }
    Ok(DegreeReport {
        l: degree,
        betti,
        gap,
        rank_check: RankCheck { dim_ker_delta, rank_prev, difference },
        simplices: m,
    })
}

/// Reports degrees `0..=max_degree` (capped at the complex's top degree when `None`).
pub fn hodge_report(
    complex: &ScaleComplex,
    kernel: &Kernel,
    opts: &HodgeOptions,
    max_degree: Option<usize>,
) -> Result<HodgeReport> {
    let top = max_degree.unwrap_or_else(|| complex.top_degree());
    let mut warnings = Vec::new();
    let degrees =
        (0..=top).map(|d| degree_report(complex, d, kernel, opts, &mut warnings)).collect::<Result<Vec<_>>>()?;
    Ok(HodgeReport { alpha: complex.alpha(), mode: complex.mode(), degrees, warnings, tolerances: *opts })
}

pub fn betti_numbers(complex: &ScaleComplex, kernel: &Kernel, opts: &HodgeOptions) -> Result<Vec<usize>> {
    Ok(hodge_report(complex, kernel, opts, None)?.betti())
}

/// A W-orthonormal basis of the harmonic `ℓ`-cochains.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub degree: usize,
    pub basis: Vec<Cochain>,
    /// The same basis in scaled coordinates (Euclidean-orthonormal).
    pub scaled: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    pub warnings: Vec<String>,
}

impl HarmonicSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// W-orthogonal projection of a cochain onto the harmonic space.
    pub fn project(&self, complex: &ScaleComplex, f: &Cochain) -> Result<Cochain> {
        f.check(complex)?;
        let u = to_scaled(complex, f)?;
        let mut p = vec![0.0; u.len()];
        for h in &self.scaled {
            let c = dot(h, &u);
            axpy(c, h, &mut p);
        }
        from_scaled(complex, self.degree, &p)
    }
}

/// Kernel of the Laplacian with a deterministic basis: pivoted Gram–Schmidt
/// on the projections of the coordinate vectors, ordered by simplex.
pub fn harmonic_basis(
    complex: &ScaleComplex,
    degree: usize,
    kernel: &Kernel,
    opts: &HodgeOptions,
) -> Result<HarmonicSpace> {
    let s = symmetrized_laplacian(complex, degree, kernel)?;
    let m = s.rows();
    if m == 0 {
        return Ok(HarmonicSpace {
            degree,
            basis: Vec::new(),
            scaled: Vec::new(),
            eigenvalues: Vec::new(),
            threshold: opts.rank_tol,
            warnings: Vec::new(),
        });
    }
    let evd = dense_checked(&s, degree, opts)?.self_adjoint_eigen(faer::Side::Lower).map_err(eigen_error)?;
    let vals: Vec<f64> = (0..m).map(|i| evd.S().column_vector()[i]).collect();
    let u = evd.U();
    let thr = zero_threshold(&vals, opts.rank_tol);
    let kernel_cols: Vec<usize> = (0..m).filter(|&i| vals[i] <= thr).collect();
    let b = kernel_cols.len();
    let mut warnings = Vec::new();
    let near = ambiguous(&vals, thr);
    if !near.is_empty() {
        warnings
            .push(format!("degree {degree}: {} eigenvalue(s) within a factor 10 of the threshold {thr:e}", near.len()));
    }

    // Row σ of the kernel eigenvector block: coordinates of P e_σ in that block.
    let mut rows: Vec<Vec<f64>> = (0..m).map(|r| kernel_cols.iter().map(|&c| u[(r, c)]).collect()).collect();
    let mut chosen: Vec<(usize, Vec<f64>)> = Vec::with_capacity(b);
    let mut used = vec![false; m];
    for _ in 0..b {
        let mut best = None;
        let mut best_norm = 0.0;
        for (r, row) in rows.iter().enumerate() {
            let nrm = norm(row);
            if !used[r] && nrm > best_norm * (1.0 + 1e-9) {
                best = Some(r);
                best_norm = nrm;
            }
        }
        let Some(r) = best else { break };
        used[r] = true;
        let q: Vec<f64> = rows[r].iter().map(|v| v / best_norm).collect();
        for row in rows.iter_mut() {
            let c = dot(row, &q);
            axpy(-c, &q, row);
        }
        chosen.push((r, q));
    }
    chosen.sort_by_key(|(r, _)| *r);

    let mut scaled = Vec::with_capacity(b);
    let mut basis = Vec::with_capacity(b);
    for (pivot, q) in chosen {
        let mut v = vec![0.0; m];
        for (k, &c) in kernel_cols.iter().enumerate() {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi += q[k] * u[(i, c)];
            }
        }
        if v[pivot] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        basis.push(from_scaled(complex, degree, &v)?);
        scaled.push(v);
    }
    Ok(HarmonicSpace { degree, basis, scaled, eigenvalues: vals, threshold: thr, warnings })
}

/// `W^{1/2} f`.
pub fn to_scaled(complex: &ScaleComplex, f: &Cochain) -> Result<Vec<f64>> {
    let w = simplex_weights(complex, f.degree)?;
    Ok(f.coeffs.iter().zip(&w).map(|(c, w)| c * w.sqrt()).collect())
}

/// `W^{-1/2} u`.
pub fn from_scaled(complex: &ScaleComplex, degree: usize, u: &[f64]) -> Result<Cochain> {
    let w = simplex_weights(complex, degree)?;
    Ok(Cochain::new(degree, u.iter().zip(&w).map(|(c, w)| c / w.sqrt()).collect()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

/// Outcome of [`cgls`].
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `‖Aᵀr‖ / (‖A‖_F ‖b‖)` at exit.
    pub normal_residual: f64,
}

/// Conjugate gradients on the normal equations of `min ‖Ax − b‖`, followed
/// by one refinement pass on the residual. Stops once
/// `‖Aᵀr‖ ≤ tol · ‖A‖_F · ‖b‖`.
pub fn cgls(a: &CsMat<f64>, b: &[f64], tol: f64, max_iter: usize) -> Result<LeastSquares> {
    let norm_a = a.data().iter().map(|v| v * v).sum::<f64>().sqrt();
    let scale = norm_a * norm(b);
    if scale == 0.0 {
        return Ok(LeastSquares { x: vec![0.0; a.cols()], iterations: 0, normal_residual: 0.0 });
    }
    let mut x = vec![0.0; a.cols()];
    let mut iterations = 0;
    for _pass in 0..2 {
        let ax = spmv(a, &x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(b, y)| b - y).collect();
        let (dx, it) = cgls_pass(a, r, tol * scale, max_iter);
        iterations += it;
        axpy(1.0, &dx, &mut x);
    }
    let ax = spmv(a, &x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, y)| b - y).collect();
    let normal_residual = norm(&spmv_t(a, &r)) / scale;
    if normal_residual > tol.sqrt() {
        return Err(Error::LeastSquares { iterations, residual: normal_residual });
    }
    Ok(LeastSquares { x, iterations, normal_residual })
}

fn cgls_pass(a: &CsMat<f64>, mut r: Vec<f64>, abs_tol: f64, max_iter: usize) -> (Vec<f64>, usize) {
    let mut x = vec![0.0; a.cols()];
    let mut s = spmv_t(a, &r);
    let mut p = s.clone();
    let mut gamma = dot(&s, &s);
    for it in 0..max_iter {
        if gamma.sqrt() <= abs_tol {
            return (x, it);
        }
        let q = spmv(a, &p);
        let qq = dot(&q, &q);
        if qq == 0.0 {
            return (x, it);
        }
        let step = gamma / qq;
        axpy(step, &p, &mut x);
        axpy(-step, &q, &mut r);
        s = spmv_t(a, &r);
        let next = dot(&s, &s);
        let beta = next / gamma;
        gamma = next;
        for (pi, si) in p.iter_mut().zip(&s) {
            *pi = si + beta * *pi;
        }
    }
    (x, max_iter)
}

fn lsq_iterations(a: &CsMat<f64>) -> usize {
    4 * (a.rows() + a.cols()) + 200
}

const LSQ_TOL: f64 = 1e-13;

/// Orthogonal splitting `f = exact + coexact + harmonic`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub exact: Cochain,
    pub coexact: Cochain,
    pub harmonic: Cochain,
    /// `‖f − exact − coexact − harmonic‖ / ‖f‖` in the weighted norm.
    pub residual: f64,
}

pub fn hodge_decompose(
    complex: &ScaleComplex,
    f: &Cochain,
    kernel: &Kernel,
    opts: &HodgeOptions,
) -> Result<Decomposition> {
    f.check(complex)?;
    let l = f.degree;
    let u = to_scaled(complex, f)?;
    let m = u.len();

    let exact_scaled = if l == 0 {
        vec![0.0; m]
    } else {
        let p = scaled_coboundary(complex, l - 1, kernel)?;
        let y = cgls(&p, &u, LSQ_TOL, lsq_iterations(&p))?.x;
        spmv(&p, &y)
    };
    let b = scaled_coboundary(complex, l, kernel)?;
    let bt = transpose(&b);
    let z = cgls(&bt, &u, LSQ_TOL, lsq_iterations(&bt))?.x;
    let coexact_scaled = spmv(&bt, &z);

    let space = harmonic_basis(complex, l, kernel, opts)?;
    let mut harmonic_scaled = vec![0.0; m];
    for h in &space.scaled {
        axpy(dot(h, &u), h, &mut harmonic_scaled);
    }

    let total = norm(&u);
    let rest: Vec<f64> = (0..m).map(|i| u[i] - exact_scaled[i] - coexact_scaled[i] - harmonic_scaled[i]).collect();
    let residual = if total == 0.0 { norm(&rest) } else { norm(&rest) / total };
    Ok(Decomposition {
        exact: from_scaled(complex, l, &exact_scaled)?,
        coexact: from_scaled(complex, l, &coexact_scaled)?,
        harmonic: from_scaled(complex, l, &harmonic_scaled)?,
        residual,
    })
}

/// `‖δf‖ / ‖f‖` in the weighted norms.
pub fn closedness(complex: &ScaleComplex, f: &Cochain, kernel: &Kernel) -> Result<f64> {
    let u = to_scaled(complex, f)?;
    let b = scaled_coboundary(complex, f.degree, kernel)?;
    let du = spmv(&b, &u);
    let n = norm(&u);
    Ok(if n == 0.0 { norm(&du) } else { norm(&du) / n })
}

/// `‖∂f‖ / ‖f‖` in the weighted norms.
pub fn coclosedness(complex: &ScaleComplex, f: &Cochain, kernel: &Kernel) -> Result<f64> {
    if f.degree == 0 {
        return Ok(0.0);
    }
    let u = to_scaled(complex, f)?;
    let p = scaled_coboundary(complex, f.degree - 1, kernel)?;
    let bu = spmv_t(&p, &u);
    let n = norm(&u);
    Ok(if n == 0.0 { norm(&bu) } else { norm(&bu) / n })
}

/// Harmonic projection of a closed cochain, verified to be cohomologous to it.
pub fn harmonic_representative(
    complex: &ScaleComplex,
    f: &Cochain,
    kernel: &Kernel,
    opts: &HodgeOptions,
    tol: f64,
) -> Result<Cochain> {
    let space = harmonic_basis(complex, f.degree, kernel, opts)?;
    harmonic_representative_in(complex, &space, f, kernel, tol)
}

/// As [`harmonic_representative`] with a precomputed harmonic space.
pub fn harmonic_representative_in(
    complex: &ScaleComplex,
    space: &HarmonicSpace,
    f: &Cochain,
    kernel: &Kernel,
    tol: f64,
) -> Result<Cochain> {
    f.check(complex)?;
    let rel = closedness(complex, f, kernel)?;
    if rel > tol {
        return Err(Error::NotClosed(rel));
    }
    let pf = space.project(complex, f)?;
    if f.degree > 0 {
        let u = to_scaled(complex, f)?;
        let pu = to_scaled(complex, &pf)?;
        let diff: Vec<f64> = u.iter().zip(&pu).map(|(a, b)| a - b).collect();
        let p = scaled_coboundary(complex, f.degree - 1, kernel)?;
        let y = cgls(&p, &diff, LSQ_TOL, lsq_iterations(&p))?.x;
        let py = spmv(&p, &y);
        let miss: Vec<f64> = diff.iter().zip(&py).map(|(a, b)| a - b).collect();
        let n = norm(&u);
        let rel = if n == 0.0 { norm(&miss) } else { norm(&miss) / n };
        if rel > tol {
            return Err(Error::NotCohomologous(rel));
        }
    }
    Ok(pf)
}

/// Signed arc length along the shorter arc, on every edge of a witness
/// complex over a circle sample.
pub fn volume_cocycle_circle(complex: &ScaleComplex) -> Result<Cochain> {
    let space = complex.space().ok_or(Error::MissingSpace)?;
    let Some(MetricKind::CircleGeodesic { radius }) = space.metric() else {
        return Err(Error::InvalidArgument("volume cocycle needs a circle-geodesic space".into()));
    };
    let alpha = complex.alpha().ok_or(Error::MissingSpace)?;
    if alpha >= std::f64::consts::FRAC_PI_2 * radius {
        return Err(Error::InvalidArgument(format!(
            "alpha {alpha} must be below a quarter circumference {}",
            std::f64::consts::FRAC_PI_2 * radius
        )));
    }
    let angles = space.coords().ok_or(Error::MissingSpace)?;
    let tau = std::f64::consts::TAU;
    let coeffs = complex
        .require_level(1, 1)?
        .iter()
        .map(|e| {
            let raw = (angles[e[1]][0] - angles[e[0]][0]).rem_euclid(tau);
            let signed = if raw > tau / 2.0 { raw - tau } else { raw };
            signed.signum() * space.dist(e[0], e[1])
        })
        .collect();
    Ok(Cochain::new(1, coeffs))
}
