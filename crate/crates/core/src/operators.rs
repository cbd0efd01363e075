//! Weighted coboundary, boundary and Laplacian operators.
//!
//! Cochains live on canonical (ascending) simplices. The inner product on
//! degree `ℓ` weights a simplex `σ` by `(ℓ+1)! · Π_{v∈σ} μ(v)`, the mass of its
//! full alternating orbit, which makes `∂ = W⁻¹ δᵀ W` the adjoint of `δ`.

use std::io::Write;

use faer::Mat;
use itertools::Itertools;
use sprs::{CsMat, TriMat};

use crate::complex::{ComplexMode, ScaleComplex};
use crate::error::{Error, Result};
use crate::metric::MetricMeasureSpace;

/// Coefficients over the canonical `degree`-simplices of a complex.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl Cochain {
    pub fn new(degree: usize, coeffs: Vec<f64>) -> Self {
        Self { degree, coeffs }
    }

    pub fn zeros(complex: &ScaleComplex, degree: usize) -> Self {
        Self::new(degree, vec![0.0; complex.count(degree)])
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Errors unless the length matches the simplex count of the complex.
    pub fn check(&self, complex: &ScaleComplex) -> Result<()> {
        let expected = complex
            .level(self.degree)
            .ok_or(Error::DegreeUnavailable { degree: self.degree, needed: self.degree, max_dim: complex.max_dim() })?
            .len();
        if self.coeffs.len() != expected {
            return Err(Error::CochainLength { degree: self.degree, got: self.coeffs.len(), expected });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Support {
    /// `x` and `y` lie in a common closed `α`-ball centred in the space.
    Witness,
    /// `d(x, y) ≤ α`.
    Pairwise,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelKind {
    ConstantOne,
    /// `exp(-d²/σ)`.
    Gaussian {
        sigma: f64,
    },
    /// Row-major `n×n` table.
    Table {
        n: usize,
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    pub kind: KernelKind,
    /// Restricts degree-0 kernel operators to pairs within scale `α`.
    pub threshold: Option<f64>,
    pub support: Support,
}

impl Default for Kernel {
    fn default() -> Self {
        Self::constant()
    }
}

impl Kernel {
    pub fn constant() -> Self {
        Self { kind: KernelKind::ConstantOne, threshold: None, support: Support::Witness }
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidKernel(format!("gaussian width must be positive, got {sigma}")));
        }
        Ok(Self { kind: KernelKind::Gaussian { sigma }, ..Self::constant() })
    }

    pub fn table(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(Error::InvalidKernel("kernel table is not square".into()));
            }
            values.extend_from_slice(row);
        }
        for i in 0..n {
            for j in 0..n {
                let k = values[i * n + j];
                if !(k >= 0.0 && k.is_finite()) {
                    return Err(Error::InvalidKernel(format!("entry ({i}, {j}) = {k}")));
                }
                if k != values[j * n + i] {
                    return Err(Error::InvalidKernel(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { kind: KernelKind::Table { n, values }, ..Self::constant() })
    }

    pub fn with_threshold(mut self, alpha: f64) -> Self {
        self.threshold = Some(alpha);
        self
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn is_constant(&self) -> bool {
        self.kind == KernelKind::ConstantOne
    }

    /// Parses `const` or `gaussian:σ`.
    pub fn parse(spec: &str) -> Result<Self> {
        match spec.trim() {
            "const" | "constant" => Ok(Self::constant()),
            s => match s.strip_prefix("gaussian:") {
                Some(sigma) => Self::gaussian(
                    sigma.parse().map_err(|_| Error::InvalidKernel(format!("bad gaussian width `{sigma}`")))?,
                ),
                None => Err(Error::InvalidKernel(format!("unknown kernel `{s}`"))),
            },
        }
    }

    /// Tabulates `K` on the vertices of a complex.
    fn evaluator<'a>(&'a self, complex: &'a ScaleComplex) -> Result<KernelEval<'a>> {
        self.evaluator_for(complex.n_vertices(), complex.space())
    }

    fn evaluator_for<'a>(&'a self, n: usize, space: Option<&'a MetricMeasureSpace>) -> Result<KernelEval<'a>> {
        match &self.kind {
            KernelKind::ConstantOne => Ok(KernelEval::One),
            KernelKind::Gaussian { sigma } => {
                Ok(KernelEval::Gaussian { space: space.ok_or(Error::MissingSpace)?, sigma: *sigma })
            }
            KernelKind::Table { n: m, values } => {
                if *m != n {
                    return Err(Error::KernelSize { got: *m, expected: n });
                }
                Ok(KernelEval::Table { n, values })
            }
        }
    }
}

enum KernelEval<'a> {
    One,
    Gaussian { space: &'a MetricMeasureSpace, sigma: f64 },
    Table { n: usize, values: &'a [f64] },
}

impl KernelEval<'_> {
    fn at(&self, i: usize, j: usize) -> f64 {
        match self {
            KernelEval::One => 1.0,
            KernelEval::Gaussian { space, sigma } => {
                let d = space.dist(i, j);
                (-d * d / sigma).exp()
            }
            KernelEval::Table { n, values } => values[i * n + j],
        }
    }

    fn is_one(&self) -> bool {
        matches!(self, KernelEval::One)
    }
}

/// Sparse operator between cochain spaces with the inner-product weights of
/// its domain and codomain.
#[derive(Clone, Debug)]
pub struct WeightedOperator {
    pub matrix: CsMat<f64>,
    pub domain_degree: usize,
    pub codomain_degree: usize,
    pub domain_weights: Vec<f64>,
    pub codomain_weights: Vec<f64>,
}

impl WeightedOperator {
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        spmv(&self.matrix, f)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        to_dense(&self.matrix)
    }

    /// `dims ℓ→ℓ′ rows cols` followed by one `row col value` line per entry.
    pub fn dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "dims {}→{} {} {}",
            self.domain_degree,
            self.codomain_degree,
            self.matrix.rows(),
            self.matrix.cols()
        )?;
        for (r, row) in self.matrix.outer_iterator().enumerate() {
            for (c, v) in row.iter() {
                writeln!(out, "{r} {c} {v:e}")?;
            }
        }
        Ok(())
    }
}

/// `(ℓ+1)! · Π μ(v)` for every `ℓ`-simplex.
pub fn simplex_weights(complex: &ScaleComplex, degree: usize) -> Result<Vec<f64>> {
    let mu = complex.measure();
    let fact: f64 = (1..=degree + 1).map(|k| k as f64).product();
    Ok(complex
        .require_level(degree, degree)?
        .iter()
        .map(|s| fact * s.iter().map(|&v| mu[v]).product::<f64>())
        .collect())
}

/// One coboundary entry: row `τ`, column `σ = τ \ {τ[pos]}`.
struct Entry {
    row: usize,
    col: usize,
    value: f64,
    deleted: usize,
}

fn coboundary_entries(complex: &ScaleComplex, degree: usize, kernel: &Kernel) -> Result<Vec<Entry>> {
    let eval = kernel.evaluator(complex)?;
    let rows = complex.require_level(degree + 1, degree)?;
    let mut out = Vec::with_capacity(rows.len() * (degree + 2));
    let mut face = Vec::with_capacity(degree + 1);
    for (row, tau) in rows.iter().enumerate() {
        for pos in 0..tau.len() {
            face.clear();
            face.extend(tau.iter().enumerate().filter(|&(k, _)| k != pos).map(|(_, &v)| v));
            let col = complex.index_of(&face).ok_or_else(|| Error::SimplexNotFound(face.clone()))?;
            let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
            let kfactor = if eval.is_one() {
                1.0
            } else {
                let x = tau[pos];
                face.iter().map(|&y| eval.at(x, y).sqrt()).product()
            };
            out.push(Entry { row, col, value: sign * kfactor, deleted: tau[pos] });
        }
    }
    Ok(out)
}

fn assemble(rows: usize, cols: usize, triplets: impl Iterator<Item = (usize, usize, f64)>) -> CsMat<f64> {
    let mut tri = TriMat::new((rows, cols));
    for (r, c, v) in triplets {
        tri.add_triplet(r, c, v);
    }
    tri.to_csr()
}

/// `δ_ℓ: C^ℓ → C^{ℓ+1}`. The kernel threshold is ignored; the complex
/// already encodes the support.
pub fn coboundary_matrix(complex: &ScaleComplex, degree: usize, kernel: &Kernel) -> Result<WeightedOperator> {
    let entries = coboundary_entries(complex, degree, kernel)?;
    let matrix =
        assemble(complex.count(degree + 1), complex.count(degree), entries.iter().map(|e| (e.row, e.col, e.value)));
    Ok(WeightedOperator {
        matrix,
        domain_degree: degree,
        codomain_degree: degree + 1,
        domain_weights: simplex_weights(complex, degree)?,
        codomain_weights: simplex_weights(complex, degree + 1)?,
    })
}

/// `W_{ℓ+1}^{1/2} δ_ℓ W_ℓ^{-1/2}`, formed entrywise as `δ[τ,σ]·√((ℓ+2)μ(t))`
/// so that no mass products are taken.
pub fn scaled_coboundary(complex: &ScaleComplex, degree: usize, kernel: &Kernel) -> Result<CsMat<f64>> {
    let mu = complex.measure();
    let scale = (degree + 2) as f64;
    let entries = coboundary_entries(complex, degree, kernel)?;
    Ok(assemble(
        complex.count(degree + 1),
        complex.count(degree),
        entries.iter().map(|e| (e.row, e.col, e.value * (scale * mu[e.deleted]).sqrt())),
    ))
}

/// `∂_ℓ = W_{ℓ−1}⁻¹ δ_{ℓ−1}ᵀ W_ℓ: C^ℓ → C^{ℓ−1}`; the zero map for `ℓ = 0`.
pub fn boundary_matrix(complex: &ScaleComplex, degree: usize, kernel: &Kernel) -> Result<WeightedOperator> {
    let weights = simplex_weights(complex, degree)?;
    if degree == 0 {
        return Ok(WeightedOperator {
            matrix: CsMat::zero((0, complex.count(0))),
            domain_degree: 0,
            codomain_degree: 0,
            domain_weights: weights,
            codomain_weights: Vec::new(),
        });
    }
    let mu = complex.measure();
    let ratio = degree as f64 + 1.0;
    let entries = coboundary_entries(complex, degree - 1, kernel)?;
    let matrix = assemble(
        complex.count(degree - 1),
        complex.count(degree),
        entries.iter().map(|e| (e.col, e.row, e.value * ratio * mu[e.deleted])),
    );
    Ok(WeightedOperator {
        matrix,
        domain_degree: degree,
        codomain_degree: degree - 1,
        domain_weights: weights,
        codomain_weights: simplex_weights(complex, degree - 1)?,
    })
}

/// `Δ_ℓ = ∂_{ℓ+1} δ_ℓ + δ_{ℓ−1} ∂_ℓ`.
pub fn laplacian_matrix(complex: &ScaleComplex, degree: usize, kernel: &Kernel) -> Result<WeightedOperator> {
    let up = {
        let d = coboundary_matrix(complex, degree, kernel)?;
        let b = boundary_matrix(complex, degree + 1, kernel)?;
        &b.matrix * &d.matrix
    };
    let matrix = if degree == 0 {
        up
    } else {
        let d = coboundary_matrix(complex, degree - 1, kernel)?;
        let b = boundary_matrix(complex, degree, kernel)?;
        &up + &(&d.matrix * &b.matrix)
    };
    let weights = simplex_weights(complex, degree)?;
    Ok(WeightedOperator {
        matrix,
        domain_degree: degree,
        codomain_degree: degree,
        domain_weights: weights.clone(),
        codomain_weights: weights,
    })
}

/// `W^{1/2} Δ_ℓ W^{-1/2} = B_ℓᵀB_ℓ + B_{ℓ−1}B_{ℓ−1}ᵀ`, symmetric positive semidefinite.
pub fn symmetrized_laplacian(complex: &ScaleComplex, degree: usize, kernel: &Kernel) -> Result<CsMat<f64>> {
    let b = scaled_coboundary(complex, degree, kernel)?;
    let bt = transpose(&b);
    let up = &bt * &b;
    if degree == 0 {
        return Ok(up);
    }
    let p = scaled_coboundary(complex, degree - 1, kernel)?;
    let pt = transpose(&p);
    Ok(&up + &(&p * &pt))
}

/// Boundary through slices: `(∂f)(σ) = (ℓ+1) Σ_{t ∈ S_σ \ σ} f(t, σ) μ(t)`.
///
/// Only for witness complexes and `K ≡ 1`.
pub fn apply_boundary_explicit(complex: &ScaleComplex, f: &Cochain) -> Result<Cochain> {
    if complex.mode() != ComplexMode::Witness {
        return Err(Error::RequiresWitness);
    }
    f.check(complex)?;
    let degree = f.degree;
    if degree == 0 {
        return Ok(Cochain::new(0, Vec::new()));
    }
    let mu = complex.measure();
    let faces = complex.require_level(degree - 1, degree)?;
    let mut out = Vec::with_capacity(faces.len());
    for sigma in faces {
        let mut acc = 0.0;
        for t in complex.slice(sigma)? {
            if sigma.contains(&t) {
                continue;
            }
            acc += alternating_value(complex, f, t, sigma)? * mu[t];
        }
        out.push((degree + 1) as f64 * acc);
    }
    Ok(Cochain::new(degree - 1, out))
}

/// Value of the alternating function on the ordered tuple `(t, rest…)`.
fn alternating_value(complex: &ScaleComplex, f: &Cochain, t: usize, rest: &[usize]) -> Result<f64> {
    if rest.contains(&t) {
        return Ok(0.0);
    }
    let pos = rest.partition_point(|&v| v < t);
    let mut tau = Vec::with_capacity(rest.len() + 1);
    tau.extend_from_slice(&rest[..pos]);
    tau.push(t);
    tau.extend_from_slice(&rest[pos..]);
    let idx = complex.index_of(&tau).ok_or(Error::SimplexNotFound(tau))?;
    let sign = if pos % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * f.coeffs[idx])
}

/// Closed form of `∂δf` through slices:
/// `(ℓ+2)[μ(S_x) f(x) + Σ_i (−1)^{i+1} Σ_{t∈S_x} f(t, x̂_i) μ(t)]`.
pub fn explicit_boundary_of_coboundary(complex: &ScaleComplex, f: &Cochain) -> Result<Cochain> {
    if complex.mode() != ComplexMode::Witness {
        return Err(Error::RequiresWitness);
    }
    f.check(complex)?;
    let degree = f.degree;
    complex.require_level(degree + 1, degree)?;
    let mu = complex.measure();
    let simplices = complex.require_level(degree, degree)?;
    let mut out = Vec::with_capacity(simplices.len());
    let mut rest = Vec::with_capacity(degree);
    for (k, x) in simplices.iter().enumerate() {
        let slice = complex.slice(x)?;
        let mass: f64 = slice.iter().map(|&t| mu[t]).sum();
        let mut acc = mass * f.coeffs[k];
        for i in 0..x.len() {
            rest.clear();
            rest.extend(x.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            let sign = if i % 2 == 0 { -1.0 } else { 1.0 };
            for &t in &slice {
                acc += sign * alternating_value(complex, f, t, &rest)? * mu[t];
            }
        }
        out.push((degree + 2) as f64 * acc);
    }
    Ok(Cochain::new(degree, out))
}

/// Tuple count limit for [`alt_project`] and [`tabulate`].
pub const TABULATION_LIMIT: usize = 1_000_000;

fn tuple_count(n: usize, degree: usize) -> Result<usize> {
    let mut total: usize = 1;
    for _ in 0..=degree {
        total = total.saturating_mul(n);
    }
    if total > TABULATION_LIMIT {
        return Err(Error::TabulationLimit(total));
    }
    Ok(total)
}

fn tuple_index(n: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * n + v)
}

fn permutation_sign(p: &[usize]) -> f64 {
    let inversions = (0..p.len()).flat_map(|i| ((i + 1)..p.len()).map(move |j| (i, j)));
    let odd = inversions.filter(|&(i, j)| p[i] > p[j]).count() % 2 == 1;
    if odd {
        -1.0
    } else {
        1.0
    }
}

/// Projects a function on all ordered `(ℓ+1)`-tuples (row-major table of
/// `n^{ℓ+1}` values) to its alternating part on the complex.
pub fn alt_project(values: &[f64], degree: usize, complex: &ScaleComplex) -> Result<Cochain> {
    let n = complex.n_vertices();
    let total = tuple_count(n, degree)?;
    if values.len() != total {
        return Err(Error::InvalidArgument(format!("expected {total} tabulated values, got {}", values.len())));
    }
    let fact: f64 = (1..=degree + 1).map(|k| k as f64).product();
    let perms: Vec<(Vec<usize>, f64)> = (0..=degree)
        .permutations(degree + 1)
        .map(|p| {
            let s = permutation_sign(&p);
            (p, s)
        })
        .collect();
    let mut tuple = vec![0; degree + 1];
    let coeffs = complex
        .require_level(degree, degree)?
        .iter()
        .map(|sigma| {
            let sum: f64 = perms
                .iter()
                .map(|(p, s)| {
                    for (k, &i) in p.iter().enumerate() {
                        tuple[k] = sigma[i];
                    }
                    s * values[tuple_index(n, &tuple)]
                })
                .sum();
            sum / fact
        })
        .collect();
    Ok(Cochain::new(degree, coeffs))
}

/// The alternating function of a cochain on all ordered tuples; zero off the complex.
pub fn tabulate(f: &Cochain, complex: &ScaleComplex) -> Result<Vec<f64>> {
    f.check(complex)?;
    let n = complex.n_vertices();
    let mut out = vec![0.0; tuple_count(n, f.degree)?];
    let mut tuple = vec![0; f.degree + 1];
    for (sigma, &c) in complex.require_level(f.degree, f.degree)?.iter().zip(&f.coeffs) {
        for p in (0..=f.degree).permutations(f.degree + 1) {
            for (k, &i) in p.iter().enumerate() {
                tuple[k] = sigma[i];
            }
            out[tuple_index(n, &tuple)] = permutation_sign(&p) * c;
        }
    }
    Ok(out)
}

/// Degree-0 operators of a kernel `G = K · χ`, as dense matrices acting on
/// function values.
#[derive(Clone, Debug)]
pub struct KernelLaplacian0 {
    /// `G(x, y)` including the support indicator.
    pub g: Mat<f64>,
    /// `D(x) = Σ_y G(x, y) μ(y)`.
    pub degree: Vec<f64>,
    /// `L_G[x, y] = G(x, y) μ(y)`.
    pub lg: Mat<f64>,
    /// `Δ₀ = 2(D − L_G)`.
    pub laplacian: Mat<f64>,
}

fn kernel_matrix(space: &MetricMeasureSpace, kernel: &Kernel) -> Result<Mat<f64>> {
    let n = space.len();
    let eval = kernel.evaluator_for(n, Some(space))?;
    let inside = |i: usize, j: usize| match kernel.threshold {
        None => true,
        Some(alpha) => match kernel.support {
            Support::Pairwise => space.within(i, j, alpha),
            Support::Witness => space.share_witness(i, j, alpha),
        },
    };
    Ok(Mat::from_fn(n, n, |i, j| if inside(i, j) { eval.at(i, j) } else { 0.0 }))
}

pub fn kernel_laplacian0(space: &MetricMeasureSpace, kernel: &Kernel) -> Result<KernelLaplacian0> {
    let n = space.len();
    let mu = space.measure();
    let g = kernel_matrix(space, kernel)?;
    let degree: Vec<f64> = (0..n).map(|x| (0..n).map(|y| g[(x, y)] * mu[y]).sum()).collect();
    let lg = Mat::from_fn(n, n, |x, y| g[(x, y)] * mu[y]);
    let laplacian = Mat::from_fn(n, n, |x, y| 2.0 * (if x == y { degree[x] } else { 0.0 } - lg[(x, y)]));
    Ok(KernelLaplacian0 { g, degree, lg, laplacian })
}

/// Degree-0 operators of the normalized kernel `Ĝ = G / √(D(x)D(y))`.
#[derive(Clone, Debug)]
pub struct NormalizedLaplacian0 {
    pub degree: Vec<f64>,
    /// `L_Ĝ[x, y] = Ĝ(x, y) μ(y)`.
    pub lg_hat: Mat<f64>,
    /// `Δ̂ = 2(I − L_Ĝ)`.
    pub laplacian: Mat<f64>,
    /// `μ^{1/2} Ĝ μ^{1/2}`, similar to `L_Ĝ` and symmetric.
    pub symmetric: Mat<f64>,
    /// `2(I − D⁻¹ L_G)`, similar to `Δ̂`.
    pub random_walk: Mat<f64>,
}

impl NormalizedLaplacian0 {
    /// Eigenvalues of `L_Ĝ`, ascending.
    pub fn lg_hat_spectrum(&self) -> Result<Vec<f64>> {
        self.symmetric.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))
    }
}

pub fn normalized_laplacian0(space: &MetricMeasureSpace, kernel: &Kernel) -> Result<NormalizedLaplacian0> {
    let n = space.len();
    let mu = space.measure();
    let base = kernel_laplacian0(space, kernel)?;
    if let Some(x) = (0..n).find(|&x| !(base.degree[x] > 0.0)) {
        return Err(Error::ZeroDegree(x));
    }
    let d = &base.degree;
    let g_hat = Mat::from_fn(n, n, |x, y| base.g[(x, y)] / (d[x] * d[y]).sqrt());
    let lg_hat = Mat::from_fn(n, n, |x, y| g_hat[(x, y)] * mu[y]);
    let laplacian = Mat::from_fn(n, n, |x, y| 2.0 * (f64::from(u8::from(x == y)) - lg_hat[(x, y)]));
    let symmetric = Mat::from_fn(n, n, |x, y| mu[x].sqrt() * g_hat[(x, y)] * mu[y].sqrt());
    let random_walk = Mat::from_fn(n, n, |x, y| 2.0 * (f64::from(u8::from(x == y)) - base.lg[(x, y)] / d[x]));
    Ok(NormalizedLaplacian0 { degree: base.degree, lg_hat, laplacian, symmetric, random_walk })
}

/// `Σ w_σ a_σ b_σ` in degree `ℓ`.
pub fn weighted_inner(complex: &ScaleComplex, degree: usize, a: &[f64], b: &[f64]) -> Result<f64> {
    let w = simplex_weights(complex, degree)?;
    Ok(w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum())
}

pub fn weighted_norm(complex: &ScaleComplex, degree: usize, a: &[f64]) -> Result<f64> {
    Ok(weighted_inner(complex, degree, a, a)?.sqrt())
}

/// `‖δf‖² + ‖∂f‖²` in the weighted inner products.
pub fn dirichlet_energy(complex: &ScaleComplex, f: &Cochain, kernel: &Kernel) -> Result<f64> {
    f.check(complex)?;
    let l = f.degree;
    let df = coboundary_matrix(complex, l, kernel)?.apply(&f.coeffs);
    let mut energy = weighted_inner(complex, l + 1, &df, &df)?;
    if l > 0 {
        let bf = boundary_matrix(complex, l, kernel)?.apply(&f.coeffs);
        energy += weighted_inner(complex, l - 1, &bf, &bf)?;
    }
    Ok(energy)
}

/// `A x` for a CSR matrix.
pub fn spmv(a: &CsMat<f64>, x: &[f64]) -> Vec<f64> {
    assert!(a.is_csr(), "spmv expects CSR storage");
    assert_eq!(a.cols(), x.len(), "dimension mismatch");
    a.outer_iterator().map(|row| row.iter().map(|(c, v)| v * x[c]).sum()).collect()
}

/// `Aᵀ y` for a CSR matrix.
pub fn spmv_t(a: &CsMat<f64>, y: &[f64]) -> Vec<f64> {
    assert!(a.is_csr(), "spmv_t expects CSR storage");
    assert_eq!(a.rows(), y.len(), "dimension mismatch");
    let mut out = vec![0.0; a.cols()];
    for (r, row) in a.outer_iterator().enumerate() {
        for (c, v) in row.iter() {
            out[c] += v * y[r];
        }
    }
    out
}

pub fn transpose(a: &CsMat<f64>) -> CsMat<f64> {
    a.transpose_view().to_csr()
}

pub fn to_dense(a: &CsMat<f64>) -> Mat<f64> {
    let mut m = Mat::zeros(a.rows(), a.cols());
    for (v, (r, c)) in a.iter() {
        m[(r, c)] += *v;
    }
    m
}
