use crate::metric::TriangleViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("distance matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },

    #[error("distance matrix is asymmetric at ({0}, {1})")]
    Asymmetric(usize, usize),

    #[error("nonzero diagonal entry at index {0}")]
    NonzeroDiagonal(usize),

    #[error("points {0} and {1} are at zero or non-finite distance")]
    DegenerateDistance(usize, usize),

    #[error("nonpositive measure at indices {0:?}")]
    NonpositiveMeasure(Vec<usize>),

    #[error("measure has {got} entries, expected {expected}")]
    MeasureLength { got: usize, expected: usize },

    #[error("triangle inequality violated: {}", format_violations(.0))]
    TriangleViolation(Vec<TriangleViolation>),

    #[error("non-finite coordinate at point {point}, column {column}")]
    NonFiniteCoordinate { point: usize, column: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("simplex cap of {cap} exceeded while enumerating dimension {dim}")]
    SimplexCapExceeded { cap: usize, dim: usize },

    #[error("simplex {0:?} is not in the complex")]
    SimplexNotFound(Vec<usize>),

    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("operation requires a witness-mode complex built from a metric space")]
    RequiresWitness,

    #[error("operation requires a metric space but the complex has none")]
    MissingSpace,

    #[error("degree {degree} needs simplices of dimension {needed}, but the complex is truncated at {max_dim}")]
    DegreeUnavailable { degree: usize, needed: usize, max_dim: usize },

    #[error("cochain of degree {degree} has {got} coefficients, expected {expected}")]
    CochainLength { degree: usize, got: usize, expected: usize },

    #[error("kernel table is {got}x{got}, expected {expected}x{expected}")]
    KernelSize { got: usize, expected: usize },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("degree function D vanishes at point {0}")]
    ZeroDegree(usize),

    #[error("tabulating {0} tuples exceeds the limit of 1000000")]
    TabulationLimit(usize),

    #[error("{size} simplices in degree {degree} exceed the dense eigensolver limit of {limit}")]
    TooLargeForDense { degree: usize, size: usize, limit: usize },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("degree {degree}: spectral count {spectral} disagrees with rank-nullity count {rank_nullity}")]
    RankMismatch { degree: usize, spectral: usize, rank_nullity: usize },

    #[error("least-squares solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    LeastSquares { iterations: usize, residual: f64 },

    #[error("cochain is not closed: |df|/|f| = {0:e}")]
    NotClosed(f64),

    #[error("difference from harmonic projection is not exact: relative residual {0:e}")]
    NotCohomologous(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn format_violations(v: &[TriangleViolation]) -> String {
    let shown: Vec<String> =
        v.iter().take(8).map(|t| format!("({}, {}, {}, deficit {})", t.i, t.j, t.k, t.deficit)).collect();
    if v.len() > shown.len() {
        format!("{} and {} more", shown.join(", "), v.len() - shown.len())
    } else {
        shown.join(", ")
    }
}
