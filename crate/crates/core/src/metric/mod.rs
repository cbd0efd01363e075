//! Finite metric measure spaces.
//!
//! A [`MetricMeasureSpace`] is a finite point set with a symmetric distance
//! matrix and a strictly positive measure. Spaces are validated on
//! construction and immutable afterwards.

mod generators;
pub mod io;

pub use generators::{
    gen_circle, gen_cluster_space, gen_interval_with_atom, gen_square, gen_tower_complex, interval_test_function,
    CLUSTER_MAX_N,
};

use serde::Serialize;

use crate::error::{Error, Result};

/// How distances are computed from coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Euclidean,
    L1,
    /// Arc length on a circle of the given radius; coordinates are angles.
    CircleGeodesic {
        radius: f64,
    },
}

/// Measure specification accepted by the constructors.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureSpec {
    Uniform,
    Weights(Vec<f64>),
}

#[derive(Clone, Copy, Debug)]
pub struct SpaceOptions {
    /// Rescale the measure to total mass one.
    pub normalize: bool,
    /// Admitted relative deficit in the triangle inequality.
    pub triangle_slack: f64,
    /// Slack added to every `d <= alpha` comparison.
    pub comparison_slack: f64,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        Self { normalize: true, triangle_slack: 0.0, comparison_slack: 0.0 }
    }
}

/// One failed triangle: `d(i, k) > d(i, j) + d(j, k)` by `deficit`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub deficit: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub symmetric: bool,
    pub zero_diagonal: bool,
    pub positive_off_diagonal: bool,
    pub triangle_violations: Vec<TriangleViolation>,
    pub measure_total: f64,
    pub nonpositive_measure_indices: Vec<usize>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.symmetric
            && self.zero_diagonal
            && self.positive_off_diagonal
            && self.triangle_violations.is_empty()
            && self.nonpositive_measure_indices.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct MetricMeasureSpace {
    labels: Vec<String>,
    dist: Vec<f64>,
    measure: Vec<f64>,
    coords: Option<Vec<Vec<f64>>>,
    metric: Option<MetricKind>,
    normalized: bool,
    total_mass: f64,
    comparison_slack: f64,
}

impl MetricMeasureSpace {
    /// Builds a space from a full distance matrix.
    pub fn from_distance_matrix(dist: Vec<Vec<f64>>, measure: MeasureSpec, options: SpaceOptions) -> Result<Self> {
        let n = dist.len();
        let mut flat = Vec::with_capacity(n * n);
        for (row, values) in dist.iter().enumerate() {
            if values.len() != n {
                return Err(Error::NotSquare { row, len: values.len(), expected: n });
            }
            flat.extend_from_slice(values);
        }
        let labels = (0..n).map(|i| i.to_string()).collect();
        Self::assemble(labels, flat, measure, None, None, options)
    }

    /// Builds a space from coordinates under the chosen metric.
    pub fn from_points(
        coords: Vec<Vec<f64>>,
        metric: MetricKind,
        measure: MeasureSpec,
        options: SpaceOptions,
    ) -> Result<Self> {
        let labels = (0..coords.len()).map(|i| i.to_string()).collect();
        Self::from_labeled_points(labels, coords, metric, measure, options)
    }

    pub fn from_labeled_points(
        labels: Vec<String>,
        coords: Vec<Vec<f64>>,
        metric: MetricKind,
        measure: MeasureSpec,
        options: SpaceOptions,
    ) -> Result<Self> {
        let n = coords.len();
        if labels.len() != n {
            return Err(Error::InvalidArgument(format!("{} labels for {} points", labels.len(), n)));
        }
        let k = coords.first().map_or(0, Vec::len);
        if n > 0 && k == 0 {
            return Err(Error::InvalidArgument("points need at least one coordinate".into()));
        }
        for (p, row) in coords.iter().enumerate() {
            if row.len() != k {
                return Err(Error::InvalidArgument(format!("point {p} has {} coordinates, expected {k}", row.len())));
            }
            if let Some(column) = row.iter().position(|x| !x.is_finite()) {
                return Err(Error::NonFiniteCoordinate { point: p, column });
            }
        }
        if let MetricKind::CircleGeodesic { radius } = metric {
            if k != 1 {
                return Err(Error::InvalidArgument("circle_geodesic needs exactly one angle column".into()));
            }
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::InvalidArgument(format!("invalid radius {radius}")));
            }
        }
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = point_distance(&coords[i], &coords[j], metric);
                flat[i * n + j] = d;
                flat[j * n + i] = d;
            }
        }
        Self::assemble(labels, flat, measure, Some(coords), Some(metric), options)
    }

    pub(crate) fn assemble(
        labels: Vec<String>,
        dist: Vec<f64>,
        measure: MeasureSpec,
        coords: Option<Vec<Vec<f64>>>,
        metric: Option<MetricKind>,
        options: SpaceOptions,
    ) -> Result<Self> {
        let n = labels.len();
        debug_assert_eq!(dist.len(), n * n);
        let mut measure = match measure {
            MeasureSpec::Uniform => vec![1.0 / n as f64; n],
            MeasureSpec::Weights(w) => {
                if w.len() != n {
                    return Err(Error::MeasureLength { got: w.len(), expected: n });
                }
                w
            }
        };

        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::NonzeroDiagonal(i));
            }
            for j in (i + 1)..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(Error::Asymmetric(i, j));
                }
                let d = dist[i * n + j];
                if !(d > 0.0 && d.is_finite()) {
                    return Err(Error::DegenerateDistance(i, j));
                }
            }
        }
        let bad: Vec<usize> = (0..n).filter(|&i| !(measure[i] > 0.0 && measure[i].is_finite())).collect();
        if !bad.is_empty() {
            return Err(Error::NonpositiveMeasure(bad));
        }
        let violations = triangle_violations(&dist, n, options.triangle_slack);
        if !violations.is_empty() {
            return Err(Error::TriangleViolation(violations));
        }

        let total: f64 = measure.iter().sum();
        let total_mass = if options.normalize {
            measure.iter_mut().for_each(|m| *m /= total);
            1.0
        } else {
            total
        };
        Ok(Self {
            labels,
            dist,
            measure,
            coords,
            metric,
            normalized: options.normalize,
            total_mass,
            comparison_slack: options.comparison_slack,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.len() + j]
    }

    pub fn distance_row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.dist[i * n..(i + 1) * n]
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    pub fn metric(&self) -> Option<MetricKind> {
        self.metric
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Total mass of the measure as stored (1 for normalized spaces).
    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn comparison_slack(&self) -> f64 {
        self.comparison_slack
    }

    pub fn with_comparison_slack(mut self, slack: f64) -> Self {
        self.comparison_slack = slack;
        self
    }

    /// Returns a copy with a different measure (validated, not renormalized
    /// unless `normalize` is set).
    pub fn with_measure(&self, measure: Vec<f64>, normalize: bool) -> Result<Self> {
        Self::assemble(
            self.labels.clone(),
            self.dist.clone(),
            MeasureSpec::Weights(measure),
            self.coords.clone(),
            self.metric,
            SpaceOptions { normalize, triangle_slack: f64::INFINITY, comparison_slack: self.comparison_slack },
        )
    }

    /// Closed threshold test `d(i, j) <= alpha`, widened by the comparison slack.
    #[inline]
    pub fn within(&self, i: usize, j: usize, alpha: f64) -> bool {
        self.dist(i, j) <= alpha + self.comparison_slack
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let mut m = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                m = m.min(self.dist(i, j));
            }
        }
        m
    }

    /// Points within `alpha` of `center`, ascending.
    pub fn ball(&self, center: usize, alpha: f64) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.within(center, v, alpha)).collect()
    }

    /// Points `p` with `d(v, p) <= alpha` for every `v` in `vertices`.
    pub fn common_witnesses(&self, vertices: &[usize], alpha: f64) -> Vec<usize> {
        (0..self.len()).filter(|&p| vertices.iter().all(|&v| self.within(v, p, alpha))).collect()
    }

    /// Whether `x` and `y` lie in a common closed `alpha`-ball centred in the space.
    pub fn share_witness(&self, x: usize, y: usize, alpha: f64) -> bool {
        (0..self.len()).any(|p| self.within(x, p, alpha) && self.within(y, p, alpha))
    }

    pub fn validation_parts(&self) -> (&[f64], &[f64]) {
        (&self.dist, &self.measure)
    }
}

fn point_distance(a: &[f64], b: &[f64], metric: MetricKind) -> f64 {
    match metric {
        MetricKind::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
        MetricKind::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        MetricKind::CircleGeodesic { radius } => {
            let tau = std::f64::consts::TAU;
            let d = (a[0] - b[0]).abs() % tau;
            radius * d.min(tau - d)
        }
    }
}

fn triangle_violations(dist: &[f64], n: usize, slack: f64) -> Vec<TriangleViolation> {
    let mut out = Vec::new();
    for i in 0..n {
        for k in (i + 1)..n {
            let dik = dist[i * n + k];
            let allowed = slack * dik.max(1.0);
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let deficit = dik - (dist[i * n + j] + dist[j * n + k]);
                if deficit > allowed {
                    out.push(TriangleViolation { i, j, k, deficit });
                }
            }
        }
    }
    out
}

/// Exhaustive check of the metric-measure invariants on raw parts.
///
/// Never fails; an `n*n` row-major distance matrix and an `n`-vector of
/// masses are scanned and every defect is reported in deterministic order.
pub fn validate_parts(dist: &[f64], measure: &[f64], triangle_slack: f64) -> ValidationReport {
    let n = measure.len();
    assert_eq!(dist.len(), n * n, "distance matrix must be n*n");
    let mut symmetric = true;
    let mut zero_diagonal = true;
    let mut positive_off_diagonal = true;
    for i in 0..n {
        zero_diagonal &= dist[i * n + i] == 0.0;
        for j in (i + 1)..n {
            symmetric &= dist[i * n + j] == dist[j * n + i];
            positive_off_diagonal &= dist[i * n + j] > 0.0 && dist[j * n + i] > 0.0;
        }
    }
    ValidationReport {
        symmetric,
        zero_diagonal,
        positive_off_diagonal,
        triangle_violations: triangle_violations(dist, n, triangle_slack),
        measure_total: measure.iter().sum(),
        nonpositive_measure_indices: (0..n).filter(|&i| !(measure[i] > 0.0)).collect(),
    }
}

pub fn validate_space(space: &MetricMeasureSpace) -> ValidationReport {
    let (dist, measure) = space.validation_parts();
    validate_parts(dist, measure, 0.0)
}

/// Like [`validate_space`] but admitting a relative triangle deficit.
pub fn validate_space_with_slack(space: &MetricMeasureSpace, triangle_slack: f64) -> ValidationReport {
    let (dist, measure) = space.validation_parts();
    validate_parts(dist, measure, triangle_slack)
}
