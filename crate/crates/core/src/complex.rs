//! Scale-α simplicial complexes: witness, Vietoris–Rips and prescribed.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Read;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::MetricMeasureSpace;

/// Default bound on the total number of stored simplices.
pub const DEFAULT_SIMPLEX_CAP: usize = 5_000_000;

/// Strictly increasing vertex indices.
pub type Simplex = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComplexMode {
    Witness,
    Rips,
    Prescribed,
}

impl std::fmt::Display for ComplexMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ComplexMode::Witness => "witness",
            ComplexMode::Rips => "rips",
            ComplexMode::Prescribed => "prescribed",
        })
    }
}

impl std::str::FromStr for ComplexMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "witness" => Ok(ComplexMode::Witness),
            "rips" => Ok(ComplexMode::Rips),
            "prescribed" => Ok(ComplexMode::Prescribed),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

/// `"0-3-7"` for the simplex `[0, 3, 7]`.
pub fn simplex_key(s: &[usize]) -> String {
    s.iter().join("-")
}

pub fn parse_simplex_key(key: &str) -> Result<Simplex> {
    let s = key
        .trim()
        .split('-')
        .map(|p| p.parse::<usize>().map_err(|_| Error::Parse(format!("bad simplex key `{key}`"))))
        .collect::<Result<Vec<_>>>()?;
    if !s.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::Parse(format!("simplex key `{key}` is not strictly increasing")));
    }
    Ok(s)
}

/// A complex given by explicit simplex lists over labelled vertices.
#[derive(Clone, Debug, Default)]
pub struct PrescribedComplex {
    pub vertices: Vec<String>,
    pub simplices: Vec<Vec<usize>>,
    pub measure: Option<Vec<f64>>,
}

#[derive(Deserialize, Serialize)]
struct ComplexFile {
    vertices: Vec<String>,
    simplices: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    measure: Option<Vec<f64>>,
}

impl PrescribedComplex {
    pub fn new(vertices: Vec<String>) -> Self {
        Self { vertices, simplices: Vec::new(), measure: None }
    }

    pub fn push(&mut self, simplex: Vec<usize>) {
        self.simplices.push(simplex);
    }

    /// Parses `{"vertices": [...], "simplices": {"1": [[i, j], ...], ...}}`.
    pub fn from_json<R: Read>(reader: R) -> Result<Self> {
        let file: ComplexFile = serde_json::from_reader(reader)?;
        let mut simplices = Vec::new();
        for (key, list) in file.simplices {
            let dim: usize =
                key.parse().map_err(|_| Error::Parse(format!("dimension key `{key}` is not an integer")))?;
            for s in list {
                if s.len() != dim + 1 {
                    return Err(Error::Parse(format!("simplex {s:?} listed under dimension {dim}")));
                }
                simplices.push(s);
            }
        }
        Ok(Self { vertices: file.vertices, simplices, measure: file.measure })
    }
}

#[derive(Clone, Debug)]
pub struct ScaleComplex {
    space: Option<MetricMeasureSpace>,
    alpha: Option<f64>,
    mode: ComplexMode,
    max_dim: usize,
    labels: Vec<String>,
    measure: Vec<f64>,
    levels: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl ScaleComplex {
    fn finish(
        space: Option<MetricMeasureSpace>,
        alpha: Option<f64>,
        mode: ComplexMode,
        max_dim: usize,
        labels: Vec<String>,
        measure: Vec<f64>,
        mut levels: Vec<Vec<Simplex>>,
    ) -> Self {
        for level in &mut levels {
            level.sort_unstable();
        }
        let index =
            levels.iter().map(|level| level.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        Self { space, alpha, mode, max_dim, labels, measure, levels, index }
    }

    pub fn from_prescribed(pc: &PrescribedComplex) -> Result<Self> {
        let n = pc.vertices.len();
        let measure = match &pc.measure {
            None => vec![1.0; n],
            Some(m) if m.len() != n => {
                return Err(Error::MeasureLength { got: m.len(), expected: n });
            }
            Some(m) => {
                let bad: Vec<usize> = (0..n).filter(|&i| !(m[i] > 0.0 && m[i].is_finite())).collect();
                if !bad.is_empty() {
                    return Err(Error::NonpositiveMeasure(bad));
                }
                m.clone()
            }
        };
        let mut seen: HashSet<Simplex> = HashSet::new();
        for s in &pc.simplices {
            if s.is_empty() {
                return Err(Error::InvalidArgument("empty simplex".into()));
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= n) {
                return Err(Error::UnknownVertex(bad.to_string()));
            }
            let mut c = s.clone();
            c.sort_unstable();
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("degenerate simplex {s:?}")));
            }
            if !seen.insert(c.clone()) {
                return Err(Error::DuplicateSimplex(c));
            }
        }
        let top = seen.iter().map(|s| s.len() - 1).max().unwrap_or(0);
        let mut sets: Vec<HashSet<Simplex>> = vec![HashSet::new(); top + 1];
        sets[0].extend((0..n).map(|v| vec![v]));
        for s in seen {
            let d = s.len() - 1;
            sets[d].insert(s);
        }
        for d in (1..=top).rev() {
            let faces: Vec<Simplex> = sets[d].iter().flat_map(|s| (0..s.len()).map(move |i| remove_at(s, i))).collect();
            sets[d - 1].extend(faces);
        }
        let levels = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self::finish(None, None, ComplexMode::Prescribed, top, pc.vertices.clone(), measure, levels))
    }

    pub fn space(&self) -> Option<&MetricMeasureSpace> {
        self.space.as_ref()
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn mode(&self) -> ComplexMode {
        self.mode
    }

    /// Highest enumerated dimension.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    /// Whether every simplex of the underlying complex was enumerated.
    pub fn is_complete(&self) -> bool {
        self.mode == ComplexMode::Prescribed || self.levels[self.max_dim].is_empty()
    }

    /// Simplices of dimension `d`, or `None` if `d` lies beyond a truncation.
    pub fn level(&self, d: usize) -> Option<&[Simplex]> {
        if d <= self.max_dim {
            Some(&self.levels[d])
        } else if self.is_complete() {
            Some(&[])
        } else {
            None
        }
    }

    pub(crate) fn require_level(&self, d: usize, degree: usize) -> Result<&[Simplex]> {
        self.level(d).ok_or(Error::DegreeUnavailable { degree, needed: d, max_dim: self.max_dim })
    }

    pub fn count(&self, d: usize) -> usize {
        self.level(d).map_or(0, <[Simplex]>::len)
    }

    /// Simplex counts for dimensions `0..=max_dim`.
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn total_simplices(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    /// Highest degree whose Laplacian is fully determined.
    pub fn top_degree(&self) -> usize {
        if self.is_complete() {
            self.max_dim
        } else {
            self.max_dim.saturating_sub(1)
        }
    }

    /// Slice of a stored simplex in a witness complex.
    pub fn slice(&self, s: &[usize]) -> Result<Vec<usize>> {
        if self.mode != ComplexMode::Witness {
            return Err(Error::RequiresWitness);
        }
        let space = self.space.as_ref().ok_or(Error::MissingSpace)?;
        slice_set(space, self.alpha.expect("witness complexes carry alpha"), s)
    }

    /// Serializes in the prescribed-complex JSON schema.
    pub fn to_json(&self) -> serde_json::Value {
        let simplices = self
            .levels
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, l)| !l.is_empty())
            .map(|(d, l)| (d.to_string(), l.clone()))
            .collect();
        let file = ComplexFile { vertices: self.labels.clone(), simplices, measure: Some(self.measure.clone()) };
        serde_json::to_value(file).expect("plain data serializes")
    }
}

fn remove_at(s: &[usize], i: usize) -> Simplex {
    let mut f = Vec::with_capacity(s.len() - 1);
    f.extend_from_slice(&s[..i]);
    f.extend_from_slice(&s[i + 1..]);
    f
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must be nonnegative, got {alpha}")))
    }
}

pub fn build_witness_complex(space: &MetricMeasureSpace, alpha: f64, max_dim: usize) -> Result<ScaleComplex> {
    build_witness_complex_capped(space, alpha, max_dim, DEFAULT_SIMPLEX_CAP)
}

/// All subsets of size `≤ max_dim + 1` of every closed ball `B_α(t)`.
pub fn build_witness_complex_capped(
    space: &MetricMeasureSpace,
    alpha: f64,
    max_dim: usize,
    cap: usize,
) -> Result<ScaleComplex> {
    check_alpha(alpha)?;
    let n = space.len();
    let balls: Vec<Vec<usize>> =
        (0..n).map(|t| space.ball(t, alpha)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
    let balls = maximal_sets(balls);

    let mut levels: Vec<Vec<Simplex>> = vec![(0..n).map(|v| vec![v]).collect()];
    let mut total = n;
    for d in 1..=max_dim {
        let mut set: HashSet<Simplex> = HashSet::new();
        for ball in balls.iter().filter(|b| b.len() > d) {
            for c in ball.iter().copied().combinations(d + 1) {
                set.insert(c);
                if total + set.len() > cap {
                    return Err(Error::SimplexCapExceeded { cap, dim: d });
                }
            }
        }
        total += set.len();
        let empty = set.is_empty();
        levels.push(set.into_iter().collect());
        if empty {
            levels.resize(max_dim + 1, Vec::new());
            break;
        }
    }
    Ok(ScaleComplex::finish(
        Some(space.clone()),
        Some(alpha),
        ComplexMode::Witness,
        max_dim,
        space.labels().to_vec(),
        space.measure().to_vec(),
        levels,
    ))
}

/// Drops sets contained in another set of the (sorted, deduplicated) family.
fn maximal_sets(mut sets: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    sets.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Vec<usize>> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| is_sorted_subset(&s, k)) {
            kept.push(s);
        }
    }
    kept
}

fn is_sorted_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

pub fn build_rips_complex(space: &MetricMeasureSpace, alpha: f64, max_dim: usize) -> Result<ScaleComplex> {
    build_rips_complex_capped(space, alpha, max_dim, DEFAULT_SIMPLEX_CAP)
}

/// Cliques of the threshold graph `d ≤ α`, by extension with larger vertices.
pub fn build_rips_complex_capped(
    space: &MetricMeasureSpace,
    alpha: f64,
    max_dim: usize,
    cap: usize,
) -> Result<ScaleComplex> {
    check_alpha(alpha)?;
    let n = space.len();
    let up: Vec<Vec<usize>> = (0..n).map(|i| ((i + 1)..n).filter(|&j| space.within(i, j, alpha)).collect()).collect();
    let mut levels: Vec<Vec<Simplex>> = vec![(0..n).map(|v| vec![v]).collect()];
    let mut total = n;
    for d in 1..=max_dim {
        let mut next = Vec::new();
        for s in &levels[d - 1] {
            let last = *s.last().expect("nonempty simplex");
            for &v in &up[last] {
                if s[..s.len() - 1].iter().all(|&u| space.within(u, v, alpha)) {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                    total += 1;
                    if total > cap {
                        return Err(Error::SimplexCapExceeded { cap, dim: d });
                    }
                }
            }
        }
        let empty = next.is_empty();
        levels.push(next);
        if empty {
            levels.resize(max_dim + 1, Vec::new());
            break;
        }
    }
    Ok(ScaleComplex::finish(
        Some(space.clone()),
        Some(alpha),
        ComplexMode::Rips,
        max_dim,
        space.labels().to_vec(),
        space.measure().to_vec(),
        levels,
    ))
}

pub fn build_complex(
    space: &MetricMeasureSpace,
    alpha: f64,
    max_dim: usize,
    mode: ComplexMode,
    cap: usize,
) -> Result<ScaleComplex> {
    match mode {
        ComplexMode::Witness => build_witness_complex_capped(space, alpha, max_dim, cap),
        ComplexMode::Rips => build_rips_complex_capped(space, alpha, max_dim, cap),
        ComplexMode::Prescribed => {
            Err(Error::InvalidArgument("prescribed complexes are not built from a space".into()))
        }
    }
}

/// Points `t` such that `simplex ∪ {t}` has a common witness, ascending.
pub fn slice_set(space: &MetricMeasureSpace, alpha: f64, simplex: &[usize]) -> Result<Vec<usize>> {
    if let Some(&v) = simplex.iter().find(|&&v| v >= space.len()) {
        return Err(Error::UnknownVertex(v.to_string()));
    }
    let witnesses = space.common_witnesses(simplex, alpha);
    if witnesses.is_empty() {
        return Err(Error::SimplexNotFound(simplex.to_vec()));
    }
    Ok((0..space.len()).filter(|&t| witnesses.iter().any(|&w| space.within(t, w, alpha))).collect())
}
