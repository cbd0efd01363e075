//! Point-cloud CSV and distance-matrix JSON ingestion.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{MeasureSpec, MetricKind, MetricMeasureSpace, SpaceOptions};
use crate::error::{Error, Result};

/// Reads `id,x0,...,xk[,measure]`. A missing measure column means uniform.
pub fn read_points_csv<R: Read>(reader: R, metric: MetricKind, options: SpaceOptions) -> Result<MetricMeasureSpace> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("id") {
        return Err(Error::Parse("points CSV must start with an `id` column".into()));
    }
    let has_measure = headers.iter().next_back() == Some("measure");
    let ncoord = headers.len() - 1 - usize::from(has_measure);
    for (c, h) in headers.iter().skip(1).take(ncoord).enumerate() {
        if h != format!("x{c}") {
            return Err(Error::Parse(format!("expected column x{c}, found `{h}`")));
        }
    }
    let mut labels = Vec::new();
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != headers.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {}",
                line + 1,
                record.len(),
                headers.len()
            )));
        }
        labels.push(record[0].to_string());
        let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: `{s}`: {e}", line + 1)));
        let row = (1..=ncoord).map(|c| parse(&record[c])).collect::<Result<Vec<_>>>()?;
        coords.push(row);
        if has_measure {
            weights.push(parse(&record[ncoord + 1])?);
        }
    }
    let measure = if has_measure { MeasureSpec::Weights(weights) } else { MeasureSpec::Uniform };
    MetricMeasureSpace::from_labeled_points(labels, coords, metric, measure, options)
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum MeasureField {
    Named(String),
    Weights(Vec<f64>),
}

#[derive(Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct DistanceFile {
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    dist: Vec<Vec<f64>>,
    #[serde(default = "uniform")]
    measure: MeasureField,
    #[serde(default = "yes")]
    normalize: bool,
}

fn uniform() -> MeasureField {
    MeasureField::Named("uniform".into())
}

fn yes() -> bool {
    true
}

/// Reads the distance JSON format. `options.normalize` is overridden by the file.
pub fn read_distance_json<R: Read>(reader: R, options: SpaceOptions) -> Result<MetricMeasureSpace> {
    let file: DistanceFile = serde_json::from_reader(reader)?;
    if file.dist.len() != file.n {
        return Err(Error::Parse(format!("n = {} but dist has {} rows", file.n, file.dist.len())));
    }
    let measure = match file.measure {
        MeasureField::Named(s) if s == "uniform" => MeasureSpec::Uniform,
        MeasureField::Named(s) => return Err(Error::Parse(format!("unknown measure `{s}`"))),
        MeasureField::Weights(w) => MeasureSpec::Weights(w),
    };
    let mut space = MetricMeasureSpace::from_distance_matrix(
        file.dist,
        measure,
        SpaceOptions { normalize: file.normalize, ..options },
    )?;
    if let Some(labels) = file.labels {
        if labels.len() != file.n {
            return Err(Error::Parse(format!("{} labels for {} points", labels.len(), file.n)));
        }
        space.labels = labels;
    }
    Ok(space)
}

/// Serializes a space in the distance JSON format.
pub fn to_distance_json(space: &MetricMeasureSpace) -> serde_json::Value {
    let n = space.len();
    let file = DistanceFile {
        n,
        labels: Some(space.labels().to_vec()),
        dist: (0..n).map(|i| space.distance_row(i).to_vec()).collect(),
        measure: MeasureField::Weights(space.measure().to_vec()),
        normalize: false,
    };
    serde_json::to_value(file).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uniform_and_weighted() {
        let text = "id,x0,x1\nA,0,0\nB,1,0\nC,1,1\n";
        let s = read_points_csv(text.as_bytes(), MetricKind::Euclidean, SpaceOptions::default()).unwrap();
        assert_eq!(s.labels(), &["A", "B", "C"]);
        assert_eq!(s.dist(0, 2), 2f64.sqrt());

        let text = "id,x0,measure\np,0,1\nq,3,3\n";
        let s = read_points_csv(text.as_bytes(), MetricKind::L1, SpaceOptions::default()).unwrap();
        assert_eq!(s.measure(), &[0.25, 0.75]);
    }

    #[test]
    fn csv_rejects_bad_numbers() {
        let text = "id,x0\na,zero\n";
        assert!(read_points_csv(text.as_bytes(), MetricKind::L1, SpaceOptions::default()).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let text =
            r#"{"n":3,"labels":["a","b","c"],"dist":[[0,1,2],[1,0,1],[2,1,0]],"measure":"uniform","normalize":true}"#;
        let s = read_distance_json(text.as_bytes(), SpaceOptions::default()).unwrap();
        assert_eq!(s.labels()[2], "c");
        let v = to_distance_json(&s);
        let back = read_distance_json(v.to_string().as_bytes(), SpaceOptions::default()).unwrap();
        assert_eq!(back.measure(), s.measure());
        assert_eq!(back.dist(0, 2), 2.0);
    }

    #[test]
    fn json_unknown_measure() {
        let text = r#"{"n":2,"dist":[[0,1],[1,0]],"measure":"lebesgue"}"#;
        assert!(matches!(read_distance_json(text.as_bytes(), SpaceOptions::default()), Err(Error::Parse(_))));
    }
}
