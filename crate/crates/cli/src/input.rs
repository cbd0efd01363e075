use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use scale_hodge::{
    complex::DEFAULT_SIMPLEX_CAP,
    gen_circle, gen_cluster_space, gen_interval_with_atom, gen_square, gen_tower_complex,
    metric::io::{read_distance_json, read_points_csv},
    ComplexMode, HodgeOptions, Kernel, MetricKind, MetricMeasureSpace, PrescribedComplex, ScaleComplex, SpaceOptions,
};

pub const CAP_ENV: &str = "SCALEHODGE_SIMPLEX_CAP";

const CLUSTER_ALPHA: f64 = 10.0;
const INTERVAL_ALPHA: f64 = 0.2;

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Builtin example: square, circle:N, tower:N, clusters:N, interval:N.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub example: Option<String>,

    /// Points CSV (`id,x0,...[,measure]`), distance JSON or complex JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Metric for points CSV input: euclidean or l1.
    #[arg(long, default_value = "euclidean")]
    pub metric: String,

    /// Keep the measure as given instead of normalizing to total mass one.
    #[arg(long)]
    pub no_normalize: bool,

    /// Tolerance added to α in every `d ≤ α` comparison.
    #[arg(long, default_value_t = 0.0)]
    pub comparison_slack: f64,

    /// Relative tolerance for the triangle inequality check.
    #[arg(long, default_value_t = 0.0)]
    pub triangle_slack: f64,
}

#[derive(Args, Debug, Clone)]
pub struct AnalysisArgs {
    /// Highest cohomological degree reported.
    #[arg(long, default_value_t = 2)]
    pub max_dim: usize,

    /// witness or rips.
    #[arg(long, default_value = "witness")]
    pub mode: ComplexMode,

    /// `const` or `gaussian:σ`.
    #[arg(long, default_value = "const")]
    pub kernel: String,

    #[arg(long, default_value_t = 1e-8)]
    pub rank_tol: f64,

    /// Largest per-degree simplex count handled by the dense eigensolver.
    #[arg(long, default_value_t = 6000)]
    pub dense_limit: usize,
}

impl AnalysisArgs {
    pub fn kernel(&self) -> Result<Kernel> {
        Ok(Kernel::parse(&self.kernel)?)
    }

    pub fn options(&self) -> HodgeOptions {
        HodgeOptions { rank_tol: self.rank_tol, dense_limit: self.dense_limit }
    }
}

pub enum Source {
    Space { space: MetricMeasureSpace, default_alpha: Option<f64> },
    Complex(ScaleComplex),
}

pub fn simplex_cap() -> Result<usize> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{CAP_ENV}=`{v}` is not a count")),
        Err(_) => Ok(DEFAULT_SIMPLEX_CAP),
    }
}

impl InputArgs {
    fn options(&self) -> SpaceOptions {
        SpaceOptions {
            normalize: !self.no_normalize,
            triangle_slack: self.triangle_slack,
            comparison_slack: self.comparison_slack,
        }
    }

    pub fn load(&self) -> Result<Source> {
        match (&self.example, &self.input) {
            (Some(name), None) => self.example_source(name),
            (None, Some(path)) => self.file_source(path),
            _ => bail!("give exactly one of --example and --input"),
        }
    }

    fn example_source(&self, name: &str) -> Result<Source> {
        let (kind, arg) = match name.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (name, None),
        };
        let size = || -> Result<usize> {
            let a = arg.with_context(|| format!("example `{kind}` needs a size, as in `{kind}:N`"))?;
            a.parse().with_context(|| format!("bad size `{a}` in example `{name}`"))
        };
        let space = |space: MetricMeasureSpace, default_alpha| {
            let slack = space.comparison_slack().max(self.comparison_slack);
            Source::Space { space: space.with_comparison_slack(slack), default_alpha }
        };
        Ok(match kind {
            "square" if arg.is_none() => space(gen_square(), None),
            "circle" => space(gen_circle(size()?, 1.0)?, None),
            "clusters" => space(gen_cluster_space(size()?, CLUSTER_ALPHA)?, Some(CLUSTER_ALPHA)),
            "interval" => space(gen_interval_with_atom(size()?, INTERVAL_ALPHA, 0.0, 1.0)?.0, Some(INTERVAL_ALPHA)),
            "tower" => Source::Complex(gen_tower_complex(size()?)?),
            _ => bail!("unknown example `{name}`; expected square, circle:N, tower:N, clusters:N or interval:N"),
        })
    }

    fn file_source(&self, path: &Path) -> Result<Source> {
        let open = || -> Result<BufReader<File>> {
            Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
        };
        let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
        match ext.as_str() {
            "csv" => {
                let metric = match self.metric.as_str() {
                    "euclidean" => MetricKind::Euclidean,
                    "l1" => MetricKind::L1,
                    other => bail!("unknown metric `{other}`; expected euclidean or l1"),
                };
                let space = read_points_csv(open()?, metric, self.options())
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(Source::Space { space, default_alpha: None })
            }
            "json" => {
                let value: serde_json::Value =
                    serde_json::from_reader(open()?).with_context(|| format!("reading {}", path.display()))?;
                if value.get("simplices").is_some() {
                    let pc = PrescribedComplex::from_json(value.to_string().as_bytes())?;
                    Ok(Source::Complex(ScaleComplex::from_prescribed(&pc)?))
                } else {
                    let space = read_distance_json(value.to_string().as_bytes(), self.options())
                        .with_context(|| format!("reading {}", path.display()))?;
                    Ok(Source::Space { space, default_alpha: None })
                }
            }
            _ => bail!("cannot infer the format of {}; use a .csv or .json file", path.display()),
        }
    }
}

/// Parses `a,b,c` or `start:stop:step`.
pub fn parse_alphas(spec: &str) -> Result<Vec<f64>> {
    let parse = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().with_context(|| format!("bad number `{s}` in `{spec}`"))?;
        if !v.is_finite() || v < 0.0 {
            bail!("scale `{s}` must be finite and nonnegative");
        }
        Ok(v)
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(parse).collect(),
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step <= 0.0 || stop < start {
                bail!("range `{spec}` needs step > 0 and stop ≥ start");
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| round12(start + i as f64 * step)).collect())
        }
        _ => bail!("malformed scale list `{spec}`; use a,b,c or start:stop:step"),
    }
}

fn round12(x: f64) -> f64 {
    format!("{x:.12}").parse().expect("formatted float parses")
}

/// Parses a comma-separated list.
pub fn parse_list<T: std::str::FromStr>(spec: &str) -> Result<Vec<T>> {
    spec.split(',').map(|s| s.trim().parse().map_err(|_| anyhow::anyhow!("bad entry `{s}` in `{spec}`"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_lists_and_ranges() {
        assert_eq!(parse_alphas("0.4,0.5,1").unwrap(), vec![0.4, 0.5, 1.0]);
        assert_eq!(parse_alphas("0.1:0.5:0.1").unwrap(), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(parse_alphas("1:1:0.5").unwrap(), vec![1.0]);
        for bad in ["0.1:0.5", "a,b", "1:0:0.1", "0:1:0", "-1", "0.1::0.2"] {
            assert!(parse_alphas(bad).is_err(), "{bad}");
        }
    }
}
