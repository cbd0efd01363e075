use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use scale_hodge::{
    betti_sweep, build_complex, cluster_series, cluster_sv_decay,
    complex::parse_simplex_key,
    gen_circle, harmonic_basis,
    hodge::{closedness, coclosedness},
    hodge_decompose, hodge_report, interval_regularity_experiment,
    operators::weighted_inner,
    simplex_key,
    sweep::profile_rows,
    volume_cocycle_circle, BettiProfile, Cochain, ScaleComplex,
};
use serde::Serialize;

use crate::input::{parse_alphas, parse_list, simplex_cap, AnalysisArgs, InputArgs, Source};

/// How a successful run ended; mapped to the process exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Clean,
    Warnings,
    Capped,
}

#[derive(Args, Debug)]
pub struct BettiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// Scale α; optional for examples that fix it and for complex input.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output directory; the report goes to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write harmonic bases as `degree,basis,simplex,value`.
    #[arg(long)]
    pub harmonic_csv: Option<PathBuf>,
    /// Write the complex as prescribed-complex JSON.
    #[arg(long)]
    pub dump_complex: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    /// `a,b,c` or `start:stop:step`.
    #[arg(long, conflicts_with = "alpha")]
    pub alphas: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub analysis: AnalysisArgs,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Cochain CSV with header `simplex,value`; unlisted simplices are zero.
    #[arg(long)]
    pub cochain: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Lab {
    /// Partial sums of the cluster-space series.
    ClusterSeries {
        #[arg(long, default_value = "0.5,0.9,0.99,0.999,1")]
        lambdas: String,
        #[arg(long, default_value_t = 500)]
        k_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest positive singular value of the reduced coboundary on cluster spaces.
    ClusterSv {
        #[arg(long, default_value = "2,3,4,5")]
        ns: String,
        #[arg(long, default_value_t = 1e-8)]
        rank_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Jumps of a step function and of its Laplacian on a grid with an atom.
    Interval {
        #[arg(long, default_value = "101,201,401")]
        grids: String,
        #[arg(long, default_value_t = 0.2)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closedness, coclosedness and harmonicity of the arc-length cocycle.
    CircleVolume {
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0.35)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn warn_all(warnings: &[String]) -> Status {
    for w in warnings {
        eprintln!("warning: {w}");
    }
    if warnings.is_empty() {
        Status::Clean
    } else {
        Status::Warnings
    }
}

/// Opens `dir/name`, or stdout without a directory.
fn sink(out: Option<&Path>, name: &str) -> Result<Box<dyn Write>> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let path = dir.join(name);
            let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn write_rows<T: Serialize>(out: Option<&Path>, name: &str, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out, name)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Complex for one scale, with simplices up to dimension `top + 1`.
fn complex_at(source: &Source, alpha: Option<f64>, top: usize, analysis: &AnalysisArgs) -> Result<ScaleComplex> {
    match source {
        Source::Space { space, default_alpha } => {
            let alpha = alpha.or(*default_alpha).context("--alpha is required for this input")?;
            Ok(build_complex(space, alpha, top + 1, analysis.mode, simplex_cap()?)?)
        }
        Source::Complex(c) => {
            if alpha.is_some() {
                eprintln!("note: --alpha is ignored for a prescribed complex");
            }
            Ok(c.clone())
        }
    }
}

pub fn betti(args: &BettiArgs) -> Result<Status> {
    let source = args.input.load()?;
    let kernel = args.analysis.kernel()?;
    let opts = args.analysis.options();
    let top = args.analysis.max_dim;
    let complex = complex_at(&source, args.alpha, top, &args.analysis)?;
    let report = hodge_report(&complex, &kernel, &opts, Some(top))?;
    let mut warnings = report.warnings.clone();

    if let Some(path) = &args.dump_complex {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &complex.to_json())?;
        writeln!(w)?;
        w.flush()?;
    }
    if let Some(path) = &args.harmonic_csv {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["degree", "basis", "simplex", "value"])?;
        for d in 0..=top {
            let h = harmonic_basis(&complex, d, &kernel, &opts)?;
            warnings.extend(h.warnings.iter().cloned());
            let simplices = complex.level(d).unwrap_or(&[]);
            for (b, v) in h.basis.iter().enumerate() {
                for (s, x) in simplices.iter().zip(&v.coeffs) {
                    w.write_record([d.to_string(), b.to_string(), simplex_key(s), x.to_string()])?;
                }
            }
        }
        w.flush()?;
    }

    let doc = serde_json::json!({ "betti": report.betti(), "report": report });
    let mut w = sink(args.out.as_deref(), "report.json")?;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w)?;
    w.flush()?;
    if args.out.is_some() {
        let b: Vec<String> = report.betti().iter().map(|b| b.to_string()).collect();
        println!("betti {}", b.join(" "));
    }
    Ok(warn_all(&warnings))
}

pub fn sweep(args: &SweepArgs) -> Result<Status> {
    let source = args.input.load()?;
    let kernel = args.analysis.kernel()?;
    let opts = args.analysis.options();
    let top = args.analysis.max_dim;
    let profile = match &source {
        Source::Space { space, default_alpha } => {
            let alphas = match (&args.alphas, args.alpha, *default_alpha) {
                (Some(spec), _, _) => parse_alphas(spec)?,
                (None, Some(a), _) | (None, None, Some(a)) => vec![a],
                (None, None, None) => bail!("--alphas or --alpha is required for this input"),
            };
            betti_sweep(space, &alphas, top, args.analysis.mode, &kernel, &opts, simplex_cap()?)?
        }
        Source::Complex(c) => {
            if args.alphas.is_some() || args.alpha.is_some() {
                eprintln!("note: scales are ignored for a prescribed complex");
            }
            let mut p = BettiProfile::default();
            profile_rows(c, top, &kernel, &opts, &mut p)?;
            p
        }
    };
    profile.write_csv(sink(args.out.as_deref(), "sweep.csv")?)?;
    let status = warn_all(&profile.warnings);
    Ok(if profile.rows.iter().any(|r| r.truncated) { Status::Capped } else { status })
}

fn read_cochain(
    path: &Path,
    complex_for: impl FnOnce(usize) -> Result<ScaleComplex>,
) -> Result<(ScaleComplex, Cochain)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    if rdr.headers()?.iter().collect::<Vec<_>>() != ["simplex", "value"] {
        bail!("cochain CSV {} must have header `simplex,value`", path.display());
    }
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let s = parse_simplex_key(&record[0])?;
        let v: f64 = record[1].parse().with_context(|| format!("bad value `{}`", &record[1]))?;
        entries.push((s, v));
    }
    let degree = match entries.first() {
        Some((s, _)) => s.len() - 1,
        None => bail!("cochain CSV {} is empty", path.display()),
    };
    let complex = complex_for(degree)?;
    let mut f = Cochain::zeros(&complex, degree);
    for (s, v) in entries {
        if s.len() != degree + 1 {
            bail!("simplex {} has dimension {}, expected {degree}", simplex_key(&s), s.len() - 1);
        }
        let i = complex.index_of(&s).with_context(|| format!("unknown simplex {}", simplex_key(&s)))?;
        f.coeffs[i] = v;
    }
    Ok((complex, f))
}

pub fn decompose(args: &DecomposeArgs) -> Result<Status> {
    let source = args.input.load()?;
    let kernel = args.analysis.kernel()?;
    let opts = args.analysis.options();
    let (complex, f) = read_cochain(&args.cochain, |d| complex_at(&source, args.alpha, d, &args.analysis))?;
    let d = f.degree;
    let parts = hodge_decompose(&complex, &f, &kernel, &opts)?;

    let mut w = csv::Writer::from_writer(sink(args.out.as_deref(), "decomposition.csv")?);
    w.write_record(["simplex", "input", "exact", "coexact", "harmonic"])?;
    for (i, s) in complex.level(d).unwrap_or(&[]).iter().enumerate() {
        w.write_record([
            simplex_key(s),
            f.coeffs[i].to_string(),
            parts.exact.coeffs[i].to_string(),
            parts.coexact.coeffs[i].to_string(),
            parts.harmonic.coeffs[i].to_string(),
        ])?;
    }
    w.flush()?;
    drop(w);

    let wn = |v: &[f64]| -> Result<f64> { Ok(weighted_inner(&complex, d, v, v)?.sqrt()) };
    let summary = serde_json::json!({
        "degree": d,
        "residual": parts.residual,
        "norm_input": wn(&f.coeffs)?,
        "norm_exact": wn(&parts.exact.coeffs)?,
        "norm_coexact": wn(&parts.coexact.coeffs)?,
        "norm_harmonic": wn(&parts.harmonic.coeffs)?,
    });
    if let Some(dir) = &args.out {
        let mut s = create(&dir.join("summary.json"))?;
        serde_json::to_writer_pretty(&mut s, &summary)?;
        writeln!(s)?;
        s.flush()?;
    }
    eprintln!("residual {:e}", parts.residual);
    Ok(Status::Clean)
}

#[derive(Serialize)]
struct Quantity {
    quantity: &'static str,
    value: f64,
}

pub fn paperlab(lab: &Lab) -> Result<Status> {
    match lab {
        Lab::ClusterSeries { lambdas, k_max, out } => {
            let rows = parse_list::<f64>(lambdas)?
                .into_iter()
                .map(|l| cluster_series(l, *k_max))
                .collect::<Result<Vec<_>, _>>()?;
            write_rows(out.as_deref(), "cluster_series.csv", &rows)?;
        }
        Lab::ClusterSv { ns, rank_tol, out } => {
            let opts = scale_hodge::HodgeOptions { rank_tol: *rank_tol, ..Default::default() };
            let rows = cluster_sv_decay(&parse_list::<usize>(ns)?, &opts)?;
            write_rows(out.as_deref(), "cluster_sv.csv", &rows)?;
        }
        Lab::Interval { grids, alpha, a, b, out } => {
            let rows = interval_regularity_experiment(&parse_list::<usize>(grids)?, *alpha, *a, *b)?;
            write_rows(out.as_deref(), "interval.csv", &rows)?;
        }
        Lab::CircleVolume { n, alpha, radius, out } => {
            let space = gen_circle(*n, *radius)?;
            let complex = build_complex(&space, *alpha, 2, scale_hodge::ComplexMode::Witness, simplex_cap()?)?;
            let kernel = scale_hodge::Kernel::constant();
            let f = volume_cocycle_circle(&complex)?;
            let h = harmonic_basis(&complex, 1, &kernel, &Default::default())?;
            let pf = h.project(&complex, &f)?;
            let diff: Vec<f64> = f.coeffs.iter().zip(&pf.coeffs).map(|(a, b)| a - b).collect();
            let wn = |v: &[f64]| -> Result<f64> { Ok(weighted_inner(&complex, 1, v, v)?.sqrt()) };
            let rows = [
                Quantity { quantity: "betti_1", value: h.dim() as f64 },
                Quantity { quantity: "closedness", value: closedness(&complex, &f, &kernel)? },
                Quantity { quantity: "coclosedness", value: coclosedness(&complex, &f, &kernel)? },
                Quantity { quantity: "projection_residual", value: wn(&diff)? / wn(&f.coeffs)? },
            ];
            write_rows(out.as_deref(), "circle_volume.csv", &rows)?;
            return Ok(warn_all(&h.warnings));
        }
    }
    Ok(Status::Clean)
}
