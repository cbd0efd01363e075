use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use scale_hodge::{build_witness_complex, coboundary_matrix, gen_square, simplex_key, Kernel};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scalehodge")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scalehodge")).args(args).env(key, value).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn betti_of(o: &Output) -> Vec<usize> {
    assert_eq!(o.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    serde_json::from_value(v["betti"].clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn write_cochain(path: &Path, entries: &[(String, f64)]) {
    let mut s = String::from("simplex,value\n");
    for (k, v) in entries {
        s.push_str(&format!("{k},{v}\n"));
    }
    fs::write(path, s).unwrap();
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn betti_square() {
    assert_eq!(betti_of(&run(&["betti", "--example", "square", "--alpha", "1.0", "--max-dim", "3"])), [1, 0, 1, 0]);
}

#[test]
fn betti_circle() {
    let o = run(&["betti", "--example", "circle:64", "--alpha", "0.35", "--max-dim", "2"]);
    assert_eq!(betti_of(&o), [1, 1, 0]);
}

#[test]
fn betti_of_distance_file_at_huge_scale() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("dist.json");
    let d = [[0, 3, 4, 5, 6], [3, 0, 5, 4, 5], [4, 5, 0, 3, 4], [5, 4, 3, 0, 3], [6, 5, 4, 3, 0]];
    let doc = serde_json::json!({ "n": 5, "dist": d, "measure": "uniform" });
    fs::write(&path, doc.to_string()).unwrap();
    let o = run(&["betti", "--input", path.to_str().unwrap(), "--alpha", "999"]);
    assert_eq!(betti_of(&o), [1, 0, 0]);
}

#[test]
fn betti_of_points_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("pts.csv");
    fs::write(&path, "id,x0,x1\na,0,0\nb,1,0\nc,1,1\nd,0,1\n").unwrap();
    let o = run(&["betti", "--input", path.to_str().unwrap(), "--alpha", "1", "--max-dim", "3", "--metric", "l1"]);
    // Under ℓ¹ each corner's unit ball holds itself and its two neighbours, so
    // all four triangles are witnessed: a 2-sphere.
    assert_eq!(betti_of(&o), [1, 0, 1, 0]);
}

#[test]
fn sweep_square_profile() {
    let o = run(&["sweep", "--example", "square", "--alphas", "0.4,0.5,1.0,1.2,1.5", "--max-dim", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("alpha,degree,betti,simplices\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 15);
    let with_b2: Vec<&str> = rows.iter().filter(|r| r[1] == "2" && r[2] == "1").map(|r| r[0].as_str()).collect();
    assert_eq!(with_b2, ["1", "1.2"]);
}

#[test]
fn sweep_range_syntax() {
    let o = run(&["sweep", "--example", "circle:16", "--alphas", "0.1:0.5:0.2", "--max-dim", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let alphas: Vec<String> = csv_rows(&stdout(&o)).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(alphas, ["0.1", "0.1", "0.3", "0.3", "0.5", "0.5"]);
}

#[test]
fn sweep_tower_is_one_block() {
    let o = run(&["sweep", "--example", "tower:4", "--max-dim", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[0].is_empty()));
    assert_eq!(rows[2][2], "43");
}

#[test]
fn malformed_inputs_exit_one() {
    assert_eq!(run(&["sweep", "--example", "square", "--alphas", "0.1:0.5"]).status.code(), Some(1));
    assert_eq!(run(&["betti", "--example", "nowhere:3", "--alpha", "1"]).status.code(), Some(1));
    assert_eq!(run(&["betti", "--example", "square"]).status.code(), Some(1));
    assert_eq!(run(&["betti", "--example", "square", "--alpha", "1", "--kernel", "cauchy"]).status.code(), Some(1));
    assert_eq!(run(&["paperlab", "nonsense"]).status.code(), Some(1));
    assert_eq!(run(&["betti"]).status.code(), Some(1));
}

#[test]
fn ambiguous_ranks_exit_two() {
    let o = run(&["betti", "--example", "square", "--alpha", "1", "--max-dim", "3", "--rank-tol", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
}

#[test]
fn simplex_cap_exits_three() {
    let key = "SCALEHODGE_SIMPLEX_CAP";
    let o = run_env(&["betti", "--example", "circle:16", "--alpha", "3"], key, "10");
    assert_eq!(o.status.code(), Some(3));
    let o = run_env(&["sweep", "--example", "circle:16", "--alphas", "0.1,3", "--max-dim", "1"], key, "40");
    assert_eq!(o.status.code(), Some(3));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][2], "16");
    assert!(rows[2][2].is_empty() && rows[3][2].is_empty());
    assert_eq!(run_env(&["betti", "--example", "square", "--alpha", "1"], key, "many").status.code(), Some(1));
}

#[test]
fn outputs_are_reproducible() {
    let args = ["betti", "--example", "clusters:2", "--max-dim", "1", "--kernel", "gaussian:3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn dumped_complex_reproduces_report() {
    let dir = TempDir::new().unwrap();
    let dump = dir.path().join("complex.json");
    let harmonic = dir.path().join("harmonic.csv");
    let alpha = (4.0 * std::f64::consts::TAU / 32.0).to_string();
    let first = run(&[
        "betti",
        "--example",
        "circle:32",
        "--alpha",
        &alpha,
        "--max-dim",
        "2",
        "--dump-complex",
        dump.to_str().unwrap(),
        "--harmonic-csv",
        harmonic.to_str().unwrap(),
    ]);
    let second = run(&["betti", "--input", dump.to_str().unwrap(), "--max-dim", "2"]);
    assert_eq!(betti_of(&first), [1, 1, 0]);
    assert_eq!(betti_of(&second), [1, 1, 0]);
    let r1: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let r2: serde_json::Value = serde_json::from_slice(&second.stdout).unwrap();
    for d in 0..3 {
        let (a, b) = (&r1["report"]["degrees"][d], &r2["report"]["degrees"][d]);
        assert_eq!(a["simplices"], b["simplices"]);
        assert_eq!(a["rank_check"], b["rank_check"]);
        let (ga, gb) = (a["gap"].as_f64().unwrap(), b["gap"].as_f64().unwrap());
        assert!((ga - gb).abs() <= 1e-12 * ga);
    }
    let text = fs::read_to_string(&harmonic).unwrap();
    assert!(text.starts_with("degree,basis,simplex,value\n"));
    // 32 vertex values for β₀ and one value per edge for β₁; witnessed edges
    // span up to 8 spacings.
    assert_eq!(text.lines().count() - 1, 32 + 32 * 8);
}

#[test]
fn decompose_exact_cochain() {
    let space = gen_square();
    let c = build_witness_complex(&space, 1.0, 2).unwrap();
    let f = [0.3, -1.2, 0.7, 2.0];
    let df = coboundary_matrix(&c, 0, &Kernel::constant()).unwrap().apply(&f);
    let entries: Vec<(String, f64)> = c.level(1).unwrap().iter().map(|s| simplex_key(s)).zip(df).collect();
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("df.csv");
    write_cochain(&path, &entries);
    let out = dir.path().join("out");
    let o = run(&[
        "decompose",
        "--example",
        "square",
        "--alpha",
        "1",
        "--cochain",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = summary(&out);
    let input = s["norm_input"].as_f64().unwrap();
    assert!(s["norm_coexact"].as_f64().unwrap() <= 1e-10 * input);
    assert!(s["norm_harmonic"].as_f64().unwrap() <= 1e-10 * input);
    let csv = fs::read_to_string(out.join("decomposition.csv")).unwrap();
    assert!(csv.starts_with("simplex,input,exact,coexact,harmonic\n"));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn decompose_square_class() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sigma.csv");
    let sigma = [("0-1-2", 1.0), ("0-1-3", -1.0), ("0-2-3", 1.0), ("1-2-3", -1.0)];
    write_cochain(&path, &sigma.map(|(k, v)| (k.to_string(), v)));
    let out = dir.path().join("out");
    let o = run(&[
        "decompose",
        "--example",
        "square",
        "--alpha",
        "1",
        "--cochain",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&out);
    assert!(s["norm_harmonic"].as_f64().unwrap() >= 0.99 * s["norm_input"].as_f64().unwrap());
}

#[test]
fn decompose_random_cochain_reconstructs() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("f.csv");
    let entries: Vec<(String, f64)> = (0..16)
        .map(|i| (format!("{}-{}", i.min((i + 1) % 16), i.max((i + 1) % 16)), ((i * 7 % 5) as f64) - 2.0))
        .collect();
    write_cochain(&path, &entries);
    let out = dir.path().join("out");
    let o = run(&[
        "decompose",
        "--example",
        "circle:16",
        "--alpha",
        "0.8",
        "--cochain",
        path.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(summary(&out)["residual"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn decompose_rejects_unknown_simplex() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.csv");
    write_cochain(&path, &[("0-9".to_string(), 1.0)]);
    let o = run(&["decompose", "--example", "square", "--alpha", "1", "--cochain", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown simplex 0-9"));
}

#[test]
fn paperlab_cluster_series() {
    let o = run(&["paperlab", "cluster-series", "--lambdas", "0.9,0.99,0.999"]);
    assert_eq!(o.status.code(), Some(0));
    let g: Vec<f64> = csv_rows(&stdout(&o)).iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(g[0] > g[1] && g[1] > g[2]);
}

#[test]
fn paperlab_interval() {
    let o = run(&["paperlab", "interval", "--grids", "101,201,401"]);
    assert_eq!(o.status.code(), Some(0));
    let jd: Vec<f64> = csv_rows(&stdout(&o)).iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(jd[0] > jd[1] && jd[1] > jd[2]);
}

#[test]
fn paperlab_circle_volume() {
    let dir = TempDir::new().unwrap();
    let o = run(&["paperlab", "circle-volume", "--n", "64", "--alpha", "0.35", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("circle_volume.csv")).unwrap();
    for row in csv_rows(&text) {
        let v: f64 = row[1].parse().unwrap();
        if row[0] == "betti_1" {
            assert_eq!(v, 1.0);
        } else {
            assert!(v <= 1e-8, "{} = {v}", row[0]);
        }
    }
}
