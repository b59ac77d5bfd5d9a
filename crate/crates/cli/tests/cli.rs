use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dunklkit"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dunklkit-cli-{}-{}", name, std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn run(out: &Path, args: &[&str]) -> Output {
    bin().args(args).arg("--out").arg(out).output().expect("binary runs")
}

fn report(out: &Path, cmd: &str) -> Value {
    let text = std::fs::read_to_string(out.join(format!("{}.json", cmd))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn csv_column(out: &Path, cmd: &str, col: &str) -> Vec<f64> {
    let text = std::fs::read_to_string(out.join(format!("{}.csv", cmd))).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let j = header.iter().position(|h| *h == col).unwrap();
    lines.map(|l| l.split(',').nth(j).unwrap().parse().unwrap()).collect()
}

#[test]
fn transform_gaussian_plancherel() {
    let out = scratch("tg");
    let o = run(&out, &["transform", "--kappa", "0.5", "--fn", "gaussian"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out, "transform");
    assert_eq!(r["schema"], "dunklkit-report/1");
    assert!(r["results"]["plancherel_residual"].as_f64().unwrap() < 1e-6);
    assert!(r["results"]["round_trip_l2_error"].as_f64().unwrap() < 1e-6);
    assert!(!r["grids"].as_array().unwrap().is_empty());
    let text = std::fs::read_to_string(out.join("transform.csv")).unwrap();
    assert!(text.starts_with("# dunklkit,v1\n"));
    assert!(text.contains(&format!("# config_hash: {}", r["config_hash"].as_str().unwrap())));
}

#[test]
fn transform_poisson_is_exponential() {
    let out = scratch("tp");
    let o = run(&out, &["transform", "--kappa", "0", "--fn", "poisson-p", "--x0", "1"]);
    assert!(o.status.success());
    let r = report(&out, "transform");
    assert!(r["results"]["max_abs_error_vs_exp"].as_f64().unwrap() < 1e-6);
}

#[test]
fn config_errors_exit_2() {
    let out = scratch("cfg");
    for args in [
        vec!["transform", "--kappa", "-1"],
        vec!["transform", "--kappa", "NaN"],
        vec!["transform", "--dim", "2"],
        vec!["transform", "--tol", "0"],
        vec!["transform", "--fn", "chi-interval", "--a", "1", "--b", "0"],
        vec!["transform", "--fn", "custom-csv"],
        vec!["frobnicate"],
    ] {
        let o = run(&out, &args);
        assert_eq!(o.status.code(), Some(2), "{:?}", args);
    }
}

#[test]
fn numeric_failure_exits_3() {
    // sign is not square integrable: the spectrum tail check fails
    let out = scratch("num");
    let o = run(&out, &["transform", "--fn", "sign"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn phi0_increasing_above_bound() {
    let out = scratch("phi0");
    let o = run(&out, &["phi0", "--kappa", "0.5", "--xs", "1.1,1.01,1.001"]);
    assert!(o.status.success());
    let v = csv_column(&out, "phi0", "phi0");
    let lb = csv_column(&out, "phi0", "lower_bound");
    assert!(v.windows(2).all(|w| w[1] > w[0]));
    assert!(v.iter().zip(&lb).all(|(a, b)| a >= b));
    assert_eq!(report(&out, "phi0")["results"]["bound_holds"], true);
}

#[test]
fn truncated_hilbert_through_cli() {
    let out = scratch("riesz");
    let o = run(&out, &["riesz", "--kappa", "0", "--fn", "chi-interval", "--eps", "0.1", "--xs", "2"]);
    assert!(o.status.success());
    let v = csv_column(&out, "riesz", "value");
    assert!((v[0] - 3f64.ln() / PI).abs() < 1e-8, "{}", v[0]);
}

#[test]
fn riesz_at_jump_is_nan_row() {
    let out = scratch("jump");
    let o = run(&out, &["riesz", "--kappa", "0.5", "--fn", "sign", "--regularized", "--xs", "-1,0,1"]);
    assert!(o.status.success());
    let v = csv_column(&out, "riesz", "value");
    assert!(v[1].is_nan() && v[0].is_finite());
    // R̃ sign is even
    assert!((v[0] - v[2]).abs() < 1e-9);
}

#[test]
fn bmo_log_abs_stabilizes() {
    let out = scratch("bmo");
    let o = run(&out, &["bmo", "--kappa", "0", "--fn", "log-abs", "--refine", "3"]);
    assert!(o.status.success());
    let v = csv_column(&out, "bmo", "value");
    assert_eq!(v.len(), 4);
    assert!((v[3] - v[2]).abs() < 1e-3 * v[3]);
    // sup of the mean oscillation of log|x| over all intervals, from the exact antiderivative
    let sup = (0..=2000).map(|i| log_oscillation(-(i as f64) / 2000.0, 1.0)).fold(0.0, f64::max);
    assert!(v[3] <= sup * (1.0 + 1e-3) && v[3] > 0.99 * sup, "{} {}", v[3], sup);
}

/// Mean oscillation of log|x| over [a, b].
fn log_oscillation(a: f64, b: f64) -> f64 {
    let big_f = |x: f64| if x == 0.0 { 0.0 } else { x * x.abs().ln() - x };
    let m = (big_f(b) - big_f(a)) / (b - a);
    let e = m.exp();
    let mut cuts = vec![a, b, 0.0, e, -e];
    cuts.retain(|c| *c >= a && *c <= b);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut s = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let sign = if mid.abs().ln() >= m { 1.0 } else { -1.0 };
        s += sign * ((big_f(w[1]) - big_f(w[0])) - m * (w[1] - w[0]));
    }
    s / (b - a)
}

#[test]
fn sign_orbit_bmo_is_one() {
    let out = scratch("orbit");
    let o = run(&out, &["bmo", "--kappa", "0.5", "--fn", "sign", "--orbit"]);
    assert!(o.status.success());
    assert!((csv_column(&out, "bmo", "value")[0] - 1.0).abs() < 1e-12);
}

#[test]
fn identical_runs_give_identical_csv() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    let args = ["poisson", "--kappa", "1.2", "--fn", "chi-interval", "--n", "7", "--heights", "0.2,1"];
    assert!(run(&a, &args).status.success());
    assert!(run(&b, &args).status.success());
    let x = std::fs::read(a.join("poisson.csv")).unwrap();
    let y = std::fs::read(b.join("poisson.csv")).unwrap();
    assert_eq!(x, y);
    let o = run(&b, &["poisson", "--kappa", "1.3", "--fn", "chi-interval", "--n", "7", "--heights", "0.2,1"]);
    assert!(o.status.success());
    assert_ne!(report(&a, "poisson")["config_hash"], report(&b, "poisson")["config_hash"]);
}

#[test]
fn custom_csv_input() {
    let out = scratch("custom");
    std::fs::create_dir_all(&out).unwrap();
    let path = out.join("tri.csv");
    std::fs::write(&path, "x,f\n-1,0\n0,1\n1,0\n").unwrap();
    let o = bin()
        .args(["poisson", "--kappa", "0", "--fn", "custom-csv", "--xs", "0", "--heights", "1", "--csv"])
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // classical Poisson integral of the hat at (1, 0): (2 atan 1 - ln 2) / π
    let u = csv_column(&out, "poisson", "u")[0];
    let e = (2.0 * 1f64.atan() - 2f64.ln()) / PI;
    assert!((u - e).abs() < 1e-8, "{} {}", u, e);
}

#[test]
fn json_table_format() {
    let out = scratch("json");
    let o = run(&out, &["--format", "json", "phi0", "--kappa", "1"]);
    assert!(o.status.success());
    let t: Value = serde_json::from_str(&std::fs::read_to_string(out.join("phi0.values.json")).unwrap()).unwrap();
    assert_eq!(t["columns"][1], "phi0");
    assert_eq!(t["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn carleson_field() {
    let out = scratch("carleson");
    let o = run(&out, &["carleson", "--kappa", "0.5", "--fn", "gaussian", "--refine", "1"]);
    assert!(o.status.success());
    let v = csv_column(&out, "carleson", "value");
    assert!(v[0] > 0.04 && (v[1] - v[0]).abs() < 1e-3 * v[0], "{:?}", v);
    assert!(run(&out, &["carleson", "--kappa", "0.5", "--fn", "constant", "--value", "3"]).status.success());
    assert!(csv_column(&out, "carleson", "value")[0] < 1e-12);
}

#[test]
fn duality_residual() {
    let out = scratch("duality");
    let o = run(&out, &["duality", "--kappa", "0.8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(csv_column(&out, "duality", "relative_residual")[0] <= 1e-3);
}
