use std::path::Path;
use std::process::{Command, Output};

fn diraclab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diraclab"))
        .args(args)
        .env("DIRACLAB_THREADS", "2")
        .output()
        .expect("spawn diraclab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn index_all_pairs_match_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("index.csv");
    let o = diraclab(&["index", "--oracle", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",true")));
    assert_eq!(read_json(&dir.path().join("index.json"))["all_match"], true);
}

#[test]
fn aps_density_integral_is_half_kernel() {
    let o = diraclab(&["density", "--aps", "--t-grid", "0.001,0.01", "--u-grid", "0:0.2:3", "--upper", "4"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines().skip(1).filter(|l| l.contains(',')) {
        let integral: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((integral + 1.5).abs() < 1e-10, "{line}");
    }
}

#[test]
fn malformed_spectrum_reports_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"modes": [[1.0, 1]], "ker_plus": -1, "ker_minus": 0, "cutoff": 2}"#).unwrap();
    let o = diraclab(&["index", "--spectrum", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ker_plus"));
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(diraclab(&["density", "--t-grid", "0.1,0.05"]).status.code(), Some(2));
    assert_eq!(diraclab(&["index", "--eps0", "sideways"]).status.code(), Some(2));
    assert_eq!(diraclab(&["index", "--eps0", "plus"]).status.code(), Some(2));
}

#[test]
fn isospectral_single_end_is_ruled_out() {
    let o = diraclab(&["isospectral", "--eps0-prime", "minus", "--eps1-prime", "plus"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    let summary: serde_json::Value = serde_json::from_str(&text[text.find('{').unwrap()..]).unwrap();
    assert_eq!(summary["verdict"]["verdict"], "ruled_out");
    assert_eq!(summary["heat_constant"], -1.5);
}

#[test]
fn config_file_supplies_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "family", "n": 16, "eps0": "aps", "eps1": "aps"}"#).unwrap();
    let o = diraclab(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("aps,aps,-1,-1,-1,-1,true"), "{}", stdout(&o));
}

#[test]
fn sweeps_are_byte_identical() {
    let args = ["density", "--model", "sphere", "--cutoff", "6", "--eps0", "minus", "--orientation", "reversed"];
    let a = diraclab(&args);
    let b = diraclab(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
