use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

const CHEAP: &str = r#"
seed = 3
suites = ["barrier"]
[domain]
family = "circle"
radius = 1.0
[[operators]]
kind = "nondivergence"
label = "laplacian"
lambda = 1.0
Lambda = 1.0
controls = [{ type = "constant", a1 = 1.0, a2 = 1.0 }]
[grids]
spacings = [0.0625]
boundary_nodes = [64]
[oracles]
disk_spacings = [0.25, 0.125]
disk_boundary_nodes = 64
strip_length = 8.0
strip_heights = [4.0, 8.0]
strip_spacing = 0.125
"#;

fn dtnlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtnlab"))
        .args(args)
        .output()
        .unwrap()
}

fn config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn barrier_verification_passes_quickly() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), CHEAP);
    let t = Instant::now();
    let o = dtnlab(&["verify", "barrier", "--config", cfg.to_str().unwrap()]);
    assert!(t.elapsed().as_secs_f64() < 1.0, "{:?}", t.elapsed());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("barrier_identity"));
    assert_eq!(
        fs::read_dir(tmp.path()).unwrap().count(),
        1,
        "verify without --out must not write"
    );
}

#[test]
fn unknown_suite_exits_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), CHEAP);
    let o = dtnlab(&["verify", "everything", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("everything"));
}

#[test]
fn missing_arguments_exit_with_usage_code() {
    assert_eq!(dtnlab(&["run"]).status.code(), Some(2));
}

#[test]
fn inverted_ellipticity_exits_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), &CHEAP.replace("Lambda = 1.0", "Lambda = 0.5"));
    let o = dtnlab(&["verify", "barrier", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("ellipticity"), "{}", stderr(&o));
}

#[test]
fn failing_check_exits_with_one_and_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), CHEAP);
    let o = dtnlab(&["verify", "oracles", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("disk_kernel_oracle"), "{}", stderr(&o));
}

#[test]
fn run_then_emit_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(tmp.path(), CHEAP);
    let out = tmp.path().join("art");
    let o = dtnlab(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--seed",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(out.join("manifest.json").is_file());
    let o = dtnlab(&["emit", out.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.starts_with("check,pass,field,key,value"));
    assert_eq!(
        dtnlab(&["emit", out.to_str().unwrap(), "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn emit_on_missing_directory_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = dtnlab(&["emit", tmp.path().join("nope").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
