use std::fs;
use std::path::Path;

use dtnlab::config::RunConfig;
use dtnlab::pipeline::{self, emit_report, run_config, validate_report_json, ReportFormat};
use dtnlab::Error;

/// Unit disk, Laplacian, one coarse grid and a cheap oracle study.
const CHEAP: &str = r#"
seed = 7
suites = ["oracles"]
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
disk_spacings = [0.03125, 0.015625]
disk_boundary_nodes = 64
strip_length = 8.0
strip_heights = [4.0, 8.0]
strip_spacing = 0.125
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(p).unwrap()).unwrap()
}

#[test]
fn cheap_run_writes_a_complete_artifact_directory_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CHEAP);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let (_, outcome) = run_config(&cfg, Some(&a), 0, None).unwrap();
    assert!(outcome.complete());
    run_config(&cfg, Some(&b), 0, None).unwrap();

    let manifest = read_json(&a.join("manifest.json"));
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["suites"], serde_json::json!(["oracles"]));
    let artifacts = manifest["artifacts"].as_object().unwrap();
    for rel in artifacts.keys() {
        assert!(a.join(rel).is_file(), "{rel} listed but missing");
    }
    assert!(artifacts.contains_key("report.json") && artifacts.contains_key("config.toml"));

    let report = read_json(&a.join("report.json"));
    validate_report_json(&report).unwrap();
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"disk_kernel_oracle"), "{names:?}");
    assert!(names.contains(&"strip_half_plane_kernel"), "{names:?}");

    for f in ["report.json", "manifest.json"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f} differs between runs"
        );
    }
}

#[test]
fn seed_override_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &CHEAP.replace("suites = [\"oracles\"]", "suites = [\"barrier\"]"),
    );
    let out = tmp.path().join("o");
    run_config(&cfg, Some(&out), 1, Some(99)).unwrap();
    assert_eq!(read_json(&out.join("manifest.json"))["seed"], 99);
    assert_eq!(read_json(&out.join("report.json"))["seed"], 99);
}

#[test]
fn kernel_table_has_the_documented_header() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CHEAP);
    let out = tmp.path().join("o");
    run_config(&cfg, Some(&out), 0, None).unwrap();
    let tables: Vec<_> = fs::read_dir(out.join("tables"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    let kernel = tables
        .iter()
        .find(|p| p.to_string_lossy().ends_with("_kernel.csv"))
        .expect("kernel table");
    let text = fs::read_to_string(kernel).unwrap();
    assert_eq!(text.lines().next().unwrap(), "s_i,s_j,d,chord,K,K_d2");
    assert!(text.lines().count() > 10);
}

#[test]
fn emit_is_idempotent_in_both_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &CHEAP.replace("suites = [\"oracles\"]", "suites = [\"barrier\"]"),
    );
    let out = tmp.path().join("o");
    run_config(&cfg, Some(&out), 1, None).unwrap();
    let before = fs::read(out.join("report.json")).unwrap();
    let json = emit_report(&out, ReportFormat::Json).unwrap();
    assert_eq!(fs::read(&json).unwrap(), before);
    let csv1 = fs::read(emit_report(&out, ReportFormat::Csv).unwrap()).unwrap();
    let csv2 = fs::read(emit_report(&out, ReportFormat::Csv).unwrap()).unwrap();
    assert_eq!(csv1, csv2);
    let text = String::from_utf8(csv1).unwrap();
    assert_eq!(text.lines().next().unwrap(), "check,pass,field,key,value");
    assert!(text.contains("barrier_identity"));
}

#[test]
fn emit_on_a_directory_without_manifest_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(
        emit_report(tmp.path(), ReportFormat::Json),
        Err(Error::Io(_))
    ));
}

#[test]
fn inverted_ellipticity_is_a_config_error() {
    let err = RunConfig::from_toml(&CHEAP.replace("Lambda = 1.0", "Lambda = 0.5")).unwrap_err();
    assert!(matches!(err, Error::Config { .. }));
    assert!(err.to_string().contains("ellipticity"), "{err}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let cfg = RunConfig::from_toml(CHEAP).unwrap();
    assert!(matches!(
        pipeline::verify("everything", &cfg, 1),
        Err(Error::Usage(_))
    ));
}

#[test]
fn too_coarse_oracle_study_fails_by_name() {
    let cfg = RunConfig::from_toml(&CHEAP.replace(
        "disk_spacings = [0.03125, 0.015625]",
        "disk_spacings = [0.25, 0.125]",
    ))
    .unwrap();
    let outcome = pipeline::verify("oracles", &cfg, 0).unwrap();
    let failed = outcome.failed_checks();
    assert!(
        failed.iter().any(|n| n == "disk_kernel_oracle"),
        "{failed:?}"
    );
    assert!(!outcome.report.pass);
}

#[test]
fn missing_output_directory_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), CHEAP);
    assert!(matches!(
        run_config(&cfg, None, 1, None),
        Err(Error::Usage(_))
    ));
}
