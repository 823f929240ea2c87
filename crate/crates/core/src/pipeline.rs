//! Suite planning, concurrent execution and artifact output.
//!
//! A run expands the selected suites into independent jobs. Each job builds
//! its own grids and operators, so jobs share nothing and run on a rayon
//! pool; records are merged by name afterwards. A job error becomes a failed
//! record named after the job and marks the manifest incomplete.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, SUITES};
use crate::domain::DomainGrid;
use crate::dtn::{extremal_operator, DtnOperator, Extremal};
use crate::error::{Error, Result};
use crate::estimates::{self, CheckRecord, EstimateReport, GreenSetup};
use crate::geometry::{BoundaryCurve, BoundaryGrid};
use crate::levy::LevyDecomposition;
use crate::operator::{OperatorKind, OperatorSpec};
use crate::solver::EllipticSolver;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;
pub const REPORT_FILE: &str = "report.json";
pub const REPORT_CSV_FILE: &str = "report.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

type Table = (String, Vec<u8>);

#[derive(Default)]
struct JobOutput {
    checks: Vec<CheckRecord>,
    tables: Vec<Table>,
}

type JobFn = Box<dyn Fn(&RunConfig) -> Result<JobOutput> + Send + Sync>;

struct Job {
    name: String,
    run: JobFn,
}

fn job(
    name: impl Into<String>,
    run: impl Fn(&RunConfig) -> Result<JobOutput> + Send + Sync + 'static,
) -> Job {
    Job {
        name: name.into(),
        run: Box::new(run),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobError {
    pub job: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub suites: Vec<String>,
    pub complete: bool,
    pub pass: bool,
    pub failed_checks: Vec<String>,
    pub job_errors: Vec<JobError>,
    /// Relative artifact path to its SHA-256.
    pub artifacts: BTreeMap<String, String>,
}

pub struct RunOutcome {
    pub report: EstimateReport,
    pub job_errors: Vec<JobError>,
    tables: Vec<Table>,
}

impl RunOutcome {
    pub fn complete(&self) -> bool {
        self.job_errors.is_empty()
    }

    pub fn failed_checks(&self) -> Vec<String> {
        self.report
            .failed()
            .iter()
            .map(|c| c.name.clone())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            _ => Err(Error::Usage(format!(
                "unknown report format `{s}`; expected json or csv"
            ))),
        }
    }
}

/// Expands `all` and removes duplicates, keeping the canonical suite order.
pub fn resolve_suites(names: &[String]) -> Result<Vec<String>> {
    for n in names {
        if !SUITES.contains(&n.as_str()) {
            return Err(Error::Usage(format!(
                "unknown suite `{n}`; expected one of {SUITES:?}"
            )));
        }
    }
    let all = names.iter().any(|n| n == "all");
    Ok(SUITES[..SUITES.len() - 1]
        .iter()
        .filter(|s| all || names.iter().any(|n| n == *s))
        .map(|s| s.to_string())
        .collect())
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn node_at_fraction(bgrid: &BoundaryGrid, f: f64) -> usize {
    ((f * bgrid.len() as f64).round() as usize) % bgrid.len()
}

fn tag(h: f64) -> String {
    format!("h{}", (1.0 / h).round() as u64)
}

fn disk_laplacian() -> OperatorSpec {
    let mut spec = OperatorSpec::laplacian();
    spec.label = "disk_laplacian".into();
    spec
}

/// D-to-N matrix and its Lévy decomposition at truncation `r0_fraction·P`.
fn decompose(
    curve_grid: &DomainGrid,
    bgrid: &BoundaryGrid,
    spec: &OperatorSpec,
    r0_fraction: f64,
) -> Result<(crate::dtn::DtNMatrix, LevyDecomposition)> {
    let m = DtnOperator::new(spec, curve_grid, bgrid)?.assemble_matrix()?;
    let dec = LevyDecomposition::decompose(&m, r0_fraction * bgrid.perimeter())?;
    Ok((m, dec))
}

fn kernel_table(name: String, dec: &LevyDecomposition) -> Result<Table> {
    let mut buf = Vec::new();
    dec.write_kernel_csv(&mut buf, 3.0 * dec.h.max(dec.boundary_grid().spacing()))?;
    Ok((name, buf))
}

fn drift_table(name: String, dec: &LevyDecomposition) -> Result<Table> {
    let mut buf = Vec::new();
    dec.write_drift_csv(&mut buf)?;
    Ok((name, buf))
}

fn oracle_jobs() -> Vec<Job> {
    vec![
        job("disk_kernel_oracle", |cfg| {
            let o = &cfg.oracles;
            let disk = BoundaryCurve::unit_disk();
            let bgrid = disk.build_boundary_grid(o.disk_boundary_nodes)?;
            let mut decs = Vec::new();
            for &h in &o.disk_spacings {
                let grid = DomainGrid::build(&disk, h)?;
                decs.push(decompose(&grid, &bgrid, &disk_laplacian(), cfg.r0_fraction)?.1);
            }
            let refs: Vec<&LevyDecomposition> = decs.iter().collect();
            let finest = decs.last().expect("validated non-empty");
            let tag = tag(finest.h);
            Ok(JobOutput {
                checks: vec![
                    estimates::verify_disk_oracle(&refs)?,
                    estimates::verify_drift_halving(&refs, o.drift_bound)?,
                ],
                tables: vec![
                    kernel_table(format!("tables/disk_laplacian_{tag}_kernel.csv"), finest)?,
                    drift_table(format!("tables/disk_laplacian_{tag}_drift.csv"), finest)?,
                ],
            })
        }),
        job("strip_half_plane_kernel", |cfg| {
            let o = &cfg.oracles;
            let nb = (o.strip_length / o.strip_spacing).round() as usize;
            let mut decs = Vec::new();
            for &height in &o.strip_heights {
                let grid = DomainGrid::strip(o.strip_length, height, o.strip_spacing)?;
                let bgrid = grid.boundary().boundary_grid(nb)?;
                let mut spec = OperatorSpec::laplacian();
                spec.label = format!("strip_H{height}");
                decs.push(decompose(&grid, &bgrid, &spec, cfg.r0_fraction)?.1);
            }
            Ok(JobOutput {
                checks: vec![estimates::verify_strip_oracle(
                    &decs[0],
                    &decs[1],
                    o.strip_separation,
                )?],
                tables: vec![drift_table("tables/strip_drift.csv".into(), &decs[1])?],
            })
        }),
    ]
}

fn linear_jobs(cfg: &RunConfig) -> Vec<Job> {
    cfg.linear_operators()
        .map(|spec| {
            let spec = spec.clone();
            job(format!("linear/{}", spec.label), move |cfg| {
                let curve = cfg.curve()?;
                let g = &cfg.grids;
                let mut out = JobOutput::default();
                let mut decs = Vec::new();
                let mut coarse_matrix = None;
                for (&h, &nb) in g.spacings.iter().zip(&g.boundary_nodes) {
                    let grid = DomainGrid::build(&curve, h)?;
                    let bgrid = curve.build_boundary_grid(nb)?;
                    let (m, dec) = decompose(&grid, &bgrid, &spec, cfg.r0_fraction)?;
                    let stem = format!("tables/{}_{}", spec.label, tag(h));
                    if coarse_matrix.is_none() {
                        out.tables
                            .push(kernel_table(format!("{stem}_kernel.csv"), &dec)?);
                        coarse_matrix = Some(m);
                    }
                    out.tables
                        .push(drift_table(format!("{stem}_drift.csv"), &dec)?);
                    decs.push(dec);
                }
                let refs: Vec<&LevyDecomposition> = decs.iter().collect();
                out.checks.push(if refs.len() >= 2 {
                    estimates::verify_kernel_stability(&refs)?
                } else {
                    estimates::verify_kernel_bounds(refs[0])?
                });
                if refs.len() >= 3 {
                    out.checks.push(estimates::verify_drift_bounded(&refs)?);
                }
                let r0_alt = 1.5 * decs[0].r0();
                let m = coarse_matrix.expect("at least one grid");
                out.checks.push(estimates::verify_representation(
                    &m,
                    &decs[0],
                    r0_alt,
                    g.representation_trials,
                    cfg.seed,
                )?);
                Ok(out)
            })
        })
        .collect()
}

fn nonlinear_jobs(cfg: &RunConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for spec in &cfg.operators {
        let s = spec.clone();
        jobs.push(job(format!("gcp/{}", s.label), move |cfg| {
            let n = &cfg.nonlinear;
            let curve = cfg.curve()?;
            let grid = DomainGrid::build(&curve, n.spacing)?;
            let bgrid = curve.build_boundary_grid(n.boundary_nodes)?;
            let op = DtnOperator::new(&s, &grid, &bgrid)?;
            Ok(JobOutput {
                checks: vec![estimates::verify_gcp(&op, n.gcp_trials, cfg.seed)?],
                tables: vec![],
            })
        }));
    }
    for spec in cfg.sandwich_operators() {
        let s = spec.clone();
        jobs.push(job(format!("sandwich/{}", s.label), move |cfg| {
            let n = &cfg.nonlinear;
            let curve = cfg.curve()?;
            let grid = DomainGrid::build(&curve, n.spacing)?;
            let bgrid = curve.build_boundary_grid(n.boundary_nodes)?;
            let op = DtnOperator::new(&s, &grid, &bgrid)?;
            let rec =
                estimates::verify_sandwich(&op, s.lambda, s.upper, n.sandwich_pairs, cfg.seed)?;
            Ok(JobOutput {
                checks: vec![rec],
                tables: vec![],
            })
        }));
    }
    for spec in cfg
        .operators
        .iter()
        .filter(|o| o.kind == OperatorKind::BellmanMin)
    {
        let s = spec.clone();
        jobs.push(job(format!("minmax/{}", s.label), move |cfg| {
            let n = &cfg.nonlinear;
            let curve = cfg.curve()?;
            let grid = DomainGrid::build(&curve, n.spacing)?;
            let bgrid = curve.build_boundary_grid(n.boundary_nodes)?;
            let op = DtnOperator::new(&s, &grid, &bgrid)?;
            let rec = estimates::verify_minmax(&op, n.minmax_tests, n.minmax_policies, cfg.seed)?;
            Ok(JobOutput {
                checks: vec![rec],
                tables: vec![],
            })
        }));
    }
    jobs.push(job("ring_law/pucci_minus", |cfg| {
        let n = &cfg.nonlinear;
        let curve = cfg.curve()?;
        let grid = DomainGrid::build(&curve, n.ring_spacing)?;
        let bgrid = curve.build_boundary_grid(n.ring_boundary_nodes)?;
        let minus = extremal_operator(Extremal::Minus, n.lambda, n.upper, &grid, &bgrid)?;
        let plus = extremal_operator(Extremal::Plus, n.lambda, n.upper, &grid, &bgrid)?;
        let bases: Vec<usize> = n
            .ring_bases
            .iter()
            .map(|&f| node_at_fraction(&bgrid, f))
            .collect();
        let unit = curve.perimeter() / (2.0 * PI);
        let radii: Vec<f64> = n.ring_radii.iter().map(|r| r * unit).collect();
        Ok(JobOutput {
            checks: vec![estimates::verify_ring_law(&minus, &plus, &bases, &radii)?],
            tables: vec![],
        })
    }));
    jobs.push(job("ring_degenerate_disk", |cfg| {
        let n = &cfg.nonlinear;
        let disk = BoundaryCurve::unit_disk();
        let grid = DomainGrid::build(&disk, n.degenerate_spacing)?;
        let bgrid = disk.build_boundary_grid(n.ring_boundary_nodes)?;
        let op = extremal_operator(Extremal::Minus, n.lambda, n.lambda, &grid, &bgrid)?;
        let bases: Vec<usize> = n
            .ring_bases
            .iter()
            .map(|&f| node_at_fraction(&bgrid, f))
            .collect();
        let radii: Vec<f64> = n.ring_radii.clone();
        Ok(JobOutput {
            checks: vec![estimates::verify_degenerate_ring(&op, &bases, &radii)?],
            tables: vec![],
        })
    }));
    jobs.push(job("ball_positivity/pucci_minus", |cfg| {
        let n = &cfg.nonlinear;
        let curve = cfg.curve()?;
        let grid = DomainGrid::build(&curve, n.ring_spacing)?;
        let bgrid = curve.build_boundary_grid(n.ring_boundary_nodes)?;
        let minus = extremal_operator(Extremal::Minus, n.lambda, n.upper, &grid, &bgrid)?;
        let pairs: Vec<(usize, usize)> = n
            .ball_pairs
            .iter()
            .map(|p| {
                (
                    node_at_fraction(&bgrid, p[0]),
                    node_at_fraction(&bgrid, p[1]),
                )
            })
            .collect();
        Ok(JobOutput {
            checks: vec![estimates::verify_ball_positivity(
                &minus,
                &pairs,
                &n.ball_fractions,
            )?],
            tables: vec![],
        })
    }));
    jobs.push(job("annuli_inclusion", |cfg| {
        let n = &cfg.nonlinear;
        let curves = [
            ("circle", BoundaryCurve::unit_disk()),
            ("ellipse", BoundaryCurve::ellipse(1.5, 1.0)?),
            ("star", BoundaryCurve::star(0.2, 3)?),
            ("domain", cfg.curve()?),
        ];
        let named: Vec<(&str, &BoundaryCurve)> = curves.iter().map(|(s, c)| (*s, c)).collect();
        Ok(JobOutput {
            checks: vec![estimates::verify_annuli(
                &named,
                &n.annuli_fractions,
                n.annuli_bases,
            )?],
            tables: vec![],
        })
    }));
    jobs
}

fn holder_jobs(cfg: &RunConfig) -> Vec<Job> {
    cfg.linear_operators()
        .map(|spec| {
            let spec = spec.clone();
            job(format!("holder/{}", spec.label), move |cfg| {
                let hc = &cfg.holder;
                let curve = cfg.curve()?;
                let unit = curve.perimeter() / (2.0 * PI);
                let deltas: Vec<f64> = hc.deltas.iter().map(|d| d * unit).collect();
                let mut decs = Vec::new();
                for (&h, &nb) in hc.spacings.iter().zip(&hc.boundary_nodes) {
                    let grid = DomainGrid::build(&curve, h)?;
                    let bgrid = curve.build_boundary_grid(nb)?;
                    decs.push(decompose(&grid, &bgrid, &spec, cfg.r0_fraction)?.1);
                }
                let fine = &decs[1];
                let bases: Vec<usize> = hc
                    .bases
                    .iter()
                    .map(|&f| node_at_fraction(fine.boundary_grid(), f))
                    .collect();
                let reach = hc.drift_reach * curve.perimeter();
                Ok(JobOutput {
                    checks: vec![
                        estimates::verify_tv_holder(fine, &bases, &deltas)?,
                        estimates::verify_drift_holder(&decs[0], fine, reach)?,
                    ],
                    tables: vec![],
                })
            })
        })
        .collect()
}

fn green_jobs(cfg: &RunConfig) -> Vec<Job> {
    let run = |spec: OperatorSpec, on_disk: bool| {
        move |cfg: &RunConfig| -> Result<JobOutput> {
            let g = &cfg.green;
            let curve = if on_disk {
                BoundaryCurve::unit_disk()
            } else {
                cfg.curve()?
            };
            let grid = DomainGrid::build(&curve, g.spacing)?;
            let bgrid = curve.build_boundary_grid(g.boundary_nodes)?;
            let solver = EllipticSolver::new(&spec, &grid)?;
            let setup = GreenSetup {
                solver: &solver,
                curve: &curve,
                bgrid: &bgrid,
                unit_disk: on_disk,
                pairs: g.pairs,
                rhos: g.rhos.clone(),
                s0: g.s0,
                seed: cfg.seed,
            };
            Ok(JobOutput {
                checks: estimates::verify_green_suite(&setup)?,
                tables: vec![],
            })
        }
    };
    let mut jobs = vec![job("green/disk_laplacian", run(disk_laplacian(), true))];
    for spec in cfg.linear_operators() {
        jobs.push(job(
            format!("green/{}", spec.label),
            run(spec.clone(), false),
        ));
    }
    jobs
}

fn barrier_jobs() -> Vec<Job> {
    vec![job("barrier_identity", |cfg| {
        let b = &cfg.barrier;
        Ok(JobOutput {
            checks: vec![estimates::verify_barrier(
                b.lambda, b.upper, b.n_dim, b.b, b.samples,
            )?],
            tables: vec![],
        })
    })]
}

fn plan(cfg: &RunConfig, suites: &[String]) -> Vec<Job> {
    let mut jobs = Vec::new();
    for s in suites {
        jobs.extend(match s.as_str() {
            "oracles" => oracle_jobs(),
            "linear_estimates" => linear_jobs(cfg),
            "nonlinear_estimates" => nonlinear_jobs(cfg),
            "holder" => holder_jobs(cfg),
            "green" => green_jobs(cfg),
            "barrier" => barrier_jobs(),
            _ => vec![],
        });
    }
    jobs
}

/// Runs the given suites with `jobs` worker threads (0 = rayon default).
pub fn execute(cfg: &RunConfig, suites: &[String], jobs: usize) -> Result<RunOutcome> {
    use rayon::prelude::*;
    let suites = resolve_suites(suites)?;
    let cfg = Arc::new(cfg.clone());
    let planned = plan(&cfg, &suites);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Input(format!("cannot start worker pool: {e}")))?;
    let results: Vec<(String, Result<JobOutput>)> = pool.install(|| {
        planned
            .par_iter()
            .map(|j| (j.name.clone(), (j.run)(&cfg)))
            .collect()
    });
    let mut checks = Vec::new();
    let mut tables = Vec::new();
    let mut job_errors = Vec::new();
    for (name, res) in results {
        match res {
            Ok(out) => {
                checks.extend(out.checks);
                tables.extend(out.tables);
            }
            Err(e) => {
                checks.push(
                    CheckRecord::new(&name, "job did not complete")
                        .value("error", e.to_string())
                        .verdict(false),
                );
                job_errors.push(JobError {
                    job: name,
                    message: e.to_string(),
                });
            }
        }
    }
    tables.sort_by(|a, b| a.0.cmp(&b.0));
    let report = EstimateReport::new(&suites.join("+"), cfg.seed, checks);
    Ok(RunOutcome {
        report,
        job_errors,
        tables,
    })
}

fn to_pretty_json(v: &impl Serialize) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(v)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes report, tables, config copy and manifest into `dir`.
pub fn write_artifacts(
    dir: &Path,
    config_text: &str,
    cfg: &RunConfig,
    outcome: &RunOutcome,
) -> Result<Manifest> {
    fs::create_dir_all(dir)?;
    let mut files: Vec<(String, Vec<u8>)> = vec![
        (CONFIG_FILE.into(), config_text.as_bytes().to_vec()),
        (REPORT_FILE.into(), to_pretty_json(&outcome.report)?),
    ];
    files.extend(outcome.tables.iter().cloned());
    let mut artifacts = BTreeMap::new();
    for (rel, bytes) in &files {
        let path = dir.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, bytes)?;
        artifacts.insert(rel.clone(), sha256_hex(bytes));
    }
    let manifest = Manifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        tool: "dtnlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_sha256: sha256_hex(config_text.as_bytes()),
        seed: cfg.seed,
        suites: resolve_suites(&cfg.suites)?,
        complete: outcome.complete(),
        pass: outcome.report.pass && outcome.complete(),
        failed_checks: outcome.failed_checks(),
        job_errors: outcome.job_errors.clone(),
        artifacts,
    };
    fs::write(dir.join(MANIFEST_FILE), to_pretty_json(&manifest)?)?;
    Ok(manifest)
}

/// Loads a config, applies overrides, runs its suites and writes the artifact
/// directory. Returns the directory and the outcome.
pub fn run_config(
    path: &Path,
    out: Option<&Path>,
    jobs: usize,
    seed: Option<u64>,
) -> Result<(PathBuf, RunOutcome)> {
    let text = fs::read_to_string(path)?;
    let mut cfg = RunConfig::from_toml(&text)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = match (out, &cfg.out) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(p)) => path.parent().unwrap_or(Path::new(".")).join(p),
        (None, None) => {
            return Err(Error::Usage(
                "no output directory: pass --out or set `out` in the config".into(),
            ))
        }
    };
    let outcome = execute(&cfg, &cfg.suites, jobs)?;
    write_artifacts(&dir, &text, &cfg, &outcome)?;
    Ok((dir, outcome))
}

/// Runs one suite of a config without touching the filesystem.
pub fn verify(suite: &str, cfg: &RunConfig, jobs: usize) -> Result<RunOutcome> {
    execute(cfg, &[suite.to_string()], jobs)
}

/// Re-emits the report of a completed run in the requested format.
/// JSON is rewritten in canonical form; CSV has one row per value or
/// tolerance entry. Both are idempotent.
pub fn emit_report(dir: &Path, format: ReportFormat) -> Result<PathBuf> {
    let src = dir.join(REPORT_FILE);
    if !dir.join(MANIFEST_FILE).exists() {
        return Err(Error::Io(std::io::Error::new(
            std::io::ErrorKind::NotFound,
            format!(
                "{} has no {MANIFEST_FILE}; not a completed run",
                dir.display()
            ),
        )));
    }
    let report: EstimateReport = serde_json::from_slice(&fs::read(&src)?)?;
    match format {
        ReportFormat::Json => {
            fs::write(&src, to_pretty_json(&report)?)?;
            Ok(src)
        }
        ReportFormat::Csv => {
            let path = dir.join(REPORT_CSV_FILE);
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["check", "pass", "field", "key", "value"])?;
            for c in &report.checks {
                let pass = c.pass.to_string();
                for (field, map) in [("value", &c.values), ("tolerance", &c.tolerance)] {
                    for (k, v) in map {
                        w.write_record([
                            c.name.as_str(),
                            pass.as_str(),
                            field,
                            k.as_str(),
                            v.to_string().as_str(),
                        ])?;
                    }
                }
            }
            w.flush()?;
            Ok(path)
        }
    }
}

/// Structural check of a report against the documented schema: required
/// fields, types, name ordering and the overall verdict.
pub fn validate_report_json(v: &serde_json::Value) -> std::result::Result<(), String> {
    let obj = v.as_object().ok_or("report must be an object")?;
    if obj.get("schema_version").and_then(|x| x.as_u64())
        != Some(estimates::REPORT_SCHEMA_VERSION as u64)
    {
        return Err("schema_version missing or unsupported".into());
    }
    obj.get("suite")
        .and_then(|x| x.as_str())
        .ok_or("suite must be a string")?;
    obj.get("seed")
        .and_then(|x| x.as_u64())
        .ok_or("seed must be an unsigned integer")?;
    let pass = obj
        .get("pass")
        .and_then(|x| x.as_bool())
        .ok_or("pass must be a boolean")?;
    let checks = obj
        .get("checks")
        .and_then(|x| x.as_array())
        .ok_or("checks must be an array")?;
    let mut names = Vec::new();
    let mut all = true;
    for c in checks {
        let c = c.as_object().ok_or("check must be an object")?;
        let name = c
            .get("name")
            .and_then(|x| x.as_str())
            .ok_or("check.name must be a string")?;
        c.get("paper_anchor")
            .and_then(|x| x.as_str())
            .ok_or(format!("{name}: paper_anchor must be a string"))?;
        c.get("values")
            .and_then(|x| x.as_object())
            .ok_or(format!("{name}: values must be an object"))?;
        c.get("tolerance")
            .and_then(|x| x.as_object())
            .ok_or(format!("{name}: tolerance must be an object"))?;
        all &= c
            .get("pass")
            .and_then(|x| x.as_bool())
            .ok_or(format!("{name}: pass must be a boolean"))?;
        names.push(name.to_string());
    }
    if names.windows(2).any(|w| w[0] > w[1]) {
        return Err("checks must be sorted by name".into());
    }
    if all != pass {
        return Err("report pass must equal the conjunction of check verdicts".into());
    }
    Ok(())
}
