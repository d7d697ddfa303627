//! Configuration-driven front end: parses a run configuration, dispatches
//! to the matching pipeline and renders a versioned JSON report plus
//! optional CSV tables.
//!
//! CSV tables per command (one file `<command>-<table>.csv` each):
//! - approx, sg-check: `samples` with `x1..xd, p, approximant, error`
//! - prop3: `curve` with `x, p, output, output_dd`
//! - borsuk: `trace` with `level, y1..yd, m, gap`
//! - counterexample: `chord_profiles` with `member, t, f, g_eps`
//! - convexity-test, separates-points: `witness` with
//!   `x1_1..x1_d, x2_1..x2_d, violation`, present only on failure

pub mod config;
pub mod separates;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use convexalg::borsuk::{find_common_direction_2d, find_common_direction_heuristic, LINE_TOL};
use convexalg::convexity::{midpoint_convexity_test, ConvexityCertificate};
use convexalg::counterexample::{chord_profile, theorem1b_demo, DemoOptions, DELTA_PRIME_TOL};
use convexalg::geometry::{make_grid, CHORD_TOL};
use convexalg::sgcore::{assemble_with, AssemblyReport, SgOptions};
use convexalg::univariate::{convex_exp_approx_with, prop3_pipeline, MonotoneGenerator};
use convexalg::{ConvexBody, Error, ExpPoly, FunctionExpr, Polynomial};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub use config::RunConfig;
pub use separates::separates_points;

pub const SCHEMA: &str = "convexalg/1";

/// Invalid input: unreadable file, bad configuration or arguments the
/// pipelines reject before computing anything. Maps to exit status 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InputError {
    pub kind: String,
    pub message: String,
}

impl InputError {
    fn new(kind: &str, message: impl ToString) -> Self {
        InputError {
            kind: kind.into(),
            message: message.to_string(),
        }
    }

    /// Error object written to standard error.
    pub fn to_json(&self) -> String {
        serde_json::json!({ "schema": SCHEMA, "error": self }).to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub clause: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    /// SHA-256 of the canonical JSON of the effective configuration.
    pub config_digest: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    pub result: Value,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
}

pub fn parse_config(text: &str) -> Result<RunConfig, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::new("config", e))
}

/// Parses, applies the seed override and runs.
pub fn execute(text: &str, seed: Option<u64>) -> Result<Outcome, InputError> {
    let mut cfg = parse_config(text)?;
    if let Some(s) = seed {
        cfg.set_seed(s);
    }
    run(&cfg)
}

pub fn config_digest(cfg: &RunConfig) -> String {
    let bytes = serde_json::to_vec(cfg).expect("config serializes");
    format!("{:x}", Sha256::digest(bytes))
}

fn is_input_error(e: &Error) -> bool {
    matches!(
        e,
        Error::DimensionMismatch { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidBody(_)
            | Error::InvalidExpr(_)
            | Error::OriginNotInterior
            | Error::EmptyGrid
            | Error::NotSmooth
            | Error::OutOfRange { .. }
    )
}

fn error_clause(e: &Error) -> String {
    match e {
        Error::RestrictionNotConvex { .. } => "restriction_not_convex".into(),
        Error::InputNotConvex(_) => "input_not_convex".into(),
        Error::ApproximantsTooCoarse { .. } => "approximants_too_coarse".into(),
        Error::MonotonicityFailed { .. } => "monotonicity_failed".into(),
        Error::DegreeCapExceeded { .. } => "degree_cap_exceeded".into(),
        Error::NoSignChangeFound => "no_sign_change_found".into(),
        Error::NotConverged { .. } => "not_converged".into(),
        Error::Infeasible(_) => "infeasible".into(),
        Error::Unbounded => "unbounded".into(),
        Error::NumericallyDegenerate(_) => "numerically_degenerate".into(),
        Error::CertificateFailed { clause, .. } => clause.clone(),
        _ => "input".into(),
    }
}

/// Pipeline result before it is wrapped in a report.
struct Computed {
    result: Value,
    failure: Option<Failure>,
    tables: Vec<Table>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn first_failed(certs: &[ConvexityCertificate]) -> Option<Failure> {
    certs.iter().find(|c| !c.passed()).map(|c| Failure {
        clause: c.check.clone(),
        detail: match &c.witness {
            Some(w) => format!("violation {:e} at {:?}", w.violation, w.x1),
            None => "failed".into(),
        },
    })
}

fn tolerances(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Runs a parsed configuration. Computational failures become a report
/// with `passed = false`; input errors are returned as `Err`.
pub fn run(cfg: &RunConfig) -> Result<Outcome, InputError> {
    let (tols, computed) = match cfg {
        RunConfig::Approx(c) => (tolerances(&[("eps", c.eps), ("certificate_tol", c.tol)]), run_approx(c)),
        RunConfig::Prop3(c) => (tolerances(&[("eps", c.eps)]), run_prop3(c)),
        RunConfig::SgCheck(c) => (
            tolerances(&[("eps", c.eps), ("certificate_tol", c.tol)]),
            run_sg_check(c),
        ),
        RunConfig::Borsuk(c) => (
            tolerances(&[("tol", c.tol), ("line_tol", LINE_TOL), ("chord_tol", CHORD_TOL)]),
            run_borsuk(c),
        ),
        RunConfig::Counterexample(c) => (
            tolerances(&[
                ("eps", c.eps),
                ("tol", c.tol),
                ("delta_prime_tol", DELTA_PRIME_TOL),
                ("equality_tol", 1e-9),
                ("line_tol", LINE_TOL),
                ("chord_tol", CHORD_TOL),
            ]),
            run_counterexample(c),
        ),
        RunConfig::ConvexityTest(c) => (tolerances(&[("certificate_tol", c.tol)]), run_convexity(c)),
        RunConfig::SeparatesPoints(c) => (tolerances(&[("separation_tol", c.tol)]), run_separates(c)),
    };
    let computed = match computed {
        Ok(c) => c,
        Err(e) if is_input_error(&e) => return Err(InputError::new("input", e)),
        Err(e) => Computed {
            result: Value::Null,
            failure: Some(Failure {
                clause: error_clause(&e),
                detail: e.to_string(),
            }),
            tables: Vec::new(),
        },
    };
    Ok(Outcome {
        report: Report {
            schema: SCHEMA,
            command: cfg.command(),
            config_digest: config_digest(cfg),
            seed: cfg.seed(),
            tolerances: tols,
            passed: computed.failure.is_none(),
            failure: computed.failure,
            result: computed.result,
        },
        tables: computed.tables,
    })
}

fn coords(prefix: &str, d: usize) -> Vec<String> {
    (1..=d).map(|k| format!("{prefix}{k}")).collect()
}

fn samples_table(
    p: &Polynomial,
    approx: &FunctionExpr,
    body: &ConvexBody,
    per_axis: usize,
    seed: u64,
) -> convexalg::Result<Table> {
    let grid = make_grid(body, per_axis, seed)?;
    let mut header = coords("x", body.dim());
    header.extend(["p", "approximant", "error"].map(String::from));
    let rows = grid
        .points
        .iter()
        .map(|x| {
            let (pv, av) = (p.eval(x), approx.eval_at(x));
            let mut row = x.clone();
            row.extend([pv, av, (av - pv).abs()]);
            row
        })
        .collect();
    Ok(Table {
        name: "samples".into(),
        header,
        rows,
    })
}

fn assembly_computed(r: &AssemblyReport, p: &Polynomial, body: &ConvexBody) -> convexalg::Result<Computed> {
    Ok(Computed {
        result: to_value(r),
        failure: first_failed(&r.certificates),
        tables: vec![samples_table(
            p,
            &r.approximant,
            body,
            r.options.per_axis,
            r.options.seed,
        )?],
    })
}

fn sg_options(per_axis: usize, n_pairs: usize, tol: f64, seed: u64) -> SgOptions {
    SgOptions {
        per_axis,
        n_pairs,
        tol,
        seed,
    }
}

fn run_approx(c: &config::ApproxConfig) -> convexalg::Result<Computed> {
    let opts = sg_options(c.per_axis, c.n_pairs, c.tol, c.seed);
    let r = convex_exp_approx_with(&c.polynomial, &c.body, c.eps, &opts)?;
    assembly_computed(&r, &c.polynomial, &c.body)
}

fn run_sg_check(c: &config::SgCheckConfig) -> convexalg::Result<Computed> {
    let opts = sg_options(c.per_axis, c.n_pairs, c.tol, c.seed);
    let grid = make_grid(&c.body, c.per_axis, c.seed)?;
    let r = assemble_with(&c.polynomial, &c.generators, &c.body, c.eps, &grid, &opts)?;
    assembly_computed(&r, &c.polynomial, &c.body)
}

fn run_prop3(c: &config::Prop3Config) -> convexalg::Result<Computed> {
    let [a, b] = c.interval;
    let h = c
        .generator
        .clone()
        .unwrap_or_else(|| ExpPoly::exponential(vec![1]).into());
    let gen = MonotoneGenerator::new(h, a, b)?;
    let r = prop3_pipeline(&c.polynomial, &gen, c.eps)?;
    let dd = r.output.partial_derivative(0)?.partial_derivative(0)?;
    let n = c.profile_samples.max(2);
    let rows = (0..n)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (n - 1) as f64;
            vec![x, c.polynomial.eval(&[x]), r.output.eval_at(&[x]), dd.eval_at(&[x])]
        })
        .collect();
    Ok(Computed {
        result: to_value(&r),
        failure: first_failed(&r.certificates),
        tables: vec![Table {
            name: "curve".into(),
            header: ["x", "p", "output", "output_dd"].map(String::from).to_vec(),
            rows,
        }],
    })
}

fn run_borsuk(c: &config::BorsukConfig) -> convexalg::Result<Computed> {
    let d = c.body.dim();
    let z = c.z.clone().unwrap_or_else(|| vec![0.0; d]);
    let r = if d == 2 && c.functions.len() == 2 {
        find_common_direction_2d(&c.functions[0], &c.functions[1], &c.body, c.tol, &z)?
    } else {
        find_common_direction_heuristic(&c.functions, &c.body, c.tol, &z, c.sphere_grid, c.seed)?
    };
    let mut header = vec!["level".to_string()];
    header.extend(coords("y", d));
    header.extend(["m", "gap"].map(String::from));
    let rows = r
        .trace
        .iter()
        .map(|t| {
            let mut row = vec![t.n as f64];
            row.extend(&t.y);
            row.extend([t.m, t.gap]);
            row
        })
        .collect();
    Ok(Computed {
        result: to_value(&r),
        failure: None,
        tables: vec![Table {
            name: "trace".into(),
            header,
            rows,
        }],
    })
}

fn run_counterexample(c: &config::CounterexampleConfig) -> convexalg::Result<Computed> {
    let opts = DemoOptions {
        grid_per_axis: c.grid_per_axis,
        sphere_grid: c.sphere_grid,
        soundness_samples: c.soundness_samples,
    };
    let r = theorem1b_demo(&c.functions, &c.body, c.eps, c.tol, c.seed, &opts)?;
    let mut rows = Vec::new();
    for (j, m) in r.members.iter().enumerate() {
        for [t, f, g] in chord_profile(&c.functions[j], &m.g_eps.g_eps, &r.pinned.chord, c.profile_samples) {
            rows.push(vec![j as f64, t, f, g]);
        }
    }
    let failure = if r.bound <= 0.0 {
        Some(Failure {
            clause: "nonapprox_bound".into(),
            detail: format!("bound {:e} is not positive", r.bound),
        })
    } else if !r.soundness.passed {
        Some(Failure {
            clause: "lower_bound_soundness".into(),
            detail: format!(
                "sampled distance {:e} below bound {:e}",
                r.soundness.min_distance, r.bound
            ),
        })
    } else {
        r.members.iter().find_map(|m| first_failed(&m.g_eps.certificates))
    };
    Ok(Computed {
        result: to_value(&r),
        failure,
        tables: vec![Table {
            name: "chord_profiles".into(),
            header: ["member", "t", "f", "g_eps"].map(String::from).to_vec(),
            rows,
        }],
    })
}

fn certificate_computed(cert: ConvexityCertificate, d: usize) -> Computed {
    let mut tables = Vec::new();
    if let Some(w) = &cert.witness {
        let mut header = coords("x1_", d);
        let mut row = w.x1.clone();
        if let Some(x2) = &w.x2 {
            header.extend(coords("x2_", d));
            row.extend(x2);
        }
        header.push("violation".into());
        row.push(w.violation);
        tables.push(Table {
            name: "witness".into(),
            header,
            rows: vec![row],
        });
    }
    Computed {
        result: to_value(&cert),
        failure: first_failed(std::slice::from_ref(&cert)),
        tables,
    }
}

fn run_convexity(c: &config::ConvexityTestConfig) -> convexalg::Result<Computed> {
    let cert = midpoint_convexity_test(&c.function, &c.body, c.n_pairs, c.tol, c.seed)?;
    Ok(certificate_computed(cert, c.body.dim()))
}

fn run_separates(c: &config::SeparatesPointsConfig) -> convexalg::Result<Computed> {
    let cert = separates_points(&c.generators, &c.body, c.n_pairs, c.seed, c.tol)?;
    Ok(certificate_computed(cert, c.body.dim()))
}

/// Writes every table as `<dir>/<command>-<name>.csv`.
pub fn write_tables(dir: &Path, command: &str, tables: &[Table]) -> Result<(), InputError> {
    fs::create_dir_all(dir).map_err(|e| InputError::new("io", e))?;
    for t in tables {
        let path = dir.join(format!("{command}-{}.csv", t.name));
        let mut w = csv::Writer::from_path(&path).map_err(|e| InputError::new("io", e))?;
        w.write_record(&t.header).map_err(|e| InputError::new("io", e))?;
        for row in &t.rows {
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(|e| InputError::new("io", e))?;
        }
        w.flush().map_err(|e| InputError::new("io", e))?;
    }
    Ok(())
}
