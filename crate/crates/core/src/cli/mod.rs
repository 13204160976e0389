//! Command-line front end: `solve`, `sweep`, `validate` and `compare`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver failure,
//! 3 validation failure.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{ObjectiveKind, ProblemConfig, RadiusSweep, Tolerances};

use crate::error::{Error, Result};
use crate::fmt::sig17;
use crate::geometry::{FeasibleSet, Norm, Shape};
use crate::lp::dot;
use crate::oracle;
use crate::reformulate;
use crate::regret::{self, AmbiguitySet, RiskLevel};
use crate::solve::{self, MethodChoice, SolveOptions, SolveReport, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "REGRETDRO_THREADS";

/// Slack allowed below zero on primal-minus-analytic gaps.
const GAP_FLOOR: f64 = 1e-7;
const LAMBDA_TOL: f64 = 1e-6;

pub const SUPPORTED_MATRIX: &str = "\
supported (set, dual norm) combinations:
  set        dual   regret objectives        cost objective
  vpolytope  l1     simplex                  simplex
  vpolytope  linf   simplex                  simplex
  vpolytope  l2     -                        -
  box        l1     -                        simplex, subgradient
  box        l2     -                        subgradient
  box        linf   simplex, subgradient     simplex, subgradient
  norm_ball  l1     -                        subgradient (l2 ball)
  norm_ball  l2     subgradient (l2 ball)    subgradient (l2 ball)
  norm_ball  linf   subgradient (l2 ball)    subgradient (l2 ball)
the dual norm is the dual of ground_norm: l1 <-> linf, l2 <-> l2";

#[derive(Debug, Parser)]
#[command(name = "regretdro", version, about = "Wasserstein distributionally robust regret minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve at a single radius and print a JSON report.
    Solve(Common),
    /// Solve over a radius sweep and print CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Also emit the worst-case expected cost path.
        #[arg(long)]
        compare_dro: bool,
    },
    /// Check a solution against the primal oracles and print JSON diagnostics.
    Validate(Common),
    /// Compare regret and cost optimizers over a radius sweep as CSV.
    Compare(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// What a command produced: text for `--out` or stdout, and messages for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub messages: Vec<String>,
}

impl Outcome {
    fn fail(code: i32, message: String) -> Self {
        Self { code, output: String::new(), messages: vec![message] }
    }
}

/// Parses arguments, runs the command and writes its output. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let out_path = match &cli.command {
        Command::Solve(c) | Command::Validate(c) | Command::Compare(c) => c.out.clone(),
        Command::Sweep { common, .. } => common.out.clone(),
    };
    let outcome = run(&cli.command);
    for m in &outcome.messages {
        eprintln!("{m}");
    }
    if !outcome.output.is_empty() {
        let written = match &out_path {
            Some(p) => std::fs::write(p, &outcome.output),
            None => std::io::stdout().write_all(outcome.output.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("cannot write output: {e}");
            return EXIT_CONFIG;
        }
    }
    outcome.code
}

pub fn run(command: &Command) -> Outcome {
    let (common, compare_dro) = match command {
        Command::Solve(c) | Command::Validate(c) | Command::Compare(c) => (c, false),
        Command::Sweep { common, compare_dro } => (common, *compare_dro),
    };
    let text = match std::fs::read_to_string(&common.config) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_CONFIG, format!("cannot read {}: {e}", common.config.display())),
    };
    let cfg = match ProblemConfig::from_json(&text) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(EXIT_CONFIG, format!("config error: {e}")),
    };
    let seed = common.seed.unwrap_or(cfg.seed);
    match command {
        Command::Solve(_) => cmd_solve(&cfg, seed),
        Command::Sweep { .. } => cmd_sweep(&cfg, seed, compare_dro),
        Command::Validate(_) => cmd_validate(&cfg, seed),
        Command::Compare(_) => cmd_compare(&cfg, seed),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    struct Sig17;
    impl serde_json::ser::Formatter for Sig17 {
        fn write_f64<W: ?Sized + std::io::Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
            writer.write_all(sig17(value).as_bytes())
        }
    }
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).expect("report serializes");
    buf.push(b'\n');
    String::from_utf8(buf).expect("utf-8 json")
}

fn error_messages(e: &Error) -> Vec<String> {
    let mut m = vec![format!("solver error: {e}")];
    if matches!(e, Error::UnsupportedCombination { .. }) {
        m.push(SUPPORTED_MATRIX.to_string());
    }
    m
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::InvalidAlpha(_) | Error::InvalidRadius(_) | Error::DimensionMismatch { .. } | Error::InvalidInput(_) => {
            EXIT_CONFIG
        }
        _ => EXIT_SOLVER,
    }
}

/// Solves the config's problem at radius `r` with the given objective.
pub fn solve_point(cfg: &ProblemConfig, r: f64, kind: ObjectiveKind, options: &SolveOptions) -> Result<SolveReport> {
    match (kind, cfg.alpha) {
        (ObjectiveKind::Drro, Some(a)) => solve::solve_wcvar(&cfg.set, &cfg.nominal, r, a, cfg.ground_norm, options),
        (ObjectiveKind::Drro, None) => solve::solve_drro(&cfg.set, &cfg.nominal, r, cfg.ground_norm, options),
        (ObjectiveKind::Dro, _) => solve::solve_dro(&cfg.set, &cfg.nominal, r, cfg.ground_norm, options),
    }
}

/// Label written for an objective: the CVaR variant of the regret objective is `wcvar`.
fn kind_label(cfg: &ProblemConfig, kind: ObjectiveKind) -> &'static str {
    match (kind, cfg.alpha) {
        (ObjectiveKind::Drro, Some(_)) => "wcvar",
        _ => kind.as_str(),
    }
}

#[derive(Serialize)]
struct SolveJson<'a> {
    x_star: &'a [f64],
    objective: f64,
    lambda: f64,
    method: &'static str,
    iterations: usize,
    status: &'static str,
    residual: f64,
    nonunique: bool,
    objective_kind: &'static str,
    radius: f64,
}

fn cmd_solve(cfg: &ProblemConfig, seed: u64) -> Outcome {
    let Some(r) = cfg.radius else {
        return Outcome::fail(EXIT_CONFIG, "config error: solve needs a scalar radius".into());
    };
    match solve_point(cfg, r, cfg.objective, &cfg.solve_options(seed)) {
        Ok(rep) => {
            let json = to_json(&SolveJson {
                x_star: &rep.x_star,
                objective: rep.objective,
                lambda: rep.lambda_star,
                method: rep.method.as_str(),
                iterations: rep.iterations,
                status: rep.status.as_str(),
                residual: rep.residual,
                nonunique: rep.nonunique,
                objective_kind: kind_label(cfg, cfg.objective),
                radius: r,
            });
            let code = if rep.status == Status::Optimal { EXIT_OK } else { EXIT_SOLVER };
            Outcome { code, output: json, messages: Vec::new() }
        }
        Err(e) => Outcome { code: error_code(&e), output: String::new(), messages: error_messages(&e) },
    }
}

fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// Solves every radius in parallel; results come back in input order.
fn solve_all(
    cfg: &ProblemConfig,
    radii: &[f64],
    kinds: &[ObjectiveKind],
    options: &SolveOptions,
) -> Vec<Vec<Result<SolveReport>>> {
    thread_pool().install(|| {
        radii
            .par_iter()
            .map(|&r| kinds.iter().map(|&k| solve_point(cfg, r, k, options)).collect())
            .collect()
    })
}

fn header(n: usize, prefix: &str) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}x{i}")).collect()
}

fn push_x(row: &mut Vec<String>, x: &[f64], n: usize) {
    if x.len() == n {
        row.extend(x.iter().map(|v| sig17(*v)));
    } else {
        row.extend(std::iter::repeat_n("nan".to_string(), n));
    }
}

fn status_text(res: &Result<SolveReport>) -> &'static str {
    match res {
        Ok(rep) => rep.status.as_str(),
        Err(Error::UnsupportedCombination { .. }) => "UNSUPPORTED",
        Err(_) => "ERROR",
    }
}

fn sweep_row(r: f64, res: &Result<SolveReport>, n: usize) -> Vec<String> {
    let mut row = vec![sig17(r)];
    match res {
        Ok(rep) => {
            push_x(&mut row, &rep.x_star, n);
            row.push(sig17(rep.objective));
            row.push(sig17(rep.lambda_star));
            row.push(rep.method.as_str().to_string());
        }
        Err(_) => {
            push_x(&mut row, &[], n);
            row.extend(["nan".to_string(), "nan".to_string(), "NONE".to_string()]);
        }
    }
    row.push(status_text(res).to_string());
    row
}

/// Messages for the distinct errors among `results`, in first-seen order.
fn collect_errors<'a>(results: impl Iterator<Item = &'a Result<SolveReport>>) -> Vec<String> {
    let mut seen: Vec<String> = Vec::new();
    let mut out = Vec::new();
    for res in results {
        if let Err(e) = res {
            let text = e.to_string();
            if !seen.contains(&text) {
                seen.push(text);
                out.extend(error_messages(e));
            }
        }
    }
    out
}

fn cmd_sweep(cfg: &ProblemConfig, seed: u64, compare_dro: bool) -> Outcome {
    let n = cfg.set.dim();
    let radii = cfg.radii();
    let kinds: Vec<ObjectiveKind> = if compare_dro {
        vec![cfg.objective, if cfg.objective == ObjectiveKind::Dro { ObjectiveKind::Drro } else { ObjectiveKind::Dro }]
    } else {
        vec![cfg.objective]
    };
    if compare_dro && cfg.alpha.is_some() && cfg.objective == ObjectiveKind::Dro {
        return Outcome::fail(EXIT_CONFIG, "config error: alpha applies only to the drro objective".into());
    }
    let results = solve_all(cfg, &radii, &kinds, &cfg.solve_options(seed));
    let mut cols = vec!["r".to_string()];
    cols.extend(header(n, ""));
    cols.extend(["objective", "lambda", "method", "status"].map(String::from));
    if compare_dro {
        cols.push("objective_kind".into());
    }
    let mut out = cols.join(",") + "\n";
    let mut all_ok = true;
    for (r, per_kind) in radii.iter().zip(&results) {
        for (kind, res) in kinds.iter().zip(per_kind) {
            all_ok &= matches!(res, Ok(rep) if rep.status == Status::Optimal);
            let mut row = sweep_row(*r, res, n);
            if compare_dro {
                row.push(kind_label(cfg, *kind).to_string());
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    let messages = collect_errors(results.iter().flatten());
    Outcome { code: if all_ok { EXIT_OK } else { EXIT_SOLVER }, output: out, messages }
}

fn cmd_compare(cfg: &ProblemConfig, seed: u64) -> Outcome {
    let n = cfg.set.dim();
    let options = cfg.solve_options(seed);
    let center = match solve::regularizer_center(&cfg.set, cfg.ground_norm, &options) {
        Ok(c) => c.x_star,
        Err(e) => return Outcome { code: error_code(&e), output: String::new(), messages: error_messages(&e) },
    };
    let dual = cfg.ground_norm.dual();
    let radii = cfg.radii();
    let results = solve_all(cfg, &radii, &[ObjectiveKind::Drro, ObjectiveKind::Dro], &options);
    let mut cols = vec!["r".to_string()];
    cols.extend(header(n, "drro_"));
    cols.extend(header(n, "dro_"));
    cols.extend(
        ["drro_objective", "dro_objective", "drro_center_distance", "dro_dual_norm", "drro_status", "dro_status"]
            .map(String::from),
    );
    let mut out = cols.join(",") + "\n";
    let mut all_ok = true;
    for (r, pair) in radii.iter().zip(&results) {
        let (a, b) = (&pair[0], &pair[1]);
        let mut row = vec![sig17(*r)];
        let xa = a.as_ref().map(|rep| rep.x_star.clone()).unwrap_or_default();
        let xb = b.as_ref().map(|rep| rep.x_star.clone()).unwrap_or_default();
        push_x(&mut row, &xa, n);
        push_x(&mut row, &xb, n);
        let obj = |res: &Result<SolveReport>| res.as_ref().map_or(f64::NAN, |rep| rep.objective);
        row.push(sig17(obj(a)));
        row.push(sig17(obj(b)));
        row.push(if xa.len() == n { sig17(Norm::L2.distance(&xa, &center)) } else { "nan".into() });
        row.push(if xb.len() == n { sig17(dual.eval(&xb)) } else { "nan".into() });
        row.push(status_text(a).into());
        row.push(status_text(b).into());
        all_ok &= [a, b].iter().all(|res| matches!(res, Ok(rep) if rep.status == Status::Optimal));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    let messages = collect_errors(results.iter().flatten());
    Outcome { code: if all_ok { EXIT_OK } else { EXIT_SOLVER }, output: out, messages }
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    result: &'static str,
    #[serde(skip_serializing_if = "String::is_empty")]
    note: String,
}

impl Check {
    fn new(name: &'static str, value: f64, tolerance: f64, pass: bool, note: String) -> Self {
        Self { name, value, tolerance, result: if pass { "PASS" } else { "FAIL" }, note }
    }

    fn skip(name: &'static str, note: &str) -> Self {
        Self { name, value: f64::NAN, tolerance: f64::NAN, result: "SKIP", note: note.into() }
    }
}

#[derive(Serialize)]
struct ValidateJson<'a> {
    radius: f64,
    objective_kind: &'static str,
    x_star: &'a [f64],
    objective: f64,
    checks: Vec<Check>,
    result: &'static str,
}

/// Exact objective of the config's problem at `x`.
fn exact_objective(cfg: &ProblemConfig, amb: &AmbiguitySet, x: &[f64]) -> Result<f64> {
    match (cfg.objective, cfg.alpha) {
        (ObjectiveKind::Drro, Some(a)) => regret::worst_case_cvar_regret(&cfg.set, x, amb, RiskLevel::new(a)?),
        (ObjectiveKind::Drro, None) => regret::worst_case_expected_regret(&cfg.set, x, amb),
        (ObjectiveKind::Dro, _) => {
            Ok(dot(&cfg.nominal.mean(), x) + amb.radius() * cfg.ground_norm.dual().eval(x))
        }
    }
}

fn gap_check(name: &'static str, cert: Result<oracle::GapCertificate>, tol: f64) -> Check {
    match cert {
        Ok(c) => Check::new(
            name,
            c.gap,
            tol,
            c.reached && c.gap >= -GAP_FLOOR,
            format!("analytic {} primal {} rounds {}", sig17(c.analytic), sig17(c.primal), c.refinements),
        ),
        Err(e) => Check::new(name, f64::NAN, tol, false, e.to_string()),
    }
}

/// Closed-form optimal values of the two regret LP builders.
fn builder_values(set: &FeasibleSet, cfg: &ProblemConfig, r: f64) -> Result<(f64, f64)> {
    let a = solve::solve_compiled(&reformulate::build_vrep(set, &cfg.nominal, r, Norm::Linf)?)?;
    let b = solve::solve_compiled(&reformulate::build_support_reform(set, &cfg.nominal, r)?)?;
    if a.status != Status::Optimal || b.status != Status::Optimal {
        return Err(Error::NumericalBreakdown(f64::NAN));
    }
    Ok((a.objective, b.objective))
}

fn cmd_validate(cfg: &ProblemConfig, seed: u64) -> Outcome {
    let Some(r) = cfg.radius else {
        return Outcome::fail(EXIT_CONFIG, "config error: validate needs a scalar radius".into());
    };
    let amb = match AmbiguitySet::new(cfg.nominal.clone(), r, cfg.ground_norm) {
        Ok(a) => a,
        Err(e) => return Outcome::fail(EXIT_CONFIG, format!("config error: {e}")),
    };
    let tol = cfg.tolerances();
    let options = cfg.solve_options(seed);
    let rep = match solve_point(cfg, r, cfg.objective, &options) {
        Ok(rep) if rep.status == Status::Optimal => rep,
        Ok(rep) => {
            return Outcome::fail(EXIT_SOLVER, format!("solver finished with status {}", rep.status.as_str()))
        }
        Err(e) => return Outcome { code: error_code(&e), output: String::new(), messages: error_messages(&e) },
    };
    let x = rep.x_star.clone();
    let set = &cfg.set;
    let dual = cfg.ground_norm.dual();
    let mut checks = Vec::new();

    let inside = set.contains(&x, solve::REPORT_FEASIBILITY_TOL).unwrap_or(false);
    checks.push(Check::new("feasibility", rep.residual, solve::REPORT_FEASIBILITY_TOL, inside, String::new()));

    match (cfg.objective, cfg.alpha) {
        (ObjectiveKind::Dro, _) => {
            checks.push(gap_check("cost_gap", oracle::cost_gap_certificate(&x, &amb, tol.gap, tol.max_refinements), tol.gap))
        }
        (ObjectiveKind::Drro, alpha) => {
            checks.push(gap_check(
                "regret_gap",
                oracle::dual_gap_certificate(set, &x, &amb, tol.gap, tol.max_refinements),
                tol.gap,
            ));
            if let Some(a) = alpha {
                let cert = RiskLevel::new(a)
                    .and_then(|lvl| oracle::cvar_gap_certificate(set, &x, &amb, lvl, tol.cvar_gap, tol.max_refinements));
                checks.push(gap_check("cvar_gap", cert, tol.cvar_gap));
            }
        }
    }

    if r > 0.0 {
        let reference = match cfg.objective {
            ObjectiveKind::Dro => Ok(dual.eval(&x)),
            ObjectiveKind::Drro => set.farthest_distance(&x, dual).map(|f| f.value),
        };
        checks.push(match reference {
            Ok(v) => {
                let d = (rep.lambda_star - v).abs();
                Check::new("lambda", d, LAMBDA_TOL, d <= LAMBDA_TOL, String::new())
            }
            Err(e) => Check::new("lambda", f64::NAN, LAMBDA_TOL, false, e.to_string()),
        });
    } else {
        checks.push(Check::skip("lambda", "radius is zero"));
    }

    let vrep_pair = matches!(set.shape(), Shape::VPolytope { .. })
        && dual == Norm::Linf
        && cfg.objective == ObjectiveKind::Drro
        && cfg.alpha.is_none();
    checks.push(if vrep_pair {
        match builder_values(set, cfg, r) {
            Ok((a, b)) => {
                let d = (a - b).abs();
                Check::new("builder_equivalence", d, tol.equivalence, d <= tol.equivalence, String::new())
            }
            Err(e) => Check::new("builder_equivalence", f64::NAN, tol.equivalence, false, e.to_string()),
        }
    } else {
        Check::skip("builder_equivalence", "needs a vertex list, linf dual and the expected-regret objective")
    });

    let cross = if rep.method == solve::Method::Simplex && set.supports_projection() {
        let other = SolveOptions { method: MethodChoice::Subgradient, ..options.clone() };
        Some(solve_point(cfg, r, cfg.objective, &other))
    } else if rep.method == solve::Method::Subgradient {
        let other = SolveOptions { method: MethodChoice::Simplex, ..options.clone() };
        solve_point(cfg, r, cfg.objective, &other).ok().map(Ok)
    } else {
        None
    };
    checks.push(match cross {
        Some(Ok(o)) => {
            let d = (o.objective - rep.objective).abs();
            Check::new("cross_solver", d, tol.cross_solver, d <= tol.cross_solver, String::new())
        }
        Some(Err(e)) => Check::new("cross_solver", f64::NAN, tol.cross_solver, false, e.to_string()),
        None => Check::skip("cross_solver", "only one solver applies"),
    });

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let optimality = (|| -> Result<f64> {
        let fx = exact_objective(cfg, &amb, &x)?;
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..tol.samples {
            let y = set.sample(&mut rng);
            worst = worst.max(fx - exact_objective(cfg, &amb, &y)?);
        }
        Ok(worst)
    })();
    checks.push(match optimality {
        Ok(w) => Check::new(
            "optimality",
            w,
            tol.optimality,
            w <= tol.optimality,
            format!("{} random feasible points", tol.samples),
        ),
        Err(e) => Check::new("optimality", f64::NAN, tol.optimality, false, e.to_string()),
    });

    let pass = checks.iter().all(|c| c.result != "FAIL");
    let json = to_json(&ValidateJson {
        radius: r,
        objective_kind: kind_label(cfg, cfg.objective),
        x_star: &x,
        objective: rep.objective,
        checks,
        result: if pass { "PASS" } else { "FAIL" },
    });
    Outcome { code: if pass { EXIT_OK } else { EXIT_VALIDATION }, output: json, messages: Vec::new() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ProblemConfig {
        ProblemConfig::from_json(text).unwrap()
    }

    #[test]
    fn json_uses_seventeen_digits() {
        assert_eq!(to_json(&vec![0.1, 1.0, f64::NAN]), "[0.10000000000000001,1,null]\n");
    }

    #[test]
    fn solve_on_box_reports_optimal() {
        let cfg = config(
            r#"{"set": {"type": "box", "lower": [0, 0], "upper": [2, 2]},
                "nominal": [{"point": [1, 1], "weight": 1}],
                "ground_norm": "l1", "radius": 0.5, "objective": "dro"}"#,
        );
        let out = cmd_solve(&cfg, 0);
        assert_eq!(out.code, EXIT_OK, "{:?}", out.messages);
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        assert_eq!(v["x_star"], serde_json::json!([0, 0]));
        assert_eq!(v["status"], "OPTIMAL");
        assert_eq!(v["objective_kind"], "dro");
    }

    #[test]
    fn unsupported_combination_prints_matrix() {
        let cfg = config(
            r#"{"set": {"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]},
                "nominal": [{"point": [1, 1], "weight": 1}],
                "ground_norm": "l2", "radius": 0.5}"#,
        );
        let out = cmd_solve(&cfg, 0);
        assert_eq!(out.code, EXIT_SOLVER);
        assert!(out.messages.iter().any(|m| m.contains("supported (set, dual norm)")));
    }

    #[test]
    fn sweep_rows_follow_radius_order() {
        let cfg = config(
            r#"{"set": {"type": "vpolytope", "vertices": [[0, 0], [1, 0], [0, 1]]},
                "nominal": [{"point": [1, 0.5], "weight": 1}],
                "ground_norm": "l1",
                "radius_sweep": {"min": 0.01, "max": 10, "count": 7, "log": true}}"#,
        );
        let out = cmd_sweep(&cfg, 0, true);
        assert_eq!(out.code, EXIT_OK);
        let lines: Vec<&str> = out.output.lines().collect();
        assert_eq!(lines[0], "r,x1,x2,objective,lambda,method,status,objective_kind");
        assert_eq!(lines.len(), 1 + 14);
        assert!(lines[1].ends_with(",drro") && lines[2].ends_with(",dro"));
        let radii: Vec<f64> = lines[1..].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert!(radii.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn validate_zero_radius_passes() {
        let cfg = config(
            r#"{"set": {"type": "box", "lower": [0, 0], "upper": [1, 1]},
                "nominal": [{"point": [1, -1], "weight": 0.5}, {"point": [-1, 1], "weight": 0.5}],
                "ground_norm": "l1", "radius": 0}"#,
        );
        let out = cmd_validate(&cfg, 3);
        assert_eq!(out.code, EXIT_OK, "{}", out.output);
        let v: serde_json::Value = serde_json::from_str(&out.output).unwrap();
        let gap = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "regret_gap").unwrap();
        assert_eq!(gap["value"], serde_json::json!(0));
    }
}
