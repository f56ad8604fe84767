//! The `plcurv` command-line front end.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (flow converged, solve converged, no Delaunay violations) |
//! | 1 | `delaunay --check` found violating edges |
//! | 2 | unreadable or unparsable input, bad command line |
//! | 3 | input parses but is not a valid surface, metric or target |
//! | 4 | flow hit `--max-steps` |
//! | 5 | numerical failure (step size underflow, stalled solve, rigidity failure) |
//! | 6 | target not admissible (α·R̄ has a positive entry) |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::flows::{run_flow, FlowConfig, FlowError, FlowKind, Integrator, RunOutcome};
use crate::geometry::{
    alpha_curvature, curvature, is_delaunay_all, make_delaunay, GeometryError, PLMetric,
};
use crate::mesh::io::{load_lengths_json, load_mesh, to_lengths_doc, LoadError, MeshFormat};
use crate::mesh::{MeshError, Triangulation};
use crate::solver::{
    newton_solve, rigidity_check, NewtonConfig, RigidityVerdict, SolverError, Target,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_MAX_STEPS: i32 = 4;
pub const EXIT_FAILURE: i32 = 5;
pub const EXIT_UNSUPPORTED: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot determine the format of {0}; pass --format")]
    UnknownFormat(PathBuf),
    #[error("{path}: {source}")]
    Load { path: PathBuf, source: LoadError },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::UnknownFormat(_) | CliError::Parse(_) => EXIT_PARSE,
            CliError::Load { source, .. } if source.is_parse_error() => EXIT_PARSE,
            CliError::Load { .. } | CliError::Invalid(_) | CliError::Mesh(_) => EXIT_INVALID,
            CliError::Geometry(_) => EXIT_INVALID,
            CliError::Write { .. } => EXIT_FAILURE,
            CliError::Solver(e) => match e {
                SolverError::UnsupportedTarget { .. } => EXIT_UNSUPPORTED,
                SolverError::InfeasibleTarget { .. } | SolverError::TargetSize { .. } => {
                    EXIT_INVALID
                }
                SolverError::Geometry(_) => EXIT_INVALID,
                _ => EXIT_FAILURE,
            },
            CliError::Flow(e) => match e {
                FlowError::InvalidConfig(_) | FlowError::Geometry(_) => EXIT_INVALID,
                _ => EXIT_FAILURE,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "plcurv",
    version,
    about = "Combinatorial alpha-curvature on PL surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write a replayable manifest of this run.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "command")]
pub enum Command {
    /// Per-vertex K and R_alpha, Gauss-Bonnet residual, Delaunay violations.
    Curvature(CurvatureArgs),
    /// Run the alpha-Yamabe or alpha-Calabi flow.
    Flow(FlowArgs),
    /// Newton minimization of the Ricci energy for a target curvature.
    Solve(SolveArgs),
    /// Check or enforce the intrinsic Delaunay condition.
    Delaunay(DelaunayArgs),
    /// Solve from several random starts and compare the solutions.
    Rigidity(RigidityArgs),
    /// Re-run the command recorded in a manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct InputArgs {
    /// Mesh file: .off, .obj or LENGTHS_JSON (.json).
    pub input: PathBuf,
    /// Override the format guessed from the extension (off, obj, json).
    #[arg(long)]
    pub format: Option<MeshFormat>,
    /// JSON array of log-factors; defaults to the "u" field of a
    /// LENGTHS_JSON input, or zeros.
    #[arg(long)]
    pub u_file: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct CurvatureArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowArg {
    Yamabe,
    Calabi,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorArg {
    Euler,
    Rk4,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct FlowArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "yamabe")]
    pub flow: FlowArg,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Initial and largest step (default 0.1 for Yamabe, 0.01 for Calabi).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_steps: usize,
    #[arg(long, value_enum, default_value = "on")]
    pub surgery: Switch,
    #[arg(long, value_enum, default_value = "euler")]
    pub integrator: IntegratorArg,
    /// Skip the per-step shift that pins the conserved quantity.
    #[arg(long)]
    pub no_renormalize: bool,
    /// History CSV (t,max_dev,conserved,energy,flips,dt).
    #[arg(long)]
    pub out_history: Option<PathBuf>,
    /// Final state as LENGTHS_JSON with u, alpha and t.
    #[arg(long)]
    pub out_state: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    /// `const`, or a JSON array with one target value per vertex.
    #[arg(long, default_value = "const")]
    pub target: String,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    /// Result JSON: u, final report and the solved state.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-iteration CSV (iter,grad_inf,value,step,flips).
    #[arg(long)]
    pub out_trace: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
#[group(id = "mode", required = true, multiple = false, args = ["check", "fix"])]
pub struct DelaunayArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// List violating edges; exit 1 if there are any.
    #[arg(long)]
    pub check: bool,
    /// Flip to a Delaunay triangulation and write LENGTHS_JSON.
    #[arg(long)]
    pub fix: bool,
    /// Output for --fix (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct RigidityArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value = "const")]
    pub target: String,
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}

/// Everything needed to re-run a command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    #[serde(flatten)]
    pub command: Command,
}

impl RunManifest {
    pub fn new(command: Command) -> Self {
        RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
        }
    }
}

/// Sets up logging from `PLCURV_LOG` (quiet, info or debug; warnings by
/// default). Safe to call more than once.
pub fn init_logging() {
    let level = match std::env::var("PLCURV_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .target(env_logger::Target::Stderr)
        .try_init();
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Normal output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let command = match &cli.command {
        Command::Replay(r) => {
            let bytes = read(&r.manifest)?;
            let m: RunManifest = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::Parse(format!("{}: {e}", r.manifest.display())))?;
            m.command
        }
        c => c.clone(),
    };
    if let Some(path) = &cli.manifest {
        let s =
            serde_json::to_string_pretty(&RunManifest::new(command.clone())).expect("serializable");
        write_atomic(path, format!("{s}\n").as_bytes())?;
    }
    match &command {
        Command::Curvature(a) => cmd_curvature(a, out),
        Command::Flow(a) => cmd_flow(a, out),
        Command::Solve(a) => cmd_solve(a, out),
        Command::Delaunay(a) => cmd_delaunay(a, out),
        Command::Rigidity(a) => cmd_rigidity(a, out),
        Command::Replay(_) => Err(CliError::Invalid(
            "a manifest cannot contain a replay".into(),
        )),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes via a temporary file in the same directory and renames it into
/// place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let err = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(value).expect("serializable");
    writeln!(out, "{s}").map_err(|source| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

struct Loaded {
    tri: Triangulation,
    metric: PLMetric,
    u: Vec<f64>,
}

fn load_input(a: &InputArgs) -> Result<Loaded, CliError> {
    let format = match a.format {
        Some(f) => f,
        None => MeshFormat::from_path(&a.input)
            .ok_or_else(|| CliError::UnknownFormat(a.input.clone()))?,
    };
    let bytes = read(&a.input)?;
    let wrap = |source| CliError::Load {
        path: a.input.clone(),
        source,
    };
    let (tri, metric, doc_u) = if format == MeshFormat::LengthsJson {
        let s = load_lengths_json(&bytes).map_err(wrap)?;
        (s.tri, s.metric, s.u)
    } else {
        let (t, m) = load_mesh(&bytes, format).map_err(wrap)?;
        (t, m, None)
    };
    let u = match &a.u_file {
        Some(p) => read_vector(p)?,
        None => doc_u.unwrap_or_else(|| vec![0.0; tri.vertex_count()]),
    };
    if u.len() != tri.vertex_count() {
        return Err(CliError::Invalid(format!(
            "u has {} entries for {} vertices",
            u.len(),
            tri.vertex_count()
        )));
    }
    Ok(Loaded { tri, metric, u })
}

fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    let bytes = read(path)?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn parse_target(s: &str) -> Result<Target, CliError> {
    if s == "const" {
        Ok(Target::Constant)
    } else {
        Ok(Target::Prescribed(read_vector(Path::new(s))?))
    }
}

fn cmd_curvature(a: &CurvatureArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = load_input(&a.input)?;
    let m = crate::geometry::scale_metric(&l.tri, &l.metric, &l.u)?;
    let chi = l.tri.euler_characteristic();
    let k = curvature(&l.tri, &m);
    let rep = alpha_curvature(&k, &l.u, a.alpha, chi);
    let residual = rep.sum_k - 2.0 * std::f64::consts::PI * chi as f64;
    let violations = is_delaunay_all(&l.tri, &m);
    emit(
        out,
        &json!({
            "K": rep.k,
            "R_alpha": rep.r_alpha,
            "alpha": a.alpha,
            "chi": chi,
            "sum_K": rep.sum_k,
            "gauss_bonnet_residual": residual,
            "R_av": rep.r_av,
            "max_dev": rep.max_dev,
            "delaunay_violations": violations,
        }),
    )?;
    Ok(EXIT_OK)
}

fn cmd_flow(a: &FlowArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = load_input(&a.input)?;
    let kind = match a.flow {
        FlowArg::Yamabe => FlowKind::Yamabe,
        FlowArg::Calabi => FlowKind::Calabi,
    };
    let mut cfg = FlowConfig::new(kind);
    if let Some(dt) = a.dt {
        cfg.dt = dt;
    }
    cfg.tol = a.tol;
    cfg.max_steps = a.max_steps;
    cfg.surgery = a.surgery == Switch::On;
    cfg.integrator = match a.integrator {
        IntegratorArg::Euler => Integrator::Euler,
        IntegratorArg::Rk4 => Integrator::Rk4,
    };
    cfg.renormalize = !a.no_renormalize;

    let run = run_flow(&l.tri, &l.metric, &l.u, a.alpha, &cfg)?;
    if let Some(p) = &a.out_history {
        write_atomic(p, run.history.to_csv().as_bytes())?;
    }
    if let Some(p) = &a.out_state {
        let s = serde_json::to_string_pretty(&run.state.snapshot()).expect("serializable");
        write_atomic(p, format!("{s}\n").as_bytes())?;
    }
    let (outcome, code, reason) = match &run.outcome {
        RunOutcome::Converged => ("converged", EXIT_OK, None),
        RunOutcome::MaxSteps => ("max_steps", EXIT_MAX_STEPS, None),
        RunOutcome::Failed(e) => ("failed", EXIT_FAILURE, Some(e.to_string())),
    };
    emit(
        out,
        &json!({
            "outcome": outcome,
            "reason": reason,
            "steps": run.state.step_count,
            "t": run.state.t,
            "max_dev": run.final_report.max_dev,
            "R_av": run.final_report.r_av,
            "flips": run.state.flips.len(),
            "unsupported_regime": run.unsupported_regime,
            "u": run.state.u,
        }),
    )?;
    Ok(code)
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = load_input(&a.input)?;
    let target = parse_target(&a.target)?;
    let cfg = NewtonConfig {
        tol: a.tol,
        max_iter: a.max_iter,
    };
    let r = newton_solve(&l.tri, &l.metric, &l.u, a.alpha, &target, &cfg)?;
    if let Some(p) = &a.out_trace {
        write_atomic(p, r.trace_csv().as_bytes())?;
    }
    let grad_inf = r.trace.last().map(|t| t.grad_inf).unwrap_or(f64::NAN);
    let mut state = to_lengths_doc(&r.tri, &r.base);
    state.u = Some(r.u.clone());
    state.alpha = Some(a.alpha);
    let doc = json!({
        "u": r.u,
        "alpha": a.alpha,
        "admissibility": r.admissibility,
        "iterations": r.iterations(),
        "grad_inf": grad_inf,
        "flips": r.flips.len(),
        "target": r.rbar,
        "report": r.report,
        "state": state,
    });
    if let Some(p) = &a.out {
        let s = serde_json::to_string_pretty(&doc).expect("serializable");
        write_atomic(p, format!("{s}\n").as_bytes())?;
    }
    emit(out, &doc)?;
    Ok(EXIT_OK)
}

fn cmd_delaunay(a: &DelaunayArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = load_input(&a.input)?;
    let m = crate::geometry::scale_metric(&l.tri, &l.metric, &l.u)?;
    if a.check {
        let v = is_delaunay_all(&l.tri, &m);
        let code = if v.is_empty() {
            EXIT_OK
        } else {
            EXIT_VIOLATIONS
        };
        emit(out, &json!({ "violations": v }))?;
        return Ok(code);
    }
    // Flip the scaled metric, then carry u over unchanged.
    let (tri, fixed, log) = make_delaunay(&l.tri, &m)?;
    log::info!("{} flips", log.len());
    let mut doc = to_lengths_doc(&tri, &fixed);
    if l.u.iter().any(|&x| x != 0.0) {
        log::info!("writing the scaled metric; u is folded into the lengths");
    }
    doc.u = None;
    let s = serde_json::to_string_pretty(&doc).expect("serializable");
    match &a.out {
        Some(p) => write_atomic(p, format!("{s}\n").as_bytes())?,
        None => writeln!(out, "{s}").map_err(|source| CliError::Write {
            path: PathBuf::from("<stdout>"),
            source,
        })?,
    }
    Ok(EXIT_OK)
}

fn cmd_rigidity(a: &RigidityArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let l = load_input(&a.input)?;
    let target = parse_target(&a.target)?;
    // Starts are drawn around u = 0 of the loaded metric.
    let base = crate::geometry::scale_metric(&l.tri, &l.metric, &l.u)?;
    let r = rigidity_check(&l.tri, &base, a.alpha, &target, a.trials, a.seed)?;
    let doc = serde_json::to_value(&r).expect("serializable");
    if let Some(p) = &a.out {
        let s = serde_json::to_string_pretty(&doc).expect("serializable");
        write_atomic(p, format!("{s}\n").as_bytes())?;
    }
    emit(out, &doc)?;
    Ok(match r.verdict {
        RigidityVerdict::Pass => EXIT_OK,
        RigidityVerdict::Fail => EXIT_FAILURE,
        RigidityVerdict::Unsupported => EXIT_UNSUPPORTED,
    })
}
