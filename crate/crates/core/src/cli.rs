//! `ouest` command-line front end.
//!
//! Commands read one JSON config, apply flag overrides, and write JSON or CSV
//! to stdout or to `--out DIR`. With `--out`, each output file is accompanied
//! by `<name>.manifest.json` holding the config echo and timings, so the data
//! files themselves are byte-identical across reruns.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::expectations::{McPanel, SignalAgnostic, SignalAware, DEFAULT_PANEL_SIZE};
use crate::metrics::{compute_metrics, ModelMetrics, ServiceDistribution};
use crate::policies::PolicySpec;
use crate::rng::SimRng;
use crate::sde::OuParams;
use crate::sim::{
    self, run_with_metrics, solve_model, PolicyKind, SimConfig, SimResult, SweepAxis, SweepBase,
    SweepRow, METRICS_SAMPLES,
};
use crate::solvers::{
    bisect_f, fixed_point_f, newton_f, Algorithm, SolveOptions, SolverReport, ThresholdSolution,
    DEFAULT_TOL,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    DEFAULT_PANEL_SIZE
}

impl Default for McSection {
    fn default() -> Self {
        McSection {
            samples: DEFAULT_PANEL_SIZE,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    /// Simulation seed; the Monte Carlo seed when absent.
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub queue_cap: Option<usize>,
    #[serde(default)]
    pub grid_only: bool,
}

fn default_horizon() -> f64 {
    1e5
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection {
            horizon: default_horizon(),
            dt: None,
            seed: None,
            queue_cap: None,
            grid_only: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default)]
    pub method: Algorithm,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            method: Algorithm::default(),
            tol: DEFAULT_TOL,
        }
    }
}

/// Experiment description shared by all commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub model: OuParams,
    pub service: ServiceDistribution,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default)]
    pub solver: SolverSection,
    /// Sampling-rate limit; absent or null means unlimited.
    #[serde(default)]
    pub fmax: Option<f64>,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.service.validate().map_err(as_config)?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn fmax(&self) -> f64 {
        self.fmax.unwrap_or(f64::INFINITY)
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            algorithm: self.solver.method,
            tol: self.solver.tol,
            ..SolveOptions::default()
        }
    }

    pub fn sim_seed(&self) -> u64 {
        self.sim.seed.unwrap_or(self.mc.seed)
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Provenance record written next to every output file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub config: Config,
    pub seed: u64,
    pub started_unix: f64,
    pub wall_seconds: f64,
    pub outputs: Vec<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "ouest",
    version,
    about = "Optimal sampling of Ornstein-Uhlenbeck signals over a queue"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON experiment config.
    pub config: PathBuf,
    /// Sampling-rate limit (`inf` for none).
    #[arg(long)]
    pub fmax: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write results and a manifest into this directory instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the threshold policy.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_algorithm)]
        method: Option<Algorithm>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        mc_samples: Option<usize>,
        /// mse_optimal or age_optimal.
        #[arg(long, default_value = "mse_optimal", value_parser = parse_policy)]
        policy: PolicyKind,
    },
    /// Iterate traces of all root finders on one panel, as CSV.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Comma-separated subset of bisection,newton,fixed_point, or `all`.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        mc_samples: Option<usize>,
    },
    /// Simulate one policy.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_policy)]
        policy: PolicyKind,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Use this β instead of solving for it.
        #[arg(long)]
        beta: Option<f64>,
        /// Error threshold for the MSE-optimal policy; derived from β when absent.
        #[arg(long)]
        v: Option<f64>,
        /// Uniform sampling period; `1/fmax` when absent.
        #[arg(long)]
        period: Option<f64>,
        #[arg(long)]
        mc_samples: Option<usize>,
        /// Write the sampled path (t, x, x_hat, age) as CSV.
        #[arg(long)]
        path_csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        path_stride: usize,
    },
    /// Simulate policies over a grid of `fmax` or log-normal `alpha` values.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_axis)]
        axis: SweepAxis,
        /// Comma-separated ascending values.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "mse_optimal,age_optimal,uniform,zero_wait", value_parser = parse_policy)]
        policies: Vec<PolicyKind>,
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        mc_samples: Option<usize>,
    },
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_policy(s: &str) -> std::result::Result<PolicyKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Input(_) | Error::Domain(_) | Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_SOLVER,
    }
}

fn error_json(code: &str, message: &str, context: serde_json::Value) -> String {
    json!({ "code": code, "message": message, "context": context }).to_string()
}

/// Parse `args` and run; stdout and stderr receive the command output and
/// error JSON.
pub fn run<I, T>(
    args: I,
    stdout: &mut dyn std::io::Write,
    stderr: &mut dyn std::io::Write,
) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return ExitCode::from(EXIT_OK);
            }
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            let _ = writeln!(stderr, "{}", error_json("usage", first, json!({})));
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let argv: Vec<String> = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    let name = command_name(&cli.command);
    let config_path = common(&cli.command).config.display().to_string();
    match dispatch(cli.command, &argv, stdout) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let ctx = json!({ "command": name, "config": config_path });
            let _ = writeln!(stderr, "{}", error_json(e.code(), &e.to_string(), ctx));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Solve { .. } => "solve",
        Command::Convergence { .. } => "convergence",
        Command::Simulate { .. } => "simulate",
        Command::Sweep { .. } => "sweep",
    }
}

fn common(c: &Command) -> &Common {
    match c {
        Command::Solve { common, .. }
        | Command::Convergence { common, .. }
        | Command::Simulate { common, .. }
        | Command::Sweep { common, .. } => common,
    }
}

/// Output sink: stdout, or a file plus manifest under `--out`.
struct Sink<'a> {
    stdout: &'a mut dyn std::io::Write,
    out: Option<PathBuf>,
    command: &'static str,
    argv: &'a [String],
    started: SystemTime,
    clock: Instant,
}

impl Sink<'_> {
    fn emit(
        &mut self,
        file_name: &str,
        body: &str,
        config: &Config,
        seed: u64,
        extra: &[String],
    ) -> Result<()> {
        let Some(dir) = &self.out else {
            self.stdout
                .write_all(body.as_bytes())
                .map_err(|e| Error::Config(format!("cannot write output: {e}")))?;
            return Ok(());
        };
        fs::create_dir_all(dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
        let write = |name: &str, text: &str| {
            fs::write(dir.join(name), text).map_err(|e| {
                Error::Config(format!("cannot write {}: {e}", dir.join(name).display()))
            })
        };
        write(file_name, body)?;
        let mut outputs = vec![file_name.to_string()];
        outputs.extend(extra.iter().cloned());
        let manifest = RunManifest {
            tool: "ouest".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: self.command.into(),
            args: self.argv.to_vec(),
            config: config.clone(),
            seed,
            started_unix: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            wall_seconds: self.clock.elapsed().as_secs_f64(),
            outputs,
        };
        let stem = file_name.rsplit_once('.').map_or(file_name, |(s, _)| s);
        write(&manifest_name(stem), &to_json(&manifest)?)?;
        writeln!(self.stdout, "{}", dir.join(file_name).display())
            .map_err(|e| Error::Config(format!("cannot write output: {e}")))
    }
}

fn manifest_name(stem: &str) -> String {
    format!("{stem}.manifest.json")
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SolveOutput {
    /// Name of the companion manifest when written with `--out`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
    pub policy: PolicyKind,
    /// `null` when unlimited.
    pub fmax: Option<f64>,
    pub metrics: ModelMetrics,
    pub mc_samples: usize,
    pub mc_seed: u64,
    pub solution: ThresholdSolution,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulateOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
    pub policy: PolicySpec,
    pub fmax: Option<f64>,
    pub horizon: f64,
    pub dt: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<ThresholdSolution>,
    pub result: SimResult,
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn apply_common(cfg: &mut Config, c: &Common) -> Result<()> {
    if let Some(f) = c.fmax {
        if f.is_nan() || f <= 0.0 {
            return Err(Error::Config(format!("--fmax must be > 0, got {f}")));
        }
        cfg.fmax = finite_or_none(f);
    }
    if let Some(f) = cfg.fmax {
        if f.is_nan() || f <= 0.0 {
            return Err(Error::Config(format!("fmax must be > 0, got {f}")));
        }
    }
    Ok(())
}

fn dispatch(command: Command, argv: &[String], stdout: &mut dyn std::io::Write) -> Result<u8> {
    let name = command_name(&command);
    let c = common(&command);
    let mut cfg = Config::load(&c.config)?;
    apply_common(&mut cfg, c)?;
    let mut sink = Sink {
        stdout,
        out: c.out.clone(),
        command: name,
        argv,
        started: SystemTime::now(),
        clock: Instant::now(),
    };
    match command {
        Command::Solve {
            common,
            method,
            tol,
            mc_samples,
            policy,
        } => {
            if let Some(s) = common.seed {
                cfg.mc.seed = s;
            }
            if let Some(m) = method {
                cfg.solver.method = m;
            }
            if let Some(t) = tol {
                cfg.solver.tol = t;
            }
            if let Some(n) = mc_samples {
                cfg.mc.samples = n;
            }
            let out = cmd_solve(&cfg, policy)?;
            let out = SolveOutput {
                manifest: sink.out.as_ref().map(|_| manifest_name("solve")),
                ..out
            };
            sink.emit("solve.json", &to_json(&out)?, &cfg, cfg.mc.seed, &[])?;
            Ok(EXIT_OK)
        }
        Command::Convergence {
            common,
            methods,
            tol,
            mc_samples,
        } => {
            if let Some(s) = common.seed {
                cfg.mc.seed = s;
            }
            if let Some(t) = tol {
                cfg.solver.tol = t;
            }
            if let Some(n) = mc_samples {
                cfg.mc.samples = n;
            }
            let methods = parse_methods(&methods)?;
            let csv = cmd_convergence(&cfg, &methods)?;
            sink.emit("convergence.csv", &csv, &cfg, cfg.mc.seed, &[])?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            common,
            policy,
            horizon,
            dt,
            beta,
            v,
            period,
            mc_samples,
            path_csv,
            path_stride,
        } => {
            if let Some(s) = common.seed {
                cfg.sim.seed = Some(s);
            }
            if let Some(h) = horizon {
                cfg.sim.horizon = h;
            }
            if dt.is_some() {
                cfg.sim.dt = dt;
            }
            if let Some(n) = mc_samples {
                cfg.mc.samples = n;
            }
            let overrides = PolicyOverrides { beta, v, period };
            let stride = if path_csv.is_some() {
                path_stride.max(1)
            } else {
                0
            };
            let mut out = cmd_simulate(&cfg, policy, &overrides, stride)?;
            let mut extra = Vec::new();
            if let Some(path) = path_csv {
                let trace = out.result.trace.take().unwrap_or_default();
                let mut csv = String::from("t,x,x_hat,age\n");
                for p in &trace.points {
                    let _ = writeln!(csv, "{},{},{},{}", p.t, p.x, p.x_hat, p.age);
                }
                fs::write(&path, csv)
                    .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
                extra.push(path.display().to_string());
            }
            out.manifest = sink.out.as_ref().map(|_| manifest_name("simulate"));
            sink.emit(
                "simulate.json",
                &to_json(&out)?,
                &cfg,
                cfg.sim_seed(),
                &extra,
            )?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            common,
            axis,
            values,
            policies,
            horizon,
            mc_samples,
        } => {
            if common.out.is_none() {
                return Err(Error::Config("sweep requires --out DIR".into()));
            }
            if values.is_empty() {
                return Err(Error::Config(
                    "--values must list at least one value".into(),
                ));
            }
            if let Some(s) = common.seed {
                cfg.sim.seed = Some(s);
            }
            if let Some(h) = horizon {
                cfg.sim.horizon = h;
            }
            if let Some(n) = mc_samples {
                cfg.mc.samples = n;
            }
            let rows = cmd_sweep(&cfg, axis, &values, &policies)?;
            let ok = rows.iter().any(|r| r.error.is_none());
            sink.emit("sweep.csv", &sweep_csv(&rows), &cfg, cfg.sim_seed(), &[])?;
            Ok(if ok { EXIT_OK } else { EXIT_SOLVER })
        }
    }
}

fn build_panel(cfg: &Config) -> Result<McPanel> {
    let root = SimRng::new(cfg.mc.seed);
    let metrics = compute_metrics(
        &cfg.model,
        &cfg.service,
        METRICS_SAMPLES.max(cfg.mc.samples),
        &mut root.split(1),
    )
    .map_err(as_config)?;
    McPanel::build(
        cfg.model,
        cfg.service.clone(),
        metrics,
        cfg.mc.samples,
        cfg.mc.seed,
    )
    .map_err(as_config)
}

pub fn cmd_solve(cfg: &Config, policy: PolicyKind) -> Result<SolveOutput> {
    let opts = cfg.solve_options();
    let solved = match policy {
        PolicyKind::MseOptimal | PolicyKind::AgeOptimal => solve_model(
            &cfg.model,
            &cfg.service,
            cfg.fmax(),
            cfg.mc.samples,
            cfg.mc.seed,
            &opts,
        )?,
        other => {
            return Err(Error::Config(format!(
                "{} has no threshold to solve",
                other.name()
            )))
        }
    };
    let solution = if policy == PolicyKind::MseOptimal {
        solved.mse_optimal
    } else {
        solved.age_optimal
    };
    Ok(SolveOutput {
        manifest: None,
        policy,
        fmax: cfg.fmax,
        metrics: solved.metrics,
        mc_samples: cfg.mc.samples,
        mc_seed: cfg.mc.seed,
        solution,
    })
}

fn parse_methods(s: &str) -> Result<Vec<Algorithm>> {
    if s.trim() == "all" {
        return Ok(vec![
            Algorithm::Bisection,
            Algorithm::Newton,
            Algorithm::FixedPoint,
        ]);
    }
    let mut out: Vec<Algorithm> = s
        .split(',')
        .map(|m| m.trim().parse())
        .collect::<Result<_>>()?;
    out.dedup();
    if out.is_empty() {
        return Err(Error::Config("--methods is empty".into()));
    }
    Ok(out)
}

/// CSV of `method,iteration,iterate,abs_error,bracket_width`, where
/// `abs_error = |β_k − β_ref|` against a tight bisection on the same panel.
pub fn cmd_convergence(cfg: &Config, methods: &[Algorithm]) -> Result<String> {
    let panel = build_panel(cfg)?;
    let obj = SignalAware(&panel);
    let tol = cfg.solver.tol;
    let reference = bisect_f(&obj, 1e-13)?.beta;
    let mut reports: Vec<SolverReport> = methods
        .iter()
        .map(|m| match m {
            Algorithm::Bisection => bisect_f(&obj, tol),
            Algorithm::Newton => newton_f(&obj, None, tol),
            Algorithm::FixedPoint => fixed_point_f(&obj, None, tol),
        })
        .collect::<Result<_>>()?;
    reports.sort_by_key(|r| r.method.name());
    let mut csv = String::from("method,iteration,iterate,abs_error,bracket_width\n");
    for r in &reports {
        for (k, step) in r.history.iter().enumerate() {
            let width = if r.method == crate::solvers::Method::BisectionF {
                format!("{}", step.upper - step.lower)
            } else {
                String::new()
            };
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                r.method.name(),
                k + 1,
                step.iterate,
                (step.iterate - reference).abs(),
                width
            );
        }
    }
    Ok(csv)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PolicyOverrides {
    pub beta: Option<f64>,
    pub v: Option<f64>,
    pub period: Option<f64>,
}

pub fn cmd_simulate(
    cfg: &Config,
    kind: PolicyKind,
    o: &PolicyOverrides,
    trace_stride: usize,
) -> Result<SimulateOutput> {
    let fmax = cfg.fmax();
    let opts = cfg.solve_options();
    let mut solution = None;
    let (spec, metrics) = match kind {
        PolicyKind::Uniform => {
            let period = match (o.period, fmax.is_finite()) {
                (Some(p), _) => p,
                (None, true) => 1.0 / fmax,
                (None, false) => {
                    return Err(Error::Config(
                        "uniform sampling needs --period or a finite fmax".into(),
                    ))
                }
            };
            (PolicySpec::Uniform { period }, None)
        }
        PolicyKind::ZeroWait => (PolicySpec::ZeroWait, None),
        PolicyKind::MseOptimal | PolicyKind::AgeOptimal => {
            let panel = build_panel(cfg)?;
            let m = *panel.metrics();
            let beta = match o.beta {
                Some(b) => b,
                None => {
                    let s = if kind == PolicyKind::MseOptimal {
                        crate::solvers::solve_policy(&SignalAware(&panel), fmax, &opts)?
                    } else {
                        crate::solvers::solve_policy(&SignalAgnostic(&panel), fmax, &opts)?
                    };
                    let b = s.beta;
                    solution = Some(s);
                    b
                }
            };
            let spec = if kind == PolicyKind::MseOptimal {
                let v = match o.v {
                    Some(v) => v,
                    None => crate::expectations::threshold_v(beta, &m, &cfg.model)?,
                };
                PolicySpec::MseOptimal { beta, v }
            } else {
                PolicySpec::AgeOptimal { beta }
            };
            (spec, Some(m))
        }
    };
    let sim_cfg = SimConfig {
        params: cfg.model,
        dist: cfg.service.clone(),
        policy: spec,
        horizon: cfg.sim.horizon,
        dt: cfg.sim.dt,
        seed: cfg.sim_seed(),
        queue_cap: cfg.sim.queue_cap,
        fmax: Some(fmax),
        trace_stride,
        grid_only: cfg.sim.grid_only,
    };
    sim_cfg.validate().map_err(as_config)?;
    let metrics = match metrics {
        Some(m) => m,
        None => sim::sim_metrics(&sim_cfg)?,
    };
    let result = run_with_metrics(&sim_cfg, &metrics)?;
    Ok(SimulateOutput {
        manifest: None,
        policy: spec,
        fmax: cfg.fmax,
        horizon: sim_cfg.horizon,
        dt: sim_cfg.dt(),
        seed: sim_cfg.seed,
        solution,
        result,
    })
}

pub fn cmd_sweep(
    cfg: &Config,
    axis: SweepAxis,
    values: &[f64],
    policies: &[PolicyKind],
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::Config(
            "--values must list at least one value".into(),
        ));
    }
    let base = SweepBase {
        params: cfg.model,
        dist: cfg.service.clone(),
        fmax: cfg.fmax(),
        horizon: cfg.sim.horizon,
        dt: cfg.sim.dt,
        seed: cfg.sim_seed(),
        queue_cap: cfg.sim.queue_cap,
        grid_only: cfg.sim.grid_only,
        mc_samples: cfg.mc.samples,
        mc_seed: cfg.mc.seed,
        solve: cfg.solve_options(),
    };
    sim::sweep(&base, axis, values, policies).map_err(as_config)
}

pub const SWEEP_HEADER: &str =
    "axis_value,policy,time_avg_mse,mse_std_error,avg_rate,feasible,queue_overflowed,beta,v,error";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for r in rows {
        let (mse, se, rate, feasible, ovf) = match &r.result {
            Some(s) => (
                s.time_avg_mse.to_string(),
                s.mse_std_error.to_string(),
                s.avg_rate.to_string(),
                s.feasible.to_string(),
                s.queue_overflowed.to_string(),
            ),
            None => Default::default(),
        };
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            r.axis_value,
            r.policy.name(),
            mse,
            se,
            rate,
            feasible,
            ovf,
            opt(r.beta),
            opt(r.v),
            csv_field(r.error.as_deref().unwrap_or(""))
        );
    }
    csv
}
