//! Command-line front end.
//!
//! Every physics and tolerance flag can also be set through an environment
//! variable named `DICKE_RESET_<FLAG>` (for example `DICKE_RESET_BETA`);
//! an explicit flag wins over the variable, and the variable wins over a
//! config file.

pub mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{self, BoundReport, Outcome};
use crate::dynamics::{self, IntegratorOptions};
use crate::error::{Error, Result};
use crate::experiments::{self, SweepSpec, SweepTable};
use crate::io::{self, fmt_num, RunMetadata, SummaryDocument};
use crate::model::{Protocol, SystemParams};
use crate::oracle::{self, DeviationReport};
use crate::thermo;

use config::{IntegratorSection, ParamsSection, RunConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_BREACH: i32 = 4;

/// Oracle agreement required by `oracle-check`.
pub const ORACLE_TOL: f64 = 1e-6;
pub const LEAKAGE_TOL: f64 = 1e-8;

/// Allowed |Sigma - (dS + beta Q)| relative to max(1, |Sigma|).
pub const FIRST_LAW_TOL: f64 = 1e-6;

const EXIT_HELP: &str = "\
Exit codes:
  0  success
  2  invalid configuration or arguments
  3  the integrator failed (step budget or step-size underflow)
  4  an invariant or a hard bound was violated";

#[derive(Debug, Parser)]
#[command(
    name = "dicke-reset",
    version,
    about = "Collective reset of a qubit register in the Dicke sector",
    after_help = EXIT_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one run and write trajectory.csv and summary.json.
    Simulate(SimulateArgs),
    /// Run every (N, protocol) pair and write the figure tables.
    Sweep(SweepArgs),
    /// Check the thermodynamic inequalities and write bounds.csv.
    ///
    /// Exits 4 when any hard inequality fails. The asymptotic N eps window
    /// is reported but never changes the exit code.
    Bounds(BoundsArgs),
    /// Compare the birth-death reduction with the full master equation.
    ///
    /// Exits 4 when populations or heat deviate by more than 1e-6 or the
    /// symmetric sector leaks more than 1e-8. Limited to N <= 8.
    OracleCheck(OracleArgs),
    /// Heat of increasingly slow linear ramps against ln(N + 1) / beta.
    Quasistatic(QuasistaticArgs),
}

/// Schedule selected on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolChoice {
    Quench,
    Linear,
    Exponential,
    Idle,
    File(PathBuf),
}

fn parse_protocol_choice(s: &str) -> std::result::Result<ProtocolChoice, String> {
    match s {
        "quench" => Ok(ProtocolChoice::Quench),
        "linear" => Ok(ProtocolChoice::Linear),
        "exponential" => Ok(ProtocolChoice::Exponential),
        "idle" => Ok(ProtocolChoice::Idle),
        _ => match s.strip_prefix("file=") {
            Some(p) if !p.is_empty() => Ok(ProtocolChoice::File(PathBuf::from(p))),
            _ => Err("expected quench, linear, exponential, idle or file=PATH".into()),
        },
    }
}

impl ProtocolChoice {
    pub fn build(&self, params: &SystemParams) -> Result<Protocol> {
        match self {
            ProtocolChoice::Quench => Ok(Protocol::benchmark_quench(params)),
            ProtocolChoice::Linear => Ok(Protocol::benchmark_linear(params)),
            ProtocolChoice::Exponential => Ok(Protocol::benchmark_exponential(params)),
            ProtocolChoice::Idle => Protocol::idle(params.tau),
            ProtocolChoice::File(path) => config::load_protocol_file(path, params),
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Inverse bath temperature [default: 1]
    #[arg(long, env = "DICKE_RESET_BETA")]
    pub beta: Option<f64>,
    /// Bare coupling rate [default: 1]
    #[arg(long, env = "DICKE_RESET_GAMMA0")]
    pub gamma0: Option<f64>,
    /// Protocol duration [default: 1]
    #[arg(long, env = "DICKE_RESET_TAU")]
    pub tau: Option<f64>,
    /// Number of qubits [default: 1]
    #[arg(short = 'N', long = "n-qubits", env = "DICKE_RESET_N")]
    pub n_qubits: Option<usize>,
    /// quench | linear | exponential | idle | file=PATH (.csv with t,omega
    /// columns, or a TOML protocol document) [default: quench]
    #[arg(long, env = "DICKE_RESET_PROTOCOL", value_parser = parse_protocol_choice)]
    pub protocol: Option<ProtocolChoice>,
    /// Relative tolerance of the adaptive integrator [default: 1e-8]
    #[arg(long, env = "DICKE_RESET_REL_TOL")]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the adaptive integrator [default: 1e-12]
    #[arg(long, env = "DICKE_RESET_ABS_TOL")]
    pub abs_tol: Option<f64>,
    /// Output directory [default: out]
    #[arg(long, env = "DICKE_RESET_OUT")]
    pub out: Option<PathBuf>,
}

impl CommonArgs {
    fn params_section(&self) -> ParamsSection {
        ParamsSection {
            n_qubits: self.n_qubits,
            beta: self.beta,
            gamma0: self.gamma0,
            tau: self.tau,
        }
    }

    fn integrator_section(&self) -> IntegratorSection {
        IntegratorSection {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            ..Default::default()
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    fn params(&self) -> Result<SystemParams> {
        self.params_section().resolve()
    }

    fn protocol(&self, params: &SystemParams) -> Result<Protocol> {
        self.protocol
            .clone()
            .unwrap_or(ProtocolChoice::Quench)
            .build(params)
    }

    fn options(&self, tau: f64) -> Result<IntegratorOptions> {
        self.integrator_section().resolve(tau)
    }

    fn reject(&self, flags: &[&str], why: &str) -> Result<()> {
        let set = |f: &str| match f {
            "beta" => self.beta.is_some(),
            "gamma0" => self.gamma0.is_some(),
            "tau" => self.tau.is_some(),
            "N" => self.n_qubits.is_some(),
            "protocol" => self.protocol.is_some(),
            "rel-tol" => self.rel_tol.is_some(),
            "abs-tol" => self.abs_tol.is_some(),
            _ => false,
        };
        match flags.iter().find(|f| set(f)) {
            Some(f) => Err(Error::Config(format!("--{f} has no effect here: {why}"))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// TOML run config; flags and environment variables override it
    #[arg(long, env = "DICKE_RESET_CONFIG")]
    pub config: Option<PathBuf>,
    /// Write p_0 .. p_N columns to the trajectory
    #[arg(long)]
    pub emit_states: bool,
    /// Uniform output grid with this many points [default: every step]
    #[arg(long, env = "DICKE_RESET_SAMPLES")]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Which figure tables to write
    #[arg(long, value_enum, default_value = "all")]
    pub figure: Figure,
    /// Largest N of the powers-of-two grid
    #[arg(long, default_value_t = 1024)]
    pub n_max: usize,
    /// TOML sweep spec (n_values, params, [[protocols]], integrator)
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Check an existing simulate output directory instead of running
    #[arg(long, conflicts_with = "matrix")]
    pub from: Option<PathBuf>,
    /// Check all three benchmark protocols at N = 1, 2, 4, 8, 16, 64, 256
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comparison times, evenly spaced over [0, tau]
    #[arg(long, default_value_t = 21)]
    pub samples: usize,
    /// Check all three benchmark protocols at N = 2 .. 6
    #[arg(long)]
    pub matrix: bool,
}

#[derive(Debug, Args)]
pub struct QuasistaticArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Final splitting of the ramp [default: 10 / beta]
    #[arg(long, env = "DICKE_RESET_FINAL_OMEGA")]
    pub final_omega: Option<f64>,
    /// Ramp durations, increasing
    #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000,10000")]
    pub taus: Vec<f64>,
}

/// Map a library error onto the exit-code taxonomy.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => EXIT_CONFIG,
        Error::Integration { .. } => EXIT_INTEGRATION,
        Error::Integrity(_) | Error::Inconsistency(_) | Error::UndefinedResetFactor => EXIT_BREACH,
    }
}

/// Parse `args` (program name first), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
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
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Bounds(a) => cmd_bounds(&a),
        Command::OracleCheck(a) => cmd_oracle_check(&a),
        Command::Quasistatic(a) => cmd_quasistatic(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Merge config file, environment and flags into one run config.
pub fn resolve_run_config(args: &SimulateArgs) -> Result<RunConfig> {
    let doc = match &args.config {
        Some(path) => Some(config::load_run_document(path)?),
        None => None,
    };
    let file_params = doc.as_ref().map(|d| d.params.clone()).unwrap_or_default();
    let params = args.common.params_section().or(&file_params).resolve()?;

    let protocol = match (
        &args.common.protocol,
        doc.as_ref().and_then(|d| d.protocol.as_ref()),
    ) {
        (Some(choice), _) => choice.build(&params)?,
        (None, Some(section)) => section.resolve(&params)?,
        (None, None) => Protocol::benchmark_quench(&params),
    };

    let file_int = doc
        .as_ref()
        .map(|d| d.integrator.clone())
        .unwrap_or_default();
    let mut int = args.common.integrator_section().or(&file_int);
    int.samples = args.samples.or(int.samples);
    let integrator = int.resolve(params.tau)?;

    let file_out = doc.as_ref().map(|d| d.output.clone()).unwrap_or_default();
    let output_path = args
        .common
        .out
        .clone()
        .or(file_out.path)
        .unwrap_or_else(|| PathBuf::from("out"));
    let emit_states = args.emit_states || file_out.emit_states.unwrap_or(false);
    Ok(RunConfig {
        params,
        protocol,
        integrator,
        output_path,
        emit_states,
    })
}

fn print_summary(doc: &SummaryDocument) {
    let s = &doc.summary;
    let m = &doc.metadata;
    println!(
        "N = {}  protocol = {}  beta = {}  gamma0 = {}  tau = {}",
        m.params.n_qubits,
        m.protocol.kind_name(),
        fmt_num(m.params.beta),
        fmt_num(m.params.gamma0),
        fmt_num(m.params.tau)
    );
    for (k, v) in [
        ("epsilon_final", s.epsilon_final),
        ("heat_total", s.heat_total),
        ("heat_per_qubit", s.heat_per_qubit),
        ("distance", s.distance),
        ("avg_activity", s.avg_activity),
        ("entropy_production", s.entropy_production),
    ] {
        println!("  {k:<20} {}", fmt_num(v));
    }
    match s.reset_factor {
        Some(f) => println!("  {:<20} {}", "reset_factor", fmt_num(f)),
        None => println!("  {:<20} undefined (epsilon = 1/2)", "reset_factor"),
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let cfg = resolve_run_config(args)?;
    io::ensure_output_dir(&cfg.output_path)?;
    let traj = match dynamics::integrate(&cfg.params, &cfg.protocol, &cfg.integrator) {
        Ok(t) => t,
        Err(Error::Integration { t, reason, partial }) => {
            if let Some(p) = partial.as_deref().filter(|p| !p.is_empty()) {
                let path = io::write_file(&cfg.output_path, "trajectory.partial.csv", |w| {
                    io::write_trajectory_csv(w, p, cfg.emit_states)
                })?;
                eprintln!("partial trajectory written to {}", path.display());
            }
            return Err(Error::Integration {
                t,
                reason,
                partial: None,
            });
        }
        Err(e) => return Err(e),
    };
    let summary = thermo::summarize(&traj, &cfg.params)?;
    let doc = SummaryDocument {
        summary,
        metadata: RunMetadata::new(&cfg.params, &cfg.protocol, &cfg.integrator, &traj),
    };
    io::write_file(&cfg.output_path, io::TRAJECTORY_FILE, |w| {
        io::write_trajectory_csv(w, &traj, cfg.emit_states)
    })?;
    io::write_file(&cfg.output_path, io::SUMMARY_FILE, |w| {
        io::write_summary_json(w, &doc)
    })?;
    print_summary(&doc);

    let residual = thermo::first_law_residual(&traj, &cfg.params);
    if residual.abs() > FIRST_LAW_TOL * summary.entropy_production.abs().max(1.0) {
        return Err(Error::Integrity(format!(
            "entropy balance violated: Sigma - (dS + beta Q) = {residual:.3e}"
        )));
    }
    Ok(EXIT_OK)
}

fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec> {
    let c = &args.common;
    c.reject(
        &["N"],
        "a sweep sets N itself; use --n-max or n_values in --spec",
    )?;
    let doc = match &args.spec {
        Some(path) => Some(config::load_sweep_document(path)?),
        None => None,
    };
    let file_params = doc.as_ref().map(|d| d.params.clone()).unwrap_or_default();
    if file_params.n_qubits.is_some() {
        return Err(Error::config(
            "sweep spec: set n_values, not params.n_qubits",
        ));
    }
    let params_base = c.params_section().or(&file_params).resolve()?;
    let n_values = match doc.as_ref().and_then(|d| d.n_values.clone()) {
        Some(v) => v,
        None => experiments::powers_of_two(args.n_max),
    };
    let protocols = match (&c.protocol, doc.as_ref().and_then(|d| d.protocols.as_ref())) {
        (Some(choice), _) => vec![choice.build(&params_base)?],
        (None, Some(sections)) => sections
            .iter()
            .map(|s| s.resolve(&params_base))
            .collect::<Result<Vec<_>>>()?,
        (None, None) => Protocol::benchmark_set(&params_base),
    };
    let file_int = doc
        .as_ref()
        .map(|d| d.integrator.clone())
        .unwrap_or_default();
    let int = c.integrator_section().or(&file_int);
    if int.samples.is_some() {
        return Err(Error::config(
            "sweeps only keep end-of-run values; drop integrator.samples",
        ));
    }
    let spec = SweepSpec {
        n_values,
        protocols,
        params_base,
        options: int.resolve(params_base.tau)?,
    };
    spec.validate()?;
    Ok(spec)
}

fn print_bound(r: &BoundReport) {
    let tag = match (&r.outcome, r.severity) {
        (Outcome::Pass, _) => "PASS",
        (Outcome::Fail, bounds::Severity::Hard) => "FAIL",
        (Outcome::Fail, bounds::Severity::Asymptotic) => "WARN",
        (Outcome::Fail, bounds::Severity::Informational) => "INFO",
        (Outcome::NotApplicable(_), _) => "N/A ",
    };
    let detail = match &r.outcome {
        Outcome::NotApplicable(why) => why.clone(),
        _ => format!(
            "lhs = {}  rhs = {}  margin = {}",
            fmt_num(r.lhs),
            fmt_num(r.rhs),
            fmt_num(r.margin)
        ),
    };
    println!(
        "{tag} {:<16} N = {:<5} {:<12} {detail}",
        r.name, r.context.n_qubits, r.context.protocol
    );
}

/// Exit code for a finished sweep: integration failures first, then hard
/// bound violations.
fn sweep_verdict(table: &SweepTable) -> i32 {
    let mut code = EXIT_OK;
    for row in &table.rows {
        match &row.result {
            Err(e) => {
                eprintln!("N = {} {}: {e}", row.n_qubits, row.protocol);
                code = code.max(match exit_code(e) {
                    EXIT_BREACH => EXIT_BREACH,
                    _ => EXIT_INTEGRATION,
                });
            }
            Ok(rec) => {
                for b in rec.bounds.iter().filter(|b| b.is_hard_failure()) {
                    print_bound(b);
                    code = EXIT_BREACH;
                }
            }
        }
    }
    code
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<i32> {
    let spec = sweep_spec(args)?;
    let out = args.common.out_dir();
    io::ensure_output_dir(&out)?;
    let table = experiments::sweep(&spec)?;

    if matches!(args.figure, Figure::Two | Figure::All) {
        io::write_file(&out, io::FIG2A_FILE, |w| io::write_fig2a_csv(w, &table))?;
        io::write_file(&out, io::FIG2B_FILE, |w| io::write_fig2b_csv(w, &table))?;
    }
    if matches!(args.figure, Figure::Three | Figure::All) {
        io::write_file(&out, io::FIG3_FILE, |w| io::write_fig3_csv(w, &table))?;
    }
    io::write_file(&out, io::SWEEP_FILE, |w| io::write_sweep_csv(w, &table))?;
    let reports: Vec<&BoundReport> = table
        .rows
        .iter()
        .filter_map(|r| r.result.as_ref().ok())
        .flat_map(|r| &r.bounds)
        .collect();
    io::write_file(&out, io::BOUNDS_FILE, |w| {
        io::write_bounds_csv(w, reports.iter().copied())
    })?;

    println!(
        "{:>6} {:<12} {:>20} {:>20} {:>20}",
        "N", "protocol", "epsilon", "heat_per_qubit", "F"
    );
    for row in &table.rows {
        if let Some(s) = row.summary() {
            println!(
                "{:>6} {:<12} {:>20} {:>20} {:>20}",
                row.n_qubits,
                row.protocol,
                fmt_num(s.epsilon_final),
                fmt_num(s.heat_per_qubit),
                s.reset_factor.map_or("undefined".into(), fmt_num)
            );
        }
    }
    for p in &spec.protocols {
        let lo = experiments::FIT_MIN_N;
        let hi = *spec.n_values.last().unwrap_or(&lo);
        if let Ok(fit) = experiments::scaling_fit(&table, p.kind_name(), (lo, hi)) {
            println!(
                "{}: eps ~ N^{} over N in [{lo}, {hi}]",
                p.kind_name(),
                fmt_num(fit.slope)
            );
        }
    }
    println!("tables written to {}", out.display());
    Ok(sweep_verdict(&table))
}

fn bounds_from_dir(dir: &Path) -> Result<Vec<BoundReport>> {
    let doc = io::read_summary_json(&dir.join(io::SUMMARY_FILE))?;
    let series = io::read_trajectory_csv(&dir.join(io::TRAJECTORY_FILE))?;
    bounds::check_all_sampled(
        &series.epsilon,
        &series.zeta,
        &doc.summary,
        &doc.metadata.params,
        &doc.metadata.protocol,
    )
}

pub fn cmd_bounds(args: &BoundsArgs) -> Result<i32> {
    let c = &args.common;
    let (reports, mut code) = if let Some(dir) = &args.from {
        c.reject(
            &[
                "beta", "gamma0", "tau", "N", "protocol", "rel-tol", "abs-tol",
            ],
            "--from reads the run parameters from summary.json",
        )?;
        (bounds_from_dir(dir)?, EXIT_OK)
    } else if args.matrix {
        c.reject(&["N", "protocol"], "--matrix fixes N and the protocols")?;
        let params_base = c.params_section().resolve()?;
        let spec = SweepSpec {
            n_values: vec![1, 2, 4, 8, 16, 64, 256],
            protocols: Protocol::benchmark_set(&params_base),
            params_base,
            options: c.options(params_base.tau)?,
        };
        let table = experiments::sweep(&spec)?;
        let mut code = EXIT_OK;
        for row in &table.rows {
            if let Err(e) = &row.result {
                eprintln!("N = {} {}: {e}", row.n_qubits, row.protocol);
                code = code.max(exit_code(e));
            }
        }
        let reports = table
            .rows
            .into_iter()
            .filter_map(|r| r.result.ok())
            .flat_map(|r| r.bounds)
            .collect();
        (reports, code)
    } else {
        let params = c.params()?;
        let protocol = c.protocol(&params)?;
        let rec = experiments::run_one(&params, &protocol, &c.options(params.tau)?)?;
        (rec.bounds, EXIT_OK)
    };

    let out = match (&c.out, &args.from) {
        (Some(o), _) => o.clone(),
        (None, Some(dir)) => dir.clone(),
        (None, None) => c.out_dir(),
    };
    io::ensure_output_dir(&out)?;
    io::write_file(&out, io::BOUNDS_FILE, |w| io::write_bounds_csv(w, &reports))?;
    for r in &reports {
        print_bound(r);
    }
    if reports.iter().any(BoundReport::is_hard_failure) {
        code = code.max(EXIT_BREACH);
    }
    Ok(code)
}

pub fn cmd_oracle_check(args: &OracleArgs) -> Result<i32> {
    let c = &args.common;
    let base = c.params_section();
    let jobs: Vec<(SystemParams, Protocol)> = if args.matrix {
        c.reject(&["N", "protocol"], "--matrix fixes N and the protocols")?;
        let mut jobs = Vec::new();
        for n in 2..=6 {
            let p = ParamsSection {
                n_qubits: Some(n),
                ..base.clone()
            }
            .resolve()?;
            for prot in Protocol::benchmark_set(&p) {
                jobs.push((p, prot));
            }
        }
        jobs
    } else {
        let p = c.params()?;
        vec![(p, c.protocol(&p)?)]
    };
    let out = c.out_dir();
    io::ensure_output_dir(&out)?;

    let mut rows: Vec<(String, DeviationReport)> = Vec::new();
    let mut code = EXIT_OK;
    for (p, prot) in &jobs {
        let opts = c.options(p.tau)?;
        let rep = oracle::oracle_check(p, prot, &opts, args.samples)?;
        let ok = rep.within(ORACLE_TOL, LEAKAGE_TOL);
        println!(
            "{} N = {:<2} {:<12} max population deviation = {}  heat deviation = {}  leakage = {}",
            if ok { "PASS" } else { "FAIL" },
            p.n_qubits,
            prot.kind_name(),
            fmt_num(rep.max_population_deviation),
            fmt_num(rep.heat_deviation),
            fmt_num(rep.max_leakage)
        );
        if !ok {
            code = EXIT_BREACH;
        }
        rows.push((prot.kind_name().to_string(), rep));
    }
    io::write_file(&out, io::ORACLE_FILE, |w| io::write_oracle_csv(w, &rows))?;
    Ok(code)
}

pub fn cmd_quasistatic(args: &QuasistaticArgs) -> Result<i32> {
    let c = &args.common;
    c.reject(&["tau"], "the ramp durations come from --taus")?;
    c.reject(&["protocol"], "quasistatic runs always use a linear ramp")?;
    let params = c.params()?;
    let final_omega = args.final_omega.unwrap_or(10.0 / params.beta);
    let opts = c.options(params.tau)?;
    let out = c.out_dir();
    io::ensure_output_dir(&out)?;
    let rows = experiments::quasistatic_convergence(&params, &args.taus, final_omega, &opts)?;
    io::write_file(&out, io::QUASISTATIC_FILE, |w| {
        io::write_quasistatic_csv(w, &rows)
    })?;
    println!(
        "N = {}  ln(N + 1) / beta = {}",
        params.n_qubits,
        fmt_num(bounds::landauer_collective(&params))
    );
    println!(
        "{:>12} {:>20} {:>20} {:>14}",
        "tau", "heat_total", "relative_excess", "epsilon"
    );
    for r in &rows {
        println!(
            "{:>12} {:>20} {:>20} {:>14}{}",
            fmt_num(r.tau),
            fmt_num(r.heat_total),
            fmt_num(r.relative_excess),
            fmt_num(r.epsilon_final),
            if r.perfect_reset {
                ""
            } else {
                "  (reset incomplete)"
            }
        );
    }
    Ok(EXIT_OK)
}
