//! Batch front end for the `oqc-core` simulators.
//!
//! Exit codes: 0 on success, 1 on a physics or calibration failure, 2 on a
//! configuration error. Diagnostics go to stderr; results go to the declared
//! output file or stdout.

pub mod backends;
pub mod config;
pub mod report;
pub mod table;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{Backend, ExperimentConfig, OutputFormat, SweepSpec};
use crate::table::{Cell, Table};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Physics(oqc_core::Error),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Physics(_) | CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use oqc_core::Error as E;
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            // The calibration error message already says so.
            CliError::Physics(e @ E::Calibration { .. }) => write!(f, "{e}"),
            CliError::Physics(e @ (E::Uncalibrated | E::StaleCalibration { .. })) => {
                write!(f, "calibration failure: {e}")
            }
            CliError::Physics(e) => write!(f, "physics failure: {e}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<oqc_core::Error> for CliError {
    /// Bad inputs are configuration errors; everything else is physics.
    fn from(e: oqc_core::Error) -> Self {
        use oqc_core::Error as E;
        match e {
            E::Parameter { .. }
            | E::IndexOutOfRange { .. }
            | E::DimensionMismatch { .. }
            | E::NotNormalized { .. }
            | E::ZeroNorm
            | E::GridFormat { .. } => CliError::Config(e.to_string()),
            _ => CliError::Physics(e),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "oqc",
    about = "Optical and spin quantum-logic simulators",
    disable_version_flag = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment config (including its sweep section, if any).
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the NOT and CNOT truth tables on the listed backends.
    Truthtable {
        #[arg(long, default_value = "spin,jones,rds")]
        backends: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run the sweep section of a config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the version.
    Version,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Run { config, seed, out } => {
            let cfg = load_with_overrides(&config, seed, out)?;
            match &cfg.sweep {
                Some(s) => run_sweep(&cfg, s),
                None => run_single(&cfg),
            }
            .map(|_| 0)
        }
        Command::Sweep { config, seed, out } => {
            let cfg = load_with_overrides(&config, seed, out)?;
            let sweep = cfg.sweep.clone().ok_or_else(|| {
                CliError::Config(format!("{} has no sweep section", config.display()))
            })?;
            run_sweep(&cfg, &sweep).map(|_| 0)
        }
        Command::Truthtable {
            backends,
            out,
            format,
        } => truthtable(&backends, out.as_deref(), format),
        Command::Version => {
            println!("oqc {}", env!("CARGO_PKG_VERSION"));
            Ok(0)
        }
    }
}

fn load_with_overrides(
    path: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if out.is_some() {
        cfg.output.path = out;
    }
    Ok(cfg)
}

pub fn run_single(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let table = backends::run_point(&cfg.params, cfg.seed)?;
    let doc = json!({
        "backend": cfg.backend().to_string(),
        "seed": cfg.seed,
        "rows": table.to_json_value(),
    });
    emit(cfg.output.path.as_deref(), cfg.output.format, &table, doc)?;
    Ok(table)
}

/// Evaluates every sweep point (concurrently with the `parallel` feature) and
/// writes rows in sweep order.
pub fn run_sweep(cfg: &ExperimentConfig, sweep: &SweepSpec) -> Result<Table, CliError> {
    sweep.validate()?;
    let points = sweep.points();
    let rows: Vec<Result<Vec<Cell>, CliError>> = oqc_core::parallel::map(&points, |&v| {
        let p = cfg.params.with_value(&sweep.parameter, v)?;
        backends::sweep_row(&p, v)
    });
    let columns = backends::sweep_columns(&cfg.params, &sweep.parameter);
    let mut table = Table {
        columns,
        rows: Vec::with_capacity(rows.len()),
    };
    for r in rows {
        table.push(r?);
    }
    let doc = json!({
        "backend": cfg.backend().to_string(),
        "seed": cfg.seed,
        "sweep": {
            "parameter": sweep.parameter,
            "start": sweep.start,
            "stop": sweep.stop,
            "count": sweep.count,
        },
        "rows": table.to_json_value(),
    });
    emit(cfg.output.path.as_deref(), cfg.output.format, &table, doc)?;
    Ok(table)
}

fn parse_backends(list: &str) -> Result<Vec<Backend>, CliError> {
    let mut out = Vec::new();
    for name in list.split(',').filter(|s| !s.trim().is_empty()) {
        let b: Backend = name.parse()?;
        if b == Backend::Stats {
            return Err(CliError::Config(
                "stats has no logic gates; use spin, jones or rds".into(),
            ));
        }
        if !out.contains(&b) {
            out.push(b);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("no backends given".into()));
    }
    Ok(out)
}

fn truthtable(list: &str, out: Option<&Path>, format: FormatArg) -> Result<i32, CliError> {
    let backends = parse_backends(list)?;
    let reports = report::verify_truth_tables(&backends);
    for r in &reports {
        let status = if r.pass { "PASS" } else { "FAIL" };
        match &r.error {
            Some(e) => eprintln!("{status} {} {}: {e}", r.backend, r.gate),
            None => eprintln!("{status} {} {}", r.backend, r.gate),
        }
    }
    let table = report::reports_table(&reports);
    let doc = Value::Array(reports.iter().map(|r| r.to_json_value()).collect());
    let format = match format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    emit(out, format, &table, doc)?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn emit(
    path: Option<&Path>,
    format: OutputFormat,
    table: &Table,
    doc: Value,
) -> Result<(), CliError> {
    let text = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&doc).expect("json values serialize");
            s.push('\n');
            s
        }
    };
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}
