//! `stitlab`: simulate, draw and verify STIT, Mecke and equally-likely
//! tessellations.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 usage or
//! configuration error, 3 runtime error.

mod table;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use stitlab_core::io::{parse_measure, parse_window, MeasureSpec, StopSpec, WindowSpec};
use stitlab_core::processes::cowan::ClockKind;
use stitlab_core::processes::{read_trace_jsonl, write_trace_jsonl, ProcessError};
use stitlab_core::render::{chords, render_svg};
use stitlab_core::stats::{identity_reports, render_table, run_equivalence_suite};
use stitlab_core::{ExperimentConfig, Model, SuiteConfig, VerificationReport};
use thiserror::Error;

const SEED_VAR: &str = "STITLAB_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification { .. } => 1,
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "stitlab", version, about = "Random tessellation simulator and verifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a tessellation and write its JSONL trace.
    Simulate(SimulateArgs),
    /// Draw a trace as SVG.
    Render {
        /// JSONL trace file.
        trace: PathBuf,
        /// Only events up to this time (or decision index for discrete traces).
        #[arg(long)]
        at: Option<f64>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Run verification checks; exits 1 if any fails.
    Verify(VerifyArgs),
    /// Print a CSV table of a distribution.
    #[command(subcommand)]
    Table(table::Table),
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<Model>,
    /// unit-square, triangle or "x,y;x,y;...".
    #[arg(long)]
    window: Option<String>,
    /// iso:<scale> or dirs:<theta>:<weight>,...
    #[arg(long)]
    measure: Option<String>,
    /// Stop at this time.
    #[arg(long = "t", visible_alias = "time")]
    time: Option<f64>,
    /// Stop after this many jumps.
    #[arg(long)]
    jumps: Option<usize>,
    /// Stop after this many decisions (discrete Mecke process).
    #[arg(long)]
    decisions: Option<u64>,
    /// Falls back to the STITLAB_SEED environment variable, then 0.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent replicas; each goes to `<out>.<i>`.
    #[arg(long)]
    replicas: Option<usize>,
    /// Trace file (stdout if absent).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Identities,
    Equivalence,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mutation {
    PoissonClock,
    WrongRate,
}

#[derive(Debug, clap::Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// JSON suite config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Falls back to the STITLAB_SEED environment variable, then the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicas: Option<usize>,
    /// Deliberately break the decision clock (negative control).
    #[arg(long, value_enum)]
    mutate: Option<Mutation>,
    /// Rate factor of the wrong-rate mutation.
    #[arg(long, default_value_t = 1.2)]
    rate_factor: f64,
    /// Write the reports as JSON.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Print JSON instead of a table.
    #[arg(long)]
    json: bool,
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("{SEED_VAR}={s:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn experiment_config(args: &SimulateArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json(&read_to_string(path)?).map_err(usage)?,
        None => ExperimentConfig {
            window: WindowSpec::Named("unit-square".into()),
            measure: MeasureSpec::Named("iso:1".into()),
            model: args.model.ok_or_else(|| usage("--model is required without --config"))?,
            stop: StopSpec::default(),
            seed: None,
            replicas: 1,
            time_grid: Vec::new(),
            trace_out: None,
            report_out: None,
        },
    };
    if let Some(m) = args.model {
        config.model = m;
    }
    if let Some(w) = &args.window {
        parse_window(w).map_err(usage)?;
        config.window = WindowSpec::Named(w.clone());
    }
    if let Some(m) = &args.measure {
        parse_measure(m).map_err(usage)?;
        config.measure = MeasureSpec::Named(m.clone());
    }
    if args.time.is_some() || args.jumps.is_some() || args.decisions.is_some() {
        config.stop = StopSpec {
            time: args.time,
            jumps: args.jumps,
            decisions: args.decisions,
        };
    }
    if let Some(s) = args.seed.or(env_seed()?) {
        config.seed = Some(s);
    }
    if let Some(r) = args.replicas {
        config.replicas = r;
    }
    if let Some(o) = &args.out {
        config.trace_out = Some(o.clone());
    }
    Ok(config)
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let config = experiment_config(args)?;
    let experiment = config.validate().map_err(usage)?;
    let seed = experiment.seed.unwrap_or(0);
    if experiment.replicas > 1 && config.trace_out.is_none() {
        return Err(usage("--out is required with more than one replica"));
    }
    for i in 0..experiment.replicas {
        let trace = experiment.simulate(seed, i as u64).map_err(runtime)?;
        match &config.trace_out {
            None => write_trace_jsonl(&trace, io::stdout().lock()).map_err(runtime)?,
            Some(path) => {
                let path = if experiment.replicas > 1 {
                    let mut p = path.clone().into_os_string();
                    p.push(format!(".{i}"));
                    PathBuf::from(p)
                } else {
                    path.clone()
                };
                write_trace_jsonl(&trace, create(&path)?).map_err(runtime)?;
            }
        }
    }
    Ok(())
}

fn render(trace: &Path, at: Option<f64>, out: Option<&Path>) -> Result<(), CliError> {
    let file = File::open(trace).map_err(|e| usage(format!("{}: {e}", trace.display())))?;
    let malformed = |e: ProcessError| match e {
        ProcessError::Io(e) => runtime(e),
        e => usage(format!("{}: {e}", trace.display())),
    };
    let trace = read_trace_jsonl(BufReader::new(file)).map_err(malformed)?;
    let svg = render_svg(&trace.window, &chords(&trace, at).map_err(malformed)?);
    match out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(svg.as_bytes()).and_then(|_| w.flush()).map_err(runtime)
        }
        None => io::stdout().write_all(svg.as_bytes()).map_err(runtime),
    }
}

fn verify(args: &VerifyArgs) -> Result<(), CliError> {
    let mut config = match &args.config {
        Some(path) => serde_json::from_str(&read_to_string(path)?).map_err(usage)?,
        None => SuiteConfig::default(),
    };
    if let Some(s) = args.seed.or(env_seed()?) {
        config.seed = s;
    }
    if let Some(r) = args.replicas {
        config.replicas = r;
    }
    match args.mutate {
        Some(Mutation::PoissonClock) => config.clock = ClockKind::PoissonMutant,
        Some(Mutation::WrongRate) => config.clock = ClockKind::WrongRateMutant(args.rate_factor),
        None => {}
    }
    config.validate().map_err(usage)?;
    let mut reports: Vec<VerificationReport> = Vec::new();
    if matches!(args.suite, Suite::Identities | Suite::All) {
        reports.extend(identity_reports(config.identity_tolerance, config.seed));
    }
    if matches!(args.suite, Suite::Equivalence | Suite::All) {
        reports.extend(run_equivalence_suite(&config).map_err(runtime)?);
    }
    let json = serde_json::to_string_pretty(&reports).map_err(runtime)?;
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        w.write_all(json.as_bytes())
            .and_then(|_| w.write_all(b"\n"))
            .and_then(|_| w.flush())
            .map_err(runtime)?;
    }
    let mut stdout = io::stdout().lock();
    let text = if args.json { json + "\n" } else { render_table(&reports) };
    stdout.write_all(text.as_bytes()).map_err(runtime)?;
    let failed = reports.iter().filter(|r| !r.passed).count();
    if failed > 0 {
        return Err(CliError::Verification {
            failed,
            total: reports.len(),
        });
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Render { trace, at, out } => render(trace, *at, out.as_deref()),
        Command::Verify(args) => verify(args),
        Command::Table(t) => {
            let csv = table::run(t)?;
            io::stdout().write_all(csv.as_bytes()).map_err(runtime)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stitlab: {e}");
            ExitCode::from(e.code())
        }
    }
}
