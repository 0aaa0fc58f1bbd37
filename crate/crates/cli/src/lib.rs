//! `addspec`: runs each pipeline of `additive-spectrum` from flags or a JSON
//! config and writes a JSON report, plus an optional CSV trace.
//!
//! Exit codes: 0 success, 2 a hypothesis of the requested construction fails
//! on the input (the report says which quantity), 1 anything else.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use schemars::JsonSchema;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use commands::*;
pub use config::{ExperimentConfig, SubcommandName};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{message}")]
    Precondition {
        message: String,
        violation: Option<Value>,
    },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Precondition { .. } => EXIT_PRECONDITION,
            _ => EXIT_INTERNAL,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "addspec", version, about = "Additive spectrum experiments")]
pub struct Cli {
    /// Write the JSON report here instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    /// Write a CSV trace of the run.
    #[arg(long, global = true, value_name = "FILE")]
    pub trace: Option<PathBuf>,
    /// Seed for randomized inputs (default 0).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Size of the worker pool.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Read the run from an experiment config file.
    #[arg(long, value_name = "FILE", conflicts_with = "json_schema")]
    pub config: Option<PathBuf>,
    /// Print the JSON schema of a report and exit.
    #[arg(long, value_name = "REPORT")]
    pub json_schema: Option<SchemaTarget>,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Probe f(x+δ)/f(x) on a geometric grid.
    Stability(StabilityArgs),
    /// Rearrange a sequence and compare both orders against f.
    Rearrange(RearrangeArgs),
    /// Embed A ∼ f into B ∼ g.
    Supersequence(SupersequenceArgs),
    /// Compute hA ∩ [0, X].
    Sumset(SumsetArgs),
    /// Coverage report and counting bounds for hA on [0, X].
    VerifyBasis(VerifyBasisArgs),
    /// Dilute a basis of eigenvalue α to β < α.
    Dilute(DiluteArgs),
    /// Dilute a grid of eigenvalues and summarize.
    Spectrum(SpectrumArgs),
    /// Approximation of powers of u by powers of v.
    Impossible(ImpossibleArgs),
    /// Build f and A that no supersequence along g can follow.
    Adversarial(AdversarialArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemaTarget {
    Stability,
    Rearrange,
    Supersequence,
    Sumset,
    VerifyBasis,
    Dilute,
    Spectrum,
    Impossible,
    Adversarial,
    /// Report written when a hypothesis fails.
    Failure,
    /// Experiment config files.
    Config,
}

impl From<SubcommandName> for SchemaTarget {
    fn from(n: SubcommandName) -> Self {
        match n {
            SubcommandName::Stability => SchemaTarget::Stability,
            SubcommandName::Rearrange => SchemaTarget::Rearrange,
            SubcommandName::Supersequence => SchemaTarget::Supersequence,
            SubcommandName::Sumset => SchemaTarget::Sumset,
            SubcommandName::VerifyBasis => SchemaTarget::VerifyBasis,
            SubcommandName::Dilute => SchemaTarget::Dilute,
            SubcommandName::Spectrum => SchemaTarget::Spectrum,
            SubcommandName::Impossible => SchemaTarget::Impossible,
            SubcommandName::Adversarial => SchemaTarget::Adversarial,
        }
    }
}

pub fn schema(target: SchemaTarget) -> Value {
    use additive_spectrum::basis::DilutionOutcome;
    use additive_spectrum::growth::StabilityVerdict;
    use additive_spectrum::supersequence::{AdversarialResult, SupersequenceResult};
    use schemars::schema_for;
    let root = match target {
        SchemaTarget::Stability => schema_for!(StabilityVerdict),
        SchemaTarget::Rearrange => schema_for!(RearrangeReport),
        SchemaTarget::Supersequence => schema_for!(SupersequenceResult),
        SchemaTarget::Sumset => schema_for!(SumsetReport),
        SchemaTarget::VerifyBasis => schema_for!(BasisReport),
        SchemaTarget::Dilute => schema_for!(DilutionOutcome),
        SchemaTarget::Spectrum => schema_for!(SpectrumRun),
        SchemaTarget::Impossible => schema_for!(ImpossibleReport),
        SchemaTarget::Adversarial => schema_for!(AdversarialResult),
        SchemaTarget::Failure => schema_for!(FailureReport),
        SchemaTarget::Config => schema_for!(ExperimentConfig),
    };
    serde_json::to_value(root).expect("schema serializes")
}

/// Written in place of the report when a hypothesis fails.
#[derive(Debug, Clone, Serialize, JsonSchema)]
pub struct FailureReport {
    /// Always `precondition_failed`.
    pub status: String,
    pub subcommand: SubcommandName,
    pub message: String,
    /// The violated hypothesis and the quantity that broke it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Value>,
}

pub struct Trace {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Trace {
    pub fn new(header: &[&'static str], rows: Vec<Vec<String>>) -> Trace {
        Trace {
            header: header.to_vec(),
            rows,
        }
    }

    fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            w.write_record(row).map_err(err)?;
        }
        w.into_inner()
            .map_err(|e| CliError::Internal(e.to_string()))
    }
}

pub struct Outcome {
    pub report: Value,
    pub trace: Trace,
}

impl Outcome {
    pub fn new<T: Serialize>(report: &T, trace: Trace) -> Result<Outcome, CliError> {
        Ok(Outcome {
            report: serde_json::to_value(report).map_err(|e| CliError::Internal(e.to_string()))?,
            trace,
        })
    }
}

/// A fully resolved run.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Command,
    pub output: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub seed: u64,
}

impl Invocation {
    pub fn from_config(config: &ExperimentConfig) -> Result<Invocation, CliError> {
        Ok(Invocation {
            command: config.command()?,
            output: config.output_path.clone(),
            trace: config.trace_path.clone(),
            seed: config.seed.unwrap_or(0),
        })
    }
}

/// Runs the command and returns the JSON report (success or failure) with the exit code.
pub fn execute(inv: &Invocation) -> Result<(i32, Value, Option<Trace>), CliError> {
    inv.command.validate()?;
    let want_trace = inv.trace.is_some();
    let result = match &inv.command {
        Command::Stability(a) => a.run(),
        Command::Rearrange(a) => a.run(inv.seed),
        Command::Supersequence(a) => a.run(),
        Command::Sumset(a) => a.run(),
        Command::VerifyBasis(a) => a.run(),
        Command::Dilute(a) => a.run(),
        Command::Spectrum(a) => a.run(),
        Command::Impossible(a) => a.run(want_trace),
        Command::Adversarial(a) => a.run(),
    };
    match result {
        Ok(o) => Ok((EXIT_OK, o.report, Some(o.trace))),
        Err(CliError::Precondition { message, violation }) => {
            let failure = FailureReport {
                status: "precondition_failed".into(),
                subcommand: inv.command.name(),
                message,
                violation,
            };
            let value = serde_json::to_value(failure).expect("serializable");
            Ok((EXIT_PRECONDITION, value, None))
        }
        Err(e) => Err(e),
    }
}

/// Executes and writes the report and trace; returns the exit code.
pub fn run(inv: &Invocation) -> i32 {
    match execute(inv).and_then(|(code, report, trace)| {
        write_outputs(inv, &report, trace.as_ref())?;
        Ok(code)
    }) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("addspec: {e}");
            e.exit_code()
        }
    }
}

fn write_outputs(inv: &Invocation, report: &Value, trace: Option<&Trace>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).expect("serializable");
    text.push('\n');
    match &inv.output {
        Some(path) => fs::write(path, &text)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Internal(e.to_string()))?;
        }
    }
    if let (Some(path), Some(trace)) = (&inv.trace, trace) {
        fs::write(path, trace.to_csv()?)
            .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INTERNAL
            } else {
                EXIT_OK
            };
        }
    };
    if let Some(target) = cli.json_schema {
        println!(
            "{}",
            serde_json::to_string_pretty(&schema(target)).expect("serializable")
        );
        return EXIT_OK;
    }
    match resolve(cli) {
        Ok(inv) => run(&inv),
        Err(e) => {
            eprintln!("addspec: {e}");
            e.exit_code()
        }
    }
}

fn resolve(cli: Cli) -> Result<Invocation, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        // Fails only if a pool already exists, in which case that one is used.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let mut inv = match (cli.config, cli.command) {
        (Some(_), Some(_)) => {
            return Err(CliError::Invalid(
                "give either --config or a subcommand, not both".into(),
            ))
        }
        (Some(path), None) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
            Invocation::from_config(&ExperimentConfig::from_json(&text)?)?
        }
        (None, Some(command)) => Invocation {
            command,
            output: None,
            trace: None,
            seed: 0,
        },
        (None, None) => return Err(CliError::Invalid("no subcommand given; see --help".into())),
    };
    inv.output = cli.output.or(inv.output);
    inv.trace = cli.trace.or(inv.trace);
    inv.seed = cli.seed.unwrap_or(inv.seed);
    Ok(inv)
}
