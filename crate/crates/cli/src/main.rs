//! Command-line front end.
//!
//! Exit codes form the script contract: 0 means the tool ran and the report
//! is internally consistent (finding contradictions is the point, not a
//! failure), 2 means the input was unusable (unknown scenario, parse errors,
//! bad flags, unwritable output), 3 means the library caught itself being
//! inconsistent and the run must not be trusted.

mod report;
mod sampling;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bellks_core::analysis::{analyze, AnalyzeOptions, DEFAULT_WITNESS_ARITY_CAP};
use bellks_core::builtins::{builtin_by_name, builtin_chsh, default_chsh_angles, BUILTIN_NAMES};
use bellks_core::chsh::{
    maximize_with_grid, Optimum, CLASSICAL_BOUND, DEFAULT_GRID_STEP_DEG, TSIRELSON_BOUND,
};
use bellks_core::dsl;
use bellks_core::quantum::Context;
use bellks_core::sampler::sample;
use bellks_core::scenario::{Scenario, DEFAULT_TOLERANCE};
use bellks_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use report::{render_json, render_text, InputProvenance, ReportDocument};

const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "bellks",
    version,
    about = "Checks measurement scenarios for quantum-classical contradictions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a scenario: constraints, contradictions, witnesses, bounds
    Check(CheckArgs),
    /// Draw seeded samples from one measurement context
    Sample(SampleArgs),
    /// Search measurement angles maximizing the correlation functional
    Optimize(OptimizeArgs),
    /// Parse a scenario file and print diagnostics
    Parse(ParseArgs),
    /// List builtin scenarios
    List,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SampleFormat {
    Csv,
    Json,
}

/// `a,a',b,b'` in radians.
#[derive(Debug, Clone, Copy)]
struct AngleArg([f64; 4]);

fn parse_angles(s: &str) -> Result<AngleArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!("expected four comma-separated angles, got {}", parts.len()));
    }
    let mut angles = [0.0; 4];
    for (slot, part) in angles.iter_mut().zip(&parts) {
        let value: f64 = part
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a number", part.trim()))?;
        if !value.is_finite() {
            return Err(format!("angle `{}` is not finite", part.trim()));
        }
        *slot = value;
    }
    Ok(AngleArg(angles))
}

#[derive(Args)]
struct CheckArgs {
    /// Builtin name (hardy, mermin, chsh) or path to a .ksl file
    scenario: String,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compatibility and verification tolerance
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// Largest event arity searched for witnesses
    #[arg(long, default_value_t = DEFAULT_WITNESS_ARITY_CAP)]
    witness_arity: usize,
    /// Measurement angles a,a',b,b' in radians (chsh builtin only)
    #[arg(long, value_parser = parse_angles)]
    angles: Option<AngleArg>,
}

#[derive(Args)]
struct SampleArgs {
    /// Builtin name (hardy, mermin, chsh) or path to a .ksl file
    scenario: String,
    /// Comma-separated observable ids forming one compatible context
    context: String,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SampleFormat::Csv)]
    format: SampleFormat,
    /// Write the export here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OptimizeArgs {
    /// Coarse grid step in degrees, in (0, 45]
    #[arg(long, default_value_t = DEFAULT_GRID_STEP_DEG)]
    grid_deg: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    format: ReportFormat,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ParseArgs {
    /// Path to a .ksl file
    file: PathBuf,
}

/// Failure that terminates the process with a specific exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check(args) => cmd_check(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Parse(args) => cmd_parse(args),
        Command::List => cmd_list(),
    }
}

/// Resolves a builtin name or `.ksl` path into a scenario plus provenance.
fn load_scenario(
    selector: &str,
    angles: Option<AngleArg>,
) -> Result<(Scenario, InputProvenance), Failure> {
    if BUILTIN_NAMES.contains(&selector) {
        let scenario = match (selector, angles) {
            ("chsh", Some(AngleArg([a, ap, b, bp]))) => builtin_chsh(a, ap, b, bp)?,
            (_, Some(_)) => {
                return Err(Failure::input(format!(
                    "--angles applies only to the chsh builtin, not `{selector}`"
                )))
            }
            _ => builtin_by_name(selector, default_chsh_angles()).expect("name checked above"),
        };
        return Ok((scenario, InputProvenance::builtin(selector)));
    }
    if angles.is_some() {
        return Err(Failure::input(
            "--angles applies only to the chsh builtin, not scenario files",
        ));
    }

    let path = Path::new(selector);
    if !path.is_file() {
        return Err(Failure::input(format!(
            "unknown scenario `{selector}`: not a builtin ({}) and not a readable file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    let bytes = fs::read(path)?;
    let sha256 = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::input(format!("`{selector}` is not valid UTF-8")))?;
    match dsl::parse_strict(&text) {
        Ok(scenario) => {
            let name = scenario.name.clone();
            Ok((scenario, InputProvenance::file(&name, selector, sha256)))
        }
        Err(diagnostics) => {
            for d in &diagnostics {
                eprintln!("{selector}:{d}");
            }
            let errors = diagnostics
                .iter()
                .filter(|d| d.severity == dsl::Severity::Error)
                .count();
            Err(Failure::input(format!(
                "`{selector}` failed to parse with {errors} error(s)"
            )))
        }
    }
}

/// Writes to stdout; a reader that closed the pipe early ends the run
/// quietly instead of panicking.
fn write_stdout(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => std::process::exit(0),
        result => Ok(result?),
    }
}

/// Writes to `--out` if given, stdout otherwise. Rendered text already ends
/// with a newline.
fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(fs::write(path, text)?),
        None => write_stdout(text),
    }
}

fn cmd_check(args: CheckArgs) -> Result<(), Failure> {
    let (mut scenario, provenance) = load_scenario(&args.scenario, args.angles)?;
    scenario.tolerance = args.tolerance;
    scenario.validate()?;
    let options = AnalyzeOptions {
        witness_arity_cap: args.witness_arity,
    };
    let report = analyze(&scenario, &options)?;
    let doc = ReportDocument::new(provenance, report);
    let rendered = match args.format {
        ReportFormat::Text => render_text(&doc),
        ReportFormat::Json => render_json(&doc),
    };
    emit(&rendered, args.out.as_deref())
}

fn cmd_sample(args: SampleArgs) -> Result<(), Failure> {
    let (scenario, _) = load_scenario(&args.scenario, None)?;
    let ids: Vec<String> = args
        .context
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    if ids.is_empty() {
        return Err(Failure::input("context must name at least one observable"));
    }
    let context = Context::new(ids, &scenario.observables, scenario.tolerance)?;
    let run = sample(&scenario, &context, args.shots, args.seed)?;
    let rendered = match args.format {
        SampleFormat::Csv => sampling::render_csv(&run),
        SampleFormat::Json => sampling::render_json(&run),
    };
    emit(&rendered, args.out.as_deref())
}

/// JSON shape for `optimize`; the text form prints the same fields.
#[derive(Serialize)]
struct OptimizeDocument {
    grid_step_deg: f64,
    optimum: Optimum,
    magnitude: f64,
    classical_bound: f64,
    tsirelson_bound: f64,
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), Failure> {
    let optimum = maximize_with_grid(args.grid_deg)?;
    let doc = OptimizeDocument {
        grid_step_deg: args.grid_deg,
        optimum,
        magnitude: optimum.value.abs(),
        classical_bound: CLASSICAL_BOUND,
        tsirelson_bound: TSIRELSON_BOUND,
    };
    let rendered = match args.format {
        ReportFormat::Json => {
            let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
            text.push('\n');
            text
        }
        ReportFormat::Text => {
            let [a, ap, b, bp] = doc.optimum.angles.as_array();
            let n = report::num;
            format!(
                "grid step: {} degrees\n\
                 optimum |S| = {} (signed value {})\n\
                 angles: a = {}, a' = {}, b = {}, b' = {}\n\
                 classical bound = {}, tsirelson bound = {}\n",
                n(doc.grid_step_deg),
                n(doc.magnitude),
                n(doc.optimum.value),
                n(a),
                n(ap),
                n(b),
                n(bp),
                n(doc.classical_bound),
                n(doc.tsirelson_bound),
            )
        }
    };
    emit(&rendered, args.out.as_deref())
}

fn cmd_parse(args: ParseArgs) -> Result<(), Failure> {
    let file = args.file.display().to_string();
    let text = fs::read_to_string(&args.file)
        .map_err(|e| Failure::input(format!("cannot read `{file}`: {e}")))?;
    let outcome = dsl::parse(&text);
    for d in &outcome.diagnostics {
        eprintln!("{file}:{d}");
    }
    match outcome.scenario {
        Some(s) => write_stdout(&format!(
            "parsed scenario \"{}\": dim {}, {} observables, {} contexts, {} constraints, {} queries\n",
            s.name,
            s.dim,
            s.observables.len(),
            s.contexts.len(),
            s.constraints.len(),
            s.queries.len()
        )),
        None => {
            let errors = outcome
                .diagnostics
                .iter()
                .filter(|d| d.severity == dsl::Severity::Error)
                .count();
            Err(Failure::input(format!(
                "`{file}` failed to parse with {errors} error(s)"
            )))
        }
    }
}

fn cmd_list() -> Result<(), Failure> {
    write_stdout(concat!(
        "hardy   dim 3: five rank-one projectors in a cycle; one impossible event with quantum probability 1/9\n",
        "mermin  dim 8: ten three-qubit pauli observables in five commuting lines; parity contradiction\n",
        "chsh    dim 4: singlet correlations at four settings; functional with classical bounds [-2, 2]\n",
    ))
}
