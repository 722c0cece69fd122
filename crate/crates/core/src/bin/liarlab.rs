use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liarlab::harness::{emit, parse_document, run_scenario, Experiment, Format};
use liarlab::Error;

#[derive(Parser, Debug)]
#[command(
    name = "liarlab",
    version,
    about = "Measurement-chain liar state experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the experiment named in the scenario.
    Run(RunArgs),
    /// Apparatus perturbation sweep.
    Sweep(RunArgs),
    /// Per-column completion classification.
    Classify(RunArgs),
    /// Liar budget of the completion.
    Budget(RunArgs),
    /// Environment perturbation sweep.
    Decohere(RunArgs),
    /// Two-register repeat measurement sweep.
    Repeat(RunArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
    /// Output path; defaults to the scenario's `output` field, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rescale `g` to unit norm instead of rejecting it.
    #[arg(long)]
    renormalize: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Validation { .. } => 2,
        Error::Io { .. } => 4,
        _ => 3,
    }
}

fn execute(experiment: Option<Experiment>, args: RunArgs) -> Result<(), Error> {
    let text = std::fs::read_to_string(&args.scenario).map_err(|source| Error::Io {
        path: args.scenario.clone(),
        source,
    })?;
    let mut doc = parse_document(&text)?;
    if let Some(e) = experiment {
        doc.experiment = e;
    }
    doc.renormalize |= args.renormalize;
    let scenario = doc.validate()?;
    let table = run_scenario(&scenario)?;
    let format = match args.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    let out = args.out.or_else(|| scenario.output.clone());
    emit(&table, format, out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::Run(a) => (None, a),
        Command::Sweep(a) => (Some(Experiment::Sweep), a),
        Command::Classify(a) => (Some(Experiment::Classify), a),
        Command::Budget(a) => (Some(Experiment::Budget), a),
        Command::Decohere(a) => (Some(Experiment::Decohere), a),
        Command::Repeat(a) => (Some(Experiment::Repeat), a),
    };
    match execute(experiment, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("liarlab: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
