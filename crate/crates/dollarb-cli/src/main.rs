//! `dollarb` — command-line front end for the gesture recognition library.
//!
//! One binary, subcommand per pipeline stage: generate a synthetic corpus,
//! segment and preprocess recordings, enroll templates, recognize
//! candidates, run the evaluation protocols, and benchmark recognition
//! latency.
//!
//! Conventions shared by every subcommand:
//!
//! - exit code 0 on success, 1 for usage errors (unknown or malformed
//!   flags), 2 for data and validation errors (bad files, impossible
//!   parameters, insufficient data);
//! - machine-readable output (JSON, JSONL, CSV) goes to standard output or
//!   `--out` files only; progress notes and errors go to standard error;
//! - `--config file.json` provides defaults that explicit flags override;
//! - every randomized subcommand requires `--seed`, and equal seeds produce
//!   byte-identical outputs.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::CliError;

#[derive(Parser)]
#[command(
    name = "dollarb",
    version,
    about = "Biosignal gesture recognition: synthesize, segment, enroll, recognize, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic gesture corpus as a dataset directory.
    Synth(SynthArgs),
    /// Detect activity bounds per gesture and optionally write a cropped
    /// dataset.
    Segment(SegmentArgs),
    /// Replace one group's channels with their EMG linear envelope.
    Preprocess(PreprocessArgs),
    /// Enroll gestures as templates into a template store.
    Enroll(EnrollArgs),
    /// Match dataset gestures against a template store.
    Recognize(RecognizeArgs),
    /// Run an evaluation protocol over a dataset and report error rates.
    Evaluate(EvaluateArgs),
    /// Measure recognition latency on synthetic gestures.
    Bench(BenchArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Master seed for the corpus (equal seeds, equal bytes).
    #[arg(long)]
    seed: u64,
    /// Corpus description JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of gesture classes.
    #[arg(long)]
    classes: Option<usize>,
    /// Trials per (participant, condition, class).
    #[arg(long)]
    trials: Option<usize>,
    /// Number of participants.
    #[arg(long)]
    participants: Option<usize>,
    /// Comma-separated recording conditions (personalized, variation_time,
    /// variation_speed, variation_size, standardized).
    #[arg(long, value_delimiter = ',')]
    conditions: Vec<String>,
    /// White-noise standard deviation relative to prototype amplitude.
    #[arg(long)]
    sigma: Option<f64>,
    /// Recording duration in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Active (signal-carrying) channels per class.
    #[arg(long)]
    active: Option<usize>,
    /// Output dataset directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SegmentArgs {
    /// Flag defaults JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset directory.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Name of the EMG group to segment on.
    #[arg(long)]
    group: Option<String>,
    /// Write a cropped copy of the dataset here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the JSON bounds report here instead of standard output.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Flag defaults JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset directory.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Name of the group to replace with its linear envelope.
    #[arg(long)]
    group: Option<String>,
    /// Output dataset directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EnrollArgs {
    /// Flag defaults JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset directory.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Resampled points per channel.
    #[arg(long)]
    n: Option<usize>,
    /// Retained principal components.
    #[arg(long)]
    npc: Option<usize>,
    /// Enroll only this participant's gestures.
    #[arg(long)]
    participant: Option<String>,
    /// Enroll only gestures recorded under this condition.
    #[arg(long)]
    condition: Option<String>,
    /// Output template store file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RecognizeArgs {
    /// Flag defaults JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset directory holding the candidate gestures.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Template store to match against.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Recognize only the gesture at this dataset index (prints one JSON
    /// result instead of one JSONL record per gesture).
    #[arg(long)]
    index: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Sampling seed (equal seeds, equal reports).
    #[arg(long)]
    seed: u64,
    /// Evaluation config JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Protocol: ud (user-dependent), var (articulation variability), or
    /// ui (user-independent).
    #[arg(long)]
    protocol: Option<String>,
    /// Input dataset directory.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Template counts to sweep, comma-separated or repeated.
    #[arg(long = "T", value_delimiter = ',')]
    templates_t: Vec<usize>,
    /// Sampling repetitions per grid point.
    #[arg(long)]
    reps: Option<usize>,
    /// Resampled points per channel.
    #[arg(long)]
    n: Option<usize>,
    /// Retained principal components.
    #[arg(long)]
    npc: Option<usize>,
    /// Collect wall-clock timing (makes the report non-reproducible).
    #[arg(long)]
    timing: bool,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the report cells as CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Flag defaults JSON; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of enrolled templates to match against.
    #[arg(long)]
    templates: Option<usize>,
    /// Timed recognitions per block (one cold block, one warmed).
    #[arg(long)]
    iterations: Option<usize>,
    /// Layout JSON file (defaults to 16 EMG @ 2000 Hz + 72 IMU @ 148 Hz).
    #[arg(long)]
    layout: Option<PathBuf>,
    /// Resampled points per channel.
    #[arg(long)]
    n: Option<usize>,
    /// Retained principal components.
    #[arg(long)]
    npc: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version print to stdout and succeed; real parse
            // errors (unknown flags, bad values) print usage and exit 1.
            let code = u8::from(e.use_stderr());
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    let result = match cli.command {
        Command::Synth(args) => commands::synth(args),
        Command::Segment(args) => commands::segment(args),
        Command::Preprocess(args) => commands::preprocess(args),
        Command::Enroll(args) => commands::enroll(args),
        Command::Recognize(args) => commands::recognize(args),
        Command::Evaluate(args) => commands::evaluate(args),
        Command::Bench(args) => commands::bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        // Our reader went away mid-output; nothing to report, nobody to
        // report it to.
        Err(CliError::Pipe) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
