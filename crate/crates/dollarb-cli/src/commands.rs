//! Subcommand implementations: merge flags over optional config files, call
//! into the library, and route output (machine-readable to stdout or files,
//! diagnostics to stderr).

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use dollarb::dataset::{load_dataset, save_dataset, Dataset};
use dollarb::dsp::{emg_linear_envelope, envelope_hop};
use dollarb::eval::{
    bench_recognition, report_to_csv, report_to_json, run_protocol, EvalConfig, Protocol,
};
use dollarb::layout::{BiosignalLayout, Condition};
use dollarb::recognizer::{enroll as enroll_gesture, recognize as recognize_gesture, RecognizerConfig};
use dollarb::segmentation::{crop_gesture, segment_dataset};
use dollarb::store::{load_store, save_store, TemplateStore};
use dollarb::synthgen::{generate, SynthSpec};

use crate::{
    BenchArgs, EnrollArgs, EvaluateArgs, PreprocessArgs, RecognizeArgs, SegmentArgs, SynthArgs,
};

/// Failures split by exit code: usage problems (1) versus data and
/// validation problems (2). `Pipe` is the quiet early exit taken when the
/// reader of our standard output goes away (`dollarb ... | head`).
pub enum CliError {
    Usage(String),
    Data(String),
    Pipe,
}

impl From<dollarb::Error> for CliError {
    fn from(e: dollarb::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn data_err(path: &Path, what: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {what}", path.display()))
}

/// A value that must arrive through a flag or the config file.
fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("missing {flag} (pass the flag or set it in --config)")))
}

/// Parse a `--config` file into a flag-mirror struct; absent file means all
/// defaults.
fn read_config<T: DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path).map_err(|e| data_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| data_err(path, format!("invalid config: {e}")))
}

/// Parse a `--config` file into a JSON object, injecting the command-line
/// seed when the file does not set one (the flag is mandatory anyway and
/// always wins).
fn read_config_with_seed(path: &Path, seed: u64) -> Result<serde_json::Value, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data_err(path, e))?;
    let mut value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| data_err(path, format!("invalid config: {e}")))?;
    let Some(map) = value.as_object_mut() else {
        return Err(data_err(path, "config must be a JSON object"));
    };
    map.entry("seed").or_insert(json!(seed));
    Ok(value)
}

fn parse_condition(text: &str) -> Result<Condition, CliError> {
    Condition::ALL
        .into_iter()
        .find(|c| c.as_str() == text)
        .ok_or_else(|| {
            let names: Vec<&str> = Condition::ALL.iter().map(|c| c.as_str()).collect();
            CliError::Usage(format!(
                "unknown condition '{text}' (expected one of: {})",
                names.join(", ")
            ))
        })
}

fn parse_protocol(text: &str) -> Result<Protocol, CliError> {
    match text {
        "ud" | "user_dependent" => Ok(Protocol::UserDependent),
        "var" | "articulation_variability" => Ok(Protocol::ArticulationVariability),
        "ui" | "user_independent" => Ok(Protocol::UserIndependent),
        other => Err(CliError::Usage(format!(
            "unknown protocol '{other}' (expected ud, var, or ui)"
        ))),
    }
}

fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| data_err(path, e))
}

/// Write machine output to standard output. A closed pipe is not an error
/// worth reporting: stop quietly, like any well-behaved filter.
fn print_stdout(text: &str) -> CliResult {
    use std::io::Write;
    let mut stdout = std::io::stdout().lock();
    match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Err(CliError::Pipe),
        Err(e) => Err(CliError::Data(format!("standard output: {e}"))),
    }
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

pub fn synth(args: SynthArgs) -> CliResult {
    let mut spec = match &args.config {
        Some(path) => {
            let value = read_config_with_seed(path, args.seed)?;
            serde_json::from_value::<SynthSpec>(value)
                .map_err(|e| data_err(path, format!("invalid corpus spec: {e}")))?
        }
        None => SynthSpec::new(args.seed),
    };
    spec.seed = args.seed;
    if let Some(v) = args.classes {
        spec.classes = v;
    }
    if let Some(v) = args.trials {
        spec.trials_per_class = v;
    }
    if let Some(v) = args.participants {
        spec.participants = v;
    }
    if let Some(v) = args.sigma {
        spec.noise_sigma = v;
    }
    if let Some(v) = args.duration {
        spec.duration_s = v;
    }
    if let Some(v) = args.active {
        spec.active_channels_per_class = v;
    }
    if !args.conditions.is_empty() {
        spec.conditions = args
            .conditions
            .iter()
            .map(|c| parse_condition(c))
            .collect::<Result<_, _>>()?;
    }
    spec.validate()?;

    let dataset = generate(&spec)?;
    save_dataset(&args.out, &dataset)?;
    eprintln!(
        "wrote {} gestures ({} classes, {} participants, {} conditions) to {}",
        dataset.gestures.len(),
        spec.classes,
        spec.participants,
        spec.conditions.len(),
        args.out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentConfig {
    dataset: Option<PathBuf>,
    group: Option<String>,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
}

pub fn segment(args: SegmentArgs) -> CliResult {
    let cfg: SegmentConfig = read_config(&args.config)?;
    let dataset_dir = require(args.dataset.or(cfg.dataset), "--dataset")?;
    let group = args.group.or(cfg.group).unwrap_or_else(|| "emg".to_owned());
    let out = args.out.or(cfg.out);
    let report_path = args.report.or(cfg.report);

    let dataset = load_dataset(&dataset_dir)?;
    let bounds = segment_dataset(&dataset, &group)?;

    let report: Vec<serde_json::Value> = dataset
        .gestures
        .iter()
        .zip(&bounds)
        .enumerate()
        .map(|(i, (g, b))| {
            json!({
                "index": i,
                "participant": g.participant,
                "label": g.label,
                "trial": g.trial,
                "condition": g.condition,
                "start_s": b.start_s,
                "stop_s": b.stop_s,
            })
        })
        .collect();
    let report_text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    match &report_path {
        Some(path) => write_text(path, &report_text)?,
        None => print_stdout(&report_text)?,
    }

    if let Some(out) = &out {
        let cropped: Vec<_> = dataset
            .gestures
            .iter()
            .zip(&bounds)
            .map(|(g, b)| crop_gesture(g, &dataset.layout, b))
            .collect::<Result<_, _>>()?;
        save_dataset(out, &Dataset::new(dataset.layout.clone(), cropped))?;
        eprintln!(
            "segmented {} gestures; cropped dataset written to {}",
            dataset.gestures.len(),
            out.display()
        );
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// preprocess
// ---------------------------------------------------------------------------

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PreprocessConfig {
    dataset: Option<PathBuf>,
    group: Option<String>,
    out: Option<PathBuf>,
}

pub fn preprocess(args: PreprocessArgs) -> CliResult {
    let cfg: PreprocessConfig = read_config(&args.config)?;
    let dataset_dir = require(args.dataset.or(cfg.dataset), "--dataset")?;
    let group_name = args.group.or(cfg.group).unwrap_or_else(|| "emg".to_owned());
    let out = require(args.out.or(cfg.out), "--out")?;

    let dataset = load_dataset(&dataset_dir)?;
    let Some(position) = dataset
        .layout
        .groups
        .iter()
        .position(|g| g.name == group_name)
    else {
        return Err(CliError::Data(format!(
            "layout has no group named '{group_name}'"
        )));
    };
    let rate = dataset.layout.groups[position].sample_rate_hz;

    let mut gestures = dataset.gestures;
    for g in &mut gestures {
        let rows = g.group_signals(&group_name)?;
        let enveloped: Vec<Vec<f64>> = rows
            .iter()
            .map(|row| emg_linear_envelope(row, rate))
            .collect::<Result<_, _>>()?;
        g.signals.insert(group_name.clone(), enveloped);
    }

    // The envelope's windowed downsampling changes the group's sample rate:
    // one output sample per hop.
    let mut layout = dataset.layout;
    layout.groups[position].sample_rate_hz = rate / envelope_hop(rate) as f64;

    save_dataset(&out, &Dataset::new(layout, gestures))?;
    eprintln!(
        "enveloped group '{group_name}' ({rate} Hz input); dataset written to {}",
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// enroll
// ---------------------------------------------------------------------------

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnrollConfig {
    dataset: Option<PathBuf>,
    n: Option<usize>,
    npc: Option<usize>,
    participant: Option<String>,
    condition: Option<String>,
    out: Option<PathBuf>,
}

pub fn enroll(args: EnrollArgs) -> CliResult {
    let cfg: EnrollConfig = read_config(&args.config)?;
    let dataset_dir = require(args.dataset.or(cfg.dataset), "--dataset")?;
    let out = require(args.out.or(cfg.out), "--out")?;
    let defaults = RecognizerConfig::default();
    let config = RecognizerConfig {
        n: args.n.or(cfg.n).unwrap_or(defaults.n),
        npc: args.npc.or(cfg.npc).unwrap_or(defaults.npc),
    };
    let participant = args.participant.or(cfg.participant);
    let condition = match args.condition.or(cfg.condition) {
        Some(text) => Some(parse_condition(&text)?),
        None => None,
    };

    let dataset = load_dataset(&dataset_dir)?;
    let mut store = TemplateStore::new(config, &dataset.layout);
    for g in &dataset.gestures {
        if participant.as_ref().is_some_and(|p| *p != g.participant) {
            continue;
        }
        if condition.is_some_and(|c| c != g.condition) {
            continue;
        }
        store.templates.push(enroll_gesture(g, &dataset.layout, &config)?);
    }
    if store.templates.is_empty() {
        return Err(CliError::Data(
            "no gestures matched the enrollment filter".into(),
        ));
    }

    save_store(&out, &store)?;
    eprintln!(
        "enrolled {} templates (n={}, npc={}) into {}",
        store.templates.len(),
        config.n,
        config.npc,
        out.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// recognize
// ---------------------------------------------------------------------------

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecognizeConfig {
    dataset: Option<PathBuf>,
    templates: Option<PathBuf>,
    index: Option<usize>,
}

pub fn recognize(args: RecognizeArgs) -> CliResult {
    let cfg: RecognizeConfig = read_config(&args.config)?;
    let dataset_dir = require(args.dataset.or(cfg.dataset), "--dataset")?;
    let store_path = require(args.templates.or(cfg.templates), "--templates")?;
    let index = args.index.or(cfg.index);

    let dataset = load_dataset(&dataset_dir)?;
    let store = load_store(&store_path)?;
    if store.templates.is_empty() {
        return Err(CliError::Data(format!(
            "{}: store holds no templates to recognize against",
            store_path.display()
        )));
    }
    store.validate_against(&dataset.layout)?;

    match index {
        Some(i) => {
            let Some(gesture) = dataset.gestures.get(i) else {
                return Err(CliError::Data(format!(
                    "--index {i} is out of range: dataset has {} gestures",
                    dataset.gestures.len()
                )));
            };
            let result =
                recognize_gesture(gesture, &store.templates, &dataset.layout, &store.config)?;
            let text = serde_json::to_string_pretty(&result).expect("result serializes");
            print_stdout(&(text + "\n"))?;
        }
        None => {
            for (i, gesture) in dataset.gestures.iter().enumerate() {
                let result =
                    recognize_gesture(gesture, &store.templates, &dataset.layout, &store.config)?;
                let record = json!({
                    "index": i,
                    "participant": gesture.participant,
                    "label": gesture.label,
                    "result": result,
                });
                print_stdout(&(record.to_string() + "\n"))?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

pub fn evaluate(args: EvaluateArgs) -> CliResult {
    let mut config = match &args.config {
        Some(path) => {
            let value = read_config_with_seed(path, args.seed)?;
            serde_json::from_value::<EvalConfig>(value)
                .map_err(|e| data_err(path, format!("invalid evaluation config: {e}")))?
        }
        None => {
            let protocol = parse_protocol(&require(args.protocol.clone(), "--protocol")?)?;
            match protocol {
                Protocol::UserDependent => EvalConfig::user_dependent(args.seed),
                Protocol::ArticulationVariability => {
                    EvalConfig::articulation_variability(args.seed)
                }
                Protocol::UserIndependent => EvalConfig::user_independent(args.seed),
            }
        }
    };
    config.seed = args.seed;
    if let Some(text) = &args.protocol {
        config.protocol = parse_protocol(text)?;
    }
    if !args.templates_t.is_empty() {
        config.templates_t = args.templates_t.clone();
    }
    if let Some(reps) = args.reps {
        config.repetitions = reps;
    }
    if let Some(n) = args.n {
        config.recognizer.n = n;
    }
    if let Some(npc) = args.npc {
        config.recognizer.npc = npc;
    }
    config.collect_timing |= args.timing;

    let dataset_dir = require(args.dataset, "--dataset")?;
    let dataset = load_dataset(&dataset_dir)?;
    let report = run_protocol(&dataset, &config)?;

    let text = report_to_json(&report);
    match &args.out {
        Some(path) => {
            write_text(path, &text)?;
            eprintln!("report written to {}", path.display());
        }
        None => print_stdout(&text)?,
    }
    if let Some(path) = &args.csv {
        write_text(path, &report_to_csv(&report))?;
        eprintln!("csv written to {}", path.display());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct BenchConfig {
    templates: Option<usize>,
    iterations: Option<usize>,
    layout: Option<PathBuf>,
    n: Option<usize>,
    npc: Option<usize>,
}

pub fn bench(args: BenchArgs) -> CliResult {
    let cfg: BenchConfig = read_config(&args.config)?;
    let template_count = args.templates.or(cfg.templates).unwrap_or(9);
    let iterations = args.iterations.or(cfg.iterations).unwrap_or(100);
    let defaults = RecognizerConfig::default();
    let config = RecognizerConfig {
        n: args.n.or(cfg.n).unwrap_or(defaults.n),
        npc: args.npc.or(cfg.npc).unwrap_or(defaults.npc),
    };
    let layout = match args.layout.or(cfg.layout) {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(|e| data_err(&path, e))?;
            let layout = BiosignalLayout::from_json_str(&text)
                .map_err(|e| data_err(&path, format!("invalid layout: {e}")))?;
            layout.validate()?;
            layout
        }
        None => BiosignalLayout::emg_imu(),
    };

    // The workload seed is fixed: bench output is a wall-clock measurement,
    // so it is never byte-reproducible, and only subcommands whose output is
    // reproducible take --seed. The gesture content does not affect timing,
    // only its shape (channels x samples) does.
    let report = bench_recognition(&layout, &config, template_count, iterations, 0)?;
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    print_stdout(&(text + "\n"))?;
    Ok(())
}
