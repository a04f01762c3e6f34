//! Evaluation protocols: how well does the recognizer do on a dataset, and
//! how fast.
//!
//! Three protocols, all template-sampling experiments repeated many times:
//!
//! - user-dependent: per participant, per class, draw `T` personalized
//!   trials as templates and 1 disjoint trial as the candidate;
//! - articulation variability: templates drawn exactly as user-dependent,
//!   candidates drawn from the time/speed/size variation conditions;
//! - user-independent: leave one participant out, draw `T` standardized
//!   trials per class from every remaining participant as templates, score
//!   one standardized candidate per class from the held-out participant.
//!
//! Every draw comes from a PRNG stream addressed by (participant, T,
//! repetition), so reports are byte-reproducible from (dataset, config) and
//! adding repetitions never reshuffles earlier ones. Optional wall-clock
//! timing is the one exception to reproducibility and is off by default.
//! Cells are keyed, not appended, so parallel repetition scheduling cannot
//! change the report.
//!
//! Repetitions resample the same small pool of recordings over and over, so
//! by default each (candidate, template) latent distance is computed once
//! and the repetitions replay cached values through the recognizer's own
//! argmin rule. With timing enabled, every recognition instead runs the real
//! matching path under a timer; both modes produce identical error cells
//! because they share the distance function and the tie rule.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::layout::{BiosignalLayout, Condition, RawGesture};
use crate::recognizer::{
    best_index, enroll, normalize, recognize, recognize_processed, template_distance,
    LatentTemplate, ProcessedGesture, RecognizerConfig,
};
use crate::streams::{part_from_str, rng_for};
use crate::synthgen::{generate, SynthSpec, VariationKind};
use crate::{Error, Result};

/// Which evaluation protocol a config drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    UserDependent,
    ArticulationVariability,
    UserIndependent,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::UserDependent => "user_dependent",
            Protocol::ArticulationVariability => "articulation_variability",
            Protocol::UserIndependent => "user_independent",
        }
    }
}

fn default_repetitions() -> usize {
    100
}

/// Evaluation parameters. The same config and dataset always produce the
/// same report (timing aside, which is opt-in precisely for that reason).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub protocol: Protocol,
    /// Template-count sweep; one report cell per (participant, T).
    pub templates_t: Vec<usize>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    pub seed: u64,
    #[serde(default)]
    pub recognizer: RecognizerConfig,
    /// Measure wall-clock per recognition. Off by default: timing values
    /// vary run to run, and default reports promise byte-identity.
    #[serde(default)]
    pub collect_timing: bool,
}

impl EvalConfig {
    /// User-dependent defaults: T from 1 to 9, 100 repetitions.
    pub fn user_dependent(seed: u64) -> Self {
        EvalConfig {
            protocol: Protocol::UserDependent,
            templates_t: (1..=9).collect(),
            repetitions: default_repetitions(),
            seed,
            recognizer: RecognizerConfig::default(),
            collect_timing: false,
        }
    }

    /// Articulation-variability defaults: same sampling grid as
    /// user-dependent, scored against variation-condition candidates.
    pub fn articulation_variability(seed: u64) -> Self {
        EvalConfig {
            protocol: Protocol::ArticulationVariability,
            ..EvalConfig::user_dependent(seed)
        }
    }

    /// User-independent defaults: small/medium/large template counts.
    pub fn user_independent(seed: u64) -> Self {
        EvalConfig {
            protocol: Protocol::UserIndependent,
            templates_t: vec![1, 3, 7],
            ..EvalConfig::user_dependent(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.templates_t.is_empty() {
            return Err(Error::InvalidArgument("templates_t must not be empty".into()));
        }
        if let Some(t) = self.templates_t.iter().find(|&&t| t == 0) {
            return Err(Error::InvalidArgument(format!("template count must be >= 1, got {t}")));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidArgument("repetitions must be >= 1".into()));
        }
        self.recognizer.validate()
    }
}

/// One grid point of a report: a participant, a template count, and the
/// candidate condition scored ("personalized", a variation kind, or
/// "standardized").
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub participant: String,
    pub templates_t: usize,
    pub kind: String,
    pub trials: usize,
    pub errors: usize,
    pub error_rate: f64,
}

/// Wall-clock statistics over every scored recognition in a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean_ms: f64,
    pub sd_ms: f64,
    pub recognitions: usize,
}

fn timing_stats(durations_ms: &[f64]) -> TimingStats {
    let n = durations_ms.len();
    let mean = durations_ms.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 {
        (durations_ms.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    TimingStats {
        mean_ms: mean,
        sd_ms: sd,
        recognitions: n,
    }
}

/// Full evaluation output: config echo plus one cell per grid point, in
/// deterministic (participant, T, kind) order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub protocol: Protocol,
    pub seed: u64,
    pub config: EvalConfig,
    pub cells: Vec<ReportCell>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<TimingStats>,
}

impl EvaluationReport {
    /// Mean error rate across participants for one (T, kind) grid point.
    pub fn mean_error_rate(&self, templates_t: usize, kind: &str) -> Option<f64> {
        let rates: Vec<f64> = self
            .cells
            .iter()
            .filter(|c| c.templates_t == templates_t && c.kind == kind)
            .map(|c| c.error_rate)
            .collect();
        (!rates.is_empty()).then(|| rates.iter().sum::<f64>() / rates.len() as f64)
    }
}

/// Pretty JSON rendering of a report, newline-terminated.
pub fn report_to_json(report: &EvaluationReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// Flat CSV rendering of a report's cells (timing excluded), one row per
/// cell in report order.
pub fn report_to_csv(report: &EvaluationReport) -> String {
    let mut out = String::from("protocol,participant,templates_t,kind,trials,errors,error_rate\n");
    for c in &report.cells {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            report.protocol.as_str(),
            c.participant,
            c.templates_t,
            c.kind,
            c.trials,
            c.errors,
            c.error_rate
        ));
    }
    out
}

/// Draw `t` template indices plus one disjoint candidate index from
/// `0..len`, uniformly without replacement. Exposed so the disjointness
/// guarantee can be property-tested against the exact sampler the
/// protocols use.
pub fn sample_templates_and_candidate(
    rng: &mut ChaCha8Rng,
    len: usize,
    t: usize,
) -> Result<(Vec<usize>, usize)> {
    if len < t + 1 {
        return Err(Error::InsufficientData(format!(
            "need at least {} trials to draw {t} templates plus a candidate, have {len}",
            t + 1
        )));
    }
    let mut picks = sample_indices(rng, len, t + 1).into_vec();
    let candidate = picks.pop().expect("t + 1 >= 1");
    Ok((picks, candidate))
}

// ---------------------------------------------------------------------------
// Shared indexing, caching, and scoring
// ---------------------------------------------------------------------------

/// participant -> label -> dataset indices, for one recording condition.
/// BTreeMaps keep iteration (and therefore sampling and report order)
/// deterministic.
type ConditionIndex = BTreeMap<String, BTreeMap<String, Vec<usize>>>;

fn index_condition(dataset: &Dataset, condition: Condition) -> ConditionIndex {
    let mut map: ConditionIndex = BTreeMap::new();
    for (i, g) in dataset.gestures.iter().enumerate() {
        if g.condition == condition {
            map.entry(g.participant.clone())
                .or_default()
                .entry(g.label.clone())
                .or_default()
                .push(i);
        }
    }
    map
}

fn enroll_all(dataset: &Dataset, config: &RecognizerConfig, indices: &[usize]) -> Result<BTreeMap<usize, LatentTemplate>> {
    indices
        .par_iter()
        .map(|&i| Ok((i, enroll(&dataset.gestures[i], &dataset.layout, config)?)))
        .collect()
}

fn normalize_all(dataset: &Dataset, config: &RecognizerConfig, indices: &[usize]) -> Result<BTreeMap<usize, ProcessedGesture>> {
    indices
        .par_iter()
        .map(|&i| Ok((i, normalize(&dataset.gestures[i], &dataset.layout, config)?)))
        .collect()
}

/// All candidate-to-template latent distances for one protocol cell, keyed
/// by dataset index. Entries are bit-identical to what `recognize` would
/// compute, because the same `template_distance` produces both.
struct PairCache {
    column: BTreeMap<usize, usize>,
    rows: BTreeMap<usize, Vec<f64>>,
}

impl PairCache {
    fn build(
        config: &RecognizerConfig,
        candidates: &[usize],
        templates: &[usize],
        enrolled: &BTreeMap<usize, LatentTemplate>,
        processed: &BTreeMap<usize, ProcessedGesture>,
    ) -> Self {
        let column = templates.iter().enumerate().map(|(j, &t)| (t, j)).collect();
        let rows = candidates
            .par_iter()
            .map(|&i| {
                let row = templates
                    .iter()
                    .map(|&j| template_distance(&processed[&i], &enrolled[&j], config))
                    .collect();
                (i, row)
            })
            .collect();
        PairCache { column, rows }
    }

    fn distance(&self, candidate: usize, template: usize) -> f64 {
        self.rows[&candidate][self.column[&template]]
    }
}

/// Outcome of one repetition: error count per scored kind, plus optional
/// per-recognition durations.
struct RepOutcome {
    errors: Vec<usize>,
    durations_ms: Vec<f64>,
}

/// Scores one repetition's draw of templates (dataset indices, in draw
/// order) against candidates tagged `(kind slot, dataset index, true label)`.
/// A cache is present exactly when timing is off; with timing on, each
/// candidate runs the full matching path under a timer instead.
struct RepScorer<'a> {
    dataset: &'a Dataset,
    config: &'a RecognizerConfig,
    enrolled: &'a BTreeMap<usize, LatentTemplate>,
    processed: &'a BTreeMap<usize, ProcessedGesture>,
    cache: Option<PairCache>,
}

impl RepScorer<'_> {
    fn score_rep(
        &self,
        kinds: usize,
        template_idx: &[usize],
        candidates: &[(usize, usize, &str)],
    ) -> Result<RepOutcome> {
        let mut outcome = RepOutcome {
            errors: vec![0; kinds],
            durations_ms: Vec::new(),
        };
        if let Some(cache) = &self.cache {
            for &(slot, idx, true_label) in candidates {
                let distances: Vec<f64> = template_idx
                    .iter()
                    .map(|&t| cache.distance(idx, t))
                    .collect();
                let best = best_index(&distances).expect("protocols never draw zero templates");
                let predicted = &self.dataset.gestures[template_idx[best]].label;
                outcome.errors[slot] += usize::from(predicted != true_label);
            }
        } else {
            let refs: Vec<&LatentTemplate> =
                template_idx.iter().map(|i| &self.enrolled[i]).collect();
            for &(slot, idx, true_label) in candidates {
                let started = Instant::now();
                let result = recognize_processed(&self.processed[&idx], &refs, self.config)?;
                outcome.durations_ms.push(started.elapsed().as_secs_f64() * 1e3);
                outcome.errors[slot] += usize::from(result.label != true_label);
            }
        }
        Ok(outcome)
    }
}

fn expect_protocol(config: &EvalConfig, expected: Protocol) -> Result<()> {
    if config.protocol != expected {
        return Err(Error::InvalidArgument(format!(
            "config is for protocol '{}', runner expects '{}'",
            config.protocol.as_str(),
            expected.as_str()
        )));
    }
    Ok(())
}

fn require_trials(
    participant: &str,
    label: &str,
    condition: Condition,
    have: usize,
    need: usize,
) -> Result<()> {
    if have < need {
        return Err(Error::InsufficientData(format!(
            "participant '{participant}' class '{label}' has {have} {} trials; this cell needs {need}",
            condition.as_str()
        )));
    }
    Ok(())
}

/// Run `repetitions` sampling rounds in parallel and fold error counts and
/// durations in repetition order.
fn run_reps<F>(repetitions: usize, kinds: usize, rep_fn: F) -> Result<(Vec<usize>, Vec<f64>)>
where
    F: Fn(usize) -> Result<RepOutcome> + Sync,
{
    let outcomes: Vec<RepOutcome> = (0..repetitions)
        .into_par_iter()
        .map(&rep_fn)
        .collect::<Result<_>>()?;
    let mut errors = vec![0usize; kinds];
    let mut durations = Vec::new();
    for o in outcomes {
        for (total, e) in errors.iter_mut().zip(&o.errors) {
            *total += e;
        }
        durations.extend(o.durations_ms);
    }
    Ok((errors, durations))
}

// ---------------------------------------------------------------------------
// Protocols
// ---------------------------------------------------------------------------

/// User-dependent protocol: per participant and template count T, each
/// repetition draws T templates and 1 disjoint candidate per class from the
/// personalized condition and scores every candidate.
pub fn run_user_dependent(dataset: &Dataset, config: &EvalConfig) -> Result<EvaluationReport> {
    config.validate()?;
    expect_protocol(config, Protocol::UserDependent)?;

    let by_participant = index_condition(dataset, Condition::Personalized);
    if by_participant.is_empty() {
        return Err(Error::InsufficientData(
            "dataset has no personalized-condition gestures".into(),
        ));
    }

    let mut cells = Vec::new();
    let mut durations = Vec::new();
    for (participant, by_label) in &by_participant {
        let all_indices: Vec<usize> = by_label.values().flatten().copied().collect();
        let enrolled = enroll_all(dataset, &config.recognizer, &all_indices)?;
        let processed = normalize_all(dataset, &config.recognizer, &all_indices)?;
        let scorer = RepScorer {
            dataset,
            config: &config.recognizer,
            enrolled: &enrolled,
            processed: &processed,
            cache: (!config.collect_timing).then(|| {
                PairCache::build(&config.recognizer, &all_indices, &all_indices, &enrolled, &processed)
            }),
        };

        for &t in &config.templates_t {
            for (label, indices) in by_label {
                require_trials(participant, label, Condition::Personalized, indices.len(), t + 1)?;
            }

            let (errors, times) = run_reps(config.repetitions, 1, |rep| {
                let mut rng = rng_for(
                    config.seed,
                    "eval-ud",
                    &[part_from_str(participant), t as u64, rep as u64],
                );
                let mut template_idx = Vec::with_capacity(t * by_label.len());
                let mut candidates = Vec::with_capacity(by_label.len());
                for (label, indices) in by_label {
                    let (tmpl, cand) = sample_templates_and_candidate(&mut rng, indices.len(), t)?;
                    debug_assert!(!tmpl.contains(&cand));
                    template_idx.extend(tmpl.iter().map(|&j| indices[j]));
                    candidates.push((0, indices[cand], label.as_str()));
                }
                scorer.score_rep(1, &template_idx, &candidates)
            })?;

            let trials = by_label.len() * config.repetitions;
            cells.push(ReportCell {
                participant: participant.clone(),
                templates_t: t,
                kind: Condition::Personalized.as_str().to_owned(),
                trials,
                errors: errors[0],
                error_rate: errors[0] as f64 / trials as f64,
            });
            durations.extend(times);
        }
    }

    Ok(EvaluationReport {
        protocol: config.protocol,
        seed: config.seed,
        config: config.clone(),
        cells,
        timing: config.collect_timing.then(|| timing_stats(&durations)),
    })
}

/// Articulation-variability protocol: templates drawn from the personalized
/// condition exactly as user-dependent; candidates drawn per repetition from
/// each variation condition, scored per variation kind.
pub fn run_articulation_variability(
    dataset: &Dataset,
    config: &EvalConfig,
) -> Result<EvaluationReport> {
    config.validate()?;
    expect_protocol(config, Protocol::ArticulationVariability)?;

    let personalized = index_condition(dataset, Condition::Personalized);
    if personalized.is_empty() {
        return Err(Error::InsufficientData(
            "dataset has no personalized-condition gestures".into(),
        ));
    }
    let varied: Vec<(VariationKind, ConditionIndex)> = VariationKind::ALL
        .into_iter()
        .map(|k| (k, index_condition(dataset, k.condition())))
        .collect();

    let mut cells = Vec::new();
    let mut durations = Vec::new();
    for (participant, by_label) in &personalized {
        let template_indices: Vec<usize> = by_label.values().flatten().copied().collect();
        let enrolled = enroll_all(dataset, &config.recognizer, &template_indices)?;

        // Candidate pools: per kind, per label, this participant's variation
        // trials. Every probed class must have at least one.
        let mut pools: Vec<(VariationKind, &BTreeMap<String, Vec<usize>>)> = Vec::new();
        for (kind, index) in &varied {
            let by_label_var = index.get(participant).ok_or_else(|| {
                Error::InsufficientData(format!(
                    "participant '{participant}' has no {} trials",
                    kind.condition().as_str()
                ))
            })?;
            for label in by_label.keys() {
                require_trials(
                    participant,
                    label,
                    kind.condition(),
                    by_label_var.get(label).map_or(0, Vec::len),
                    1,
                )?;
            }
            pools.push((*kind, by_label_var));
        }
        let candidate_indices: Vec<usize> = pools
            .iter()
            .flat_map(|(_, p)| p.values().flatten().copied())
            .collect();
        let processed = normalize_all(dataset, &config.recognizer, &candidate_indices)?;
        let scorer = RepScorer {
            dataset,
            config: &config.recognizer,
            enrolled: &enrolled,
            processed: &processed,
            cache: (!config.collect_timing).then(|| {
                PairCache::build(
                    &config.recognizer,
                    &candidate_indices,
                    &template_indices,
                    &enrolled,
                    &processed,
                )
            }),
        };

        for &t in &config.templates_t {
            for (label, indices) in by_label {
                require_trials(participant, label, Condition::Personalized, indices.len(), t)?;
            }

            let (errors, times) = run_reps(config.repetitions, pools.len(), |rep| {
                let mut rng = rng_for(
                    config.seed,
                    "eval-var",
                    &[part_from_str(participant), t as u64, rep as u64],
                );
                let mut template_idx = Vec::with_capacity(t * by_label.len());
                let mut candidates: Vec<(usize, usize, &str)> = Vec::new();
                for (label, indices) in by_label {
                    for j in sample_indices(&mut rng, indices.len(), t).into_iter() {
                        template_idx.push(indices[j]);
                    }
                    for (ki, (_, pool)) in pools.iter().enumerate() {
                        let var_indices = &pool[label];
                        let pick = var_indices[rng.gen_range(0..var_indices.len())];
                        candidates.push((ki, pick, label.as_str()));
                    }
                }
                scorer.score_rep(pools.len(), &template_idx, &candidates)
            })?;

            let trials = by_label.len() * config.repetitions;
            for ((kind, _), errs) in pools.iter().zip(&errors) {
                cells.push(ReportCell {
                    participant: participant.clone(),
                    templates_t: t,
                    kind: kind.as_str().to_owned(),
                    trials,
                    errors: *errs,
                    error_rate: *errs as f64 / trials as f64,
                });
            }
            durations.extend(times);
        }
    }

    Ok(EvaluationReport {
        protocol: config.protocol,
        seed: config.seed,
        config: config.clone(),
        cells,
        timing: config.collect_timing.then(|| timing_stats(&durations)),
    })
}

/// User-independent protocol: leave one participant out; per repetition,
/// draw T standardized trials per class from every training participant as
/// templates and score one standardized candidate per class from the
/// held-out participant.
pub fn run_user_independent(dataset: &Dataset, config: &EvalConfig) -> Result<EvaluationReport> {
    config.validate()?;
    expect_protocol(config, Protocol::UserIndependent)?;

    let standardized = index_condition(dataset, Condition::Standardized);
    if standardized.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "user-independent evaluation needs >= 2 participants with standardized trials, found {}",
            standardized.len()
        )));
    }
    // One shared label grid: every participant must cover every class.
    let labels: Vec<String> = standardized
        .values()
        .flat_map(|by_label| by_label.keys().cloned())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for (participant, by_label) in &standardized {
        for label in &labels {
            require_trials(
                participant,
                label,
                Condition::Standardized,
                by_label.get(label).map_or(0, Vec::len),
                1,
            )?;
        }
    }

    let all_indices: Vec<usize> = standardized
        .values()
        .flat_map(|by_label| by_label.values().flatten().copied())
        .collect();
    let enrolled = enroll_all(dataset, &config.recognizer, &all_indices)?;
    let processed = normalize_all(dataset, &config.recognizer, &all_indices)?;

    let mut cells = Vec::new();
    let mut durations = Vec::new();
    for held_out in standardized.keys() {
        let candidate_indices: Vec<usize> =
            standardized[held_out].values().flatten().copied().collect();
        let template_indices: Vec<usize> = standardized
            .iter()
            .filter(|(p, _)| *p != held_out)
            .flat_map(|(_, by_label)| by_label.values().flatten().copied())
            .collect();
        let scorer = RepScorer {
            dataset,
            config: &config.recognizer,
            enrolled: &enrolled,
            processed: &processed,
            cache: (!config.collect_timing).then(|| {
                PairCache::build(
                    &config.recognizer,
                    &candidate_indices,
                    &template_indices,
                    &enrolled,
                    &processed,
                )
            }),
        };

        for &t in &config.templates_t {
            for (participant, by_label) in &standardized {
                if participant != held_out {
                    for label in &labels {
                        require_trials(participant, label, Condition::Standardized, by_label[label].len(), t)?;
                    }
                }
            }

            let (errors, times) = run_reps(config.repetitions, 1, |rep| {
                let mut rng = rng_for(
                    config.seed,
                    "eval-ui",
                    &[part_from_str(held_out), t as u64, rep as u64],
                );
                let mut template_idx = Vec::new();
                let mut candidates = Vec::with_capacity(labels.len());
                for (participant, by_label) in &standardized {
                    if participant == held_out {
                        for label in &labels {
                            let indices = &by_label[label];
                            candidates.push((
                                0,
                                indices[rng.gen_range(0..indices.len())],
                                label.as_str(),
                            ));
                        }
                    } else {
                        for label in &labels {
                            let indices = &by_label[label];
                            for j in sample_indices(&mut rng, indices.len(), t).into_iter() {
                                template_idx.push(indices[j]);
                            }
                        }
                    }
                }
                scorer.score_rep(1, &template_idx, &candidates)
            })?;

            let trials = labels.len() * config.repetitions;
            cells.push(ReportCell {
                participant: held_out.clone(),
                templates_t: t,
                kind: Condition::Standardized.as_str().to_owned(),
                trials,
                errors: errors[0],
                error_rate: errors[0] as f64 / trials as f64,
            });
            durations.extend(times);
        }
    }

    Ok(EvaluationReport {
        protocol: config.protocol,
        seed: config.seed,
        config: config.clone(),
        cells,
        timing: config.collect_timing.then(|| timing_stats(&durations)),
    })
}

/// Dispatch a config to its protocol runner.
pub fn run_protocol(dataset: &Dataset, config: &EvalConfig) -> Result<EvaluationReport> {
    match config.protocol {
        Protocol::UserDependent => run_user_dependent(dataset, config),
        Protocol::ArticulationVariability => run_articulation_variability(dataset, config),
        Protocol::UserIndependent => run_user_independent(dataset, config),
    }
}

// ---------------------------------------------------------------------------
// Recognition latency benchmark
// ---------------------------------------------------------------------------

/// Wall-clock of the full `recognize` path (validation, resample/normalize,
/// per-template projections) with templates pre-enrolled, reported both
/// cold and warmed.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct BenchReport {
    pub template_count: usize,
    /// First `iterations` calls from a cold start — includes first-touch
    /// allocation and cache effects.
    pub unwarmed: TimingStats,
    /// The next `iterations` calls after the cold block.
    pub warmed: TimingStats,
}

/// Time `iterations` warmed (and unwarmed) recognitions of synthetic
/// gestures under the given layout and recognizer config.
pub fn bench_recognition(
    layout: &BiosignalLayout,
    config: &RecognizerConfig,
    template_count: usize,
    iterations: usize,
    seed: u64,
) -> Result<BenchReport> {
    if template_count == 0 || iterations == 0 {
        return Err(Error::InvalidArgument(
            "bench needs template_count >= 1 and iterations >= 1".into(),
        ));
    }
    let mut spec = SynthSpec::new(seed);
    spec.layout = layout.clone();
    spec.classes = template_count;
    spec.trials_per_class = 2; // trial 0 enrolls, trial 1 probes
    spec.active_channels_per_class = spec
        .active_channels_per_class
        .min(layout.total_channels());
    let dataset = generate(&spec)?;

    let mut templates = Vec::with_capacity(template_count);
    let mut probes = Vec::with_capacity(template_count);
    for g in &dataset.gestures {
        if g.trial == 0 {
            templates.push(enroll(g, layout, config)?);
        } else {
            probes.push(g);
        }
    }

    let time_block = |count: usize, offset: usize| -> Result<TimingStats> {
        let mut durations = Vec::with_capacity(count);
        for i in 0..count {
            let probe: &RawGesture = probes[(offset + i) % probes.len()];
            let started = Instant::now();
            let result = recognize(probe, &templates, layout, config)?;
            let elapsed = started.elapsed().as_secs_f64() * 1e3;
            // Keep the result alive so the call cannot be optimized out.
            std::hint::black_box(&result);
            durations.push(elapsed);
        }
        Ok(timing_stats(&durations))
    };

    let unwarmed = time_block(iterations, 0)?;
    let warmed = time_block(iterations, iterations)?;
    Ok(BenchReport {
        template_count,
        unwarmed,
        warmed,
    })
}

// ---------------------------------------------------------------------------
