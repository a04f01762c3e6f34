//! Deterministic synthetic gesture corpus generator.
//!
//! Stands in for a recorded dataset so every pipeline stage can be exercised
//! and measured without hardware: each class owns a fixed random subset of
//! active channels and a smooth per-channel prototype (a sum of 2–4
//! Gaussian-windowed sinusoids), and each trial is that prototype with
//! per-channel amplitude jitter plus white noise, sampled at every group's
//! native rate. EMG-named groups are scaled to ~1e-4 native units, others to
//! ~1, mirroring desk-scale hardware.
//!
//! Everything is a pure function of [`SynthSpec`]: draws come from PRNG
//! streams addressed per (participant, condition, class, trial), so growing
//! a corpus — more trials, more conditions, more participants — never
//! changes the recordings it already contained.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::layout::{BiosignalLayout, Condition, RawGesture};
use crate::recognizer::{normalize, resample_channel, RecognizerConfig};
use crate::streams::{part_from_str, rng_for};
use crate::{Error, Result};

/// Owner id for prototypes shared by all participants (the standardized
/// condition, where everyone performs the same nominal gesture).
const SHARED_OWNER: u64 = u64::MAX;

/// The three recorded ways a gesture articulation can vary from its
/// personalized baseline.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariationKind {
    /// Re-recorded later in a session: amplitudes drift, noise is fresh.
    Time,
    /// Performed faster: same trajectory over fewer samples.
    Speed,
    /// Performed larger: amplitudes scale up.
    Size,
}

impl VariationKind {
    pub const ALL: [VariationKind; 3] = [
        VariationKind::Time,
        VariationKind::Speed,
        VariationKind::Size,
    ];

    /// The dataset condition tag that marks gestures of this variation.
    pub fn condition(self) -> Condition {
        match self {
            VariationKind::Time => Condition::VariationTime,
            VariationKind::Speed => Condition::VariationSpeed,
            VariationKind::Size => Condition::VariationSize,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            VariationKind::Time => "time",
            VariationKind::Speed => "speed",
            VariationKind::Size => "size",
        }
    }
}

/// Native-unit scale for a group, chosen by name: EMG-like groups live at
/// ~1e-4 (surface electromyography is measured in tens of microvolts),
/// everything else at ~1 (IMU accelerations, orientations).
pub fn group_scale(name: &str) -> f64 {
    if name.to_ascii_lowercase().contains("emg") {
        1e-4
    } else {
        1.0
    }
}

fn default_classes() -> usize {
    10
}
fn default_trials() -> usize {
    10
}
fn default_participants() -> usize {
    1
}
fn default_conditions() -> Vec<Condition> {
    vec![Condition::Personalized]
}
fn default_active() -> usize {
    6
}
// Calibrated so the default 88-channel corpus passes the separability
// audit with margin to spare across seeds (min_between / max_within is
// roughly 1.15-1.3 at 0.10 and crosses 1.0 near 0.3): with only a few
// active channels per class, the inactive channels' noise dominates the
// normalized energy, so all-pairs separability caps sigma well below what
// per-candidate recognition alone would tolerate.
fn default_sigma() -> f64 {
    0.10
}
fn default_jitter() -> [f64; 2] {
    [0.85, 1.15]
}
fn default_duration() -> f64 {
    2.0
}
fn default_speed() -> f64 {
    2.0
}
fn default_size() -> f64 {
    2.0
}
fn default_drift() -> f64 {
    1.2
}

/// Full description of a synthetic corpus. Two equal specs generate
/// byte-identical datasets on any platform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    /// Master seed; every stream in the corpus derives from it.
    pub seed: u64,
    /// Number of gesture classes.
    #[serde(default = "default_classes")]
    pub classes: usize,
    /// Trials recorded per (participant, condition, class).
    #[serde(default = "default_trials")]
    pub trials_per_class: usize,
    /// Number of synthetic participants. Personalized prototypes differ per
    /// participant; standardized prototypes are shared.
    #[serde(default = "default_participants")]
    pub participants: usize,
    /// Channel layout to synthesize for.
    #[serde(default = "BiosignalLayout::emg_imu")]
    pub layout: BiosignalLayout,
    /// Which recording conditions to emit (each adds its own gestures;
    /// removing or adding one never changes the others).
    #[serde(default = "default_conditions")]
    pub conditions: Vec<Condition>,
    /// Channels that carry signal for a given class; the rest are noise.
    #[serde(default = "default_active")]
    pub active_channels_per_class: usize,
    /// White-noise standard deviation, relative to unit prototype amplitude.
    #[serde(default = "default_sigma")]
    pub noise_sigma: f64,
    /// Per-channel, per-trial amplitude jitter range `[lo, hi]`.
    #[serde(default = "default_jitter")]
    pub amplitude_jitter: [f64; 2],
    /// Recording length in seconds (variations may shorten it).
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    /// Speed variation compresses the recording by this factor.
    #[serde(default = "default_speed")]
    pub speed_factor: f64,
    /// Size variation scales amplitudes by this factor.
    #[serde(default = "default_size")]
    pub size_factor: f64,
    /// Time variation scales amplitudes by this drift factor.
    #[serde(default = "default_drift")]
    pub drift_factor: f64,
}

impl SynthSpec {
    /// A desk-scale default corpus: 10 classes x 10 trials, one participant,
    /// personalized condition, 16 EMG @ 2000 Hz + 72 IMU @ 148 Hz.
    pub fn new(seed: u64) -> Self {
        SynthSpec {
            seed,
            classes: default_classes(),
            trials_per_class: default_trials(),
            participants: default_participants(),
            layout: BiosignalLayout::emg_imu(),
            conditions: default_conditions(),
            active_channels_per_class: default_active(),
            noise_sigma: default_sigma(),
            amplitude_jitter: default_jitter(),
            duration_s: default_duration(),
            speed_factor: default_speed(),
            size_factor: default_size(),
            drift_factor: default_drift(),
        }
    }

    /// Parse a spec from JSON, rejecting unknown fields.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let spec: SynthSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("invalid synth spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        let reject = |msg: String| Err(Error::InvalidArgument(msg));
        if self.classes == 0 || self.trials_per_class == 0 || self.participants == 0 {
            return reject("classes, trials_per_class, and participants must be >= 1".into());
        }
        let total = self.layout.total_channels();
        if self.active_channels_per_class == 0 || self.active_channels_per_class > total {
            return reject(format!(
                "active_channels_per_class must be in 1..={total}, got {}",
                self.active_channels_per_class
            ));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return reject(format!("noise_sigma must be finite and >= 0, got {}", self.noise_sigma));
        }
        let [lo, hi] = self.amplitude_jitter;
        if !(lo > 0.0 && hi > 0.0 && lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return reject(format!("amplitude_jitter must satisfy 0 < lo <= hi, got [{lo}, {hi}]"));
        }
        if !(self.duration_s > 0.0) || !self.duration_s.is_finite() {
            return reject(format!("duration_s must be positive, got {}", self.duration_s));
        }
        for f in [self.speed_factor, self.size_factor, self.drift_factor] {
            if !(f > 0.0) || !f.is_finite() {
                return reject(format!("variation factors must be positive, got {f}"));
            }
        }
        if self.conditions.is_empty() {
            return reject("conditions must not be empty".into());
        }
        for (i, c) in self.conditions.iter().enumerate() {
            if self.conditions[..i].contains(c) {
                return reject(format!("duplicate condition '{}'", c.as_str()));
            }
        }
        for group in &self.layout.groups {
            let samples = (group.sample_rate_hz * self.duration_s).round();
            if samples < 2.0 {
                return reject(format!(
                    "group '{}' would get {samples} samples over {} s; need at least 2",
                    group.name, self.duration_s
                ));
            }
            if (samples / self.speed_factor).round() < 2.0 {
                return reject(format!(
                    "speed_factor {} would leave group '{}' with fewer than 2 samples",
                    self.speed_factor, group.name
                ));
            }
        }
        Ok(())
    }

    fn samples_for(&self, rate_hz: f64) -> usize {
        (rate_hz * self.duration_s).round() as usize
    }
}

/// One Gaussian-windowed sinusoid; prototypes sum a few of these.
#[derive(Clone, Debug)]
struct Tone {
    amp: f64,
    center_s: f64,
    width_s: f64,
    freq_hz: f64,
    phase: f64,
}

impl Tone {
    fn value(&self, t: f64) -> f64 {
        let z = (t - self.center_s) / self.width_s;
        let window = (-0.5 * z * z).exp();
        self.amp * window * (std::f64::consts::TAU * self.freq_hz * (t - self.center_s) + self.phase).sin()
    }
}

/// Per-class shape: one optional tone stack per global channel index
/// (`None` marks a channel that only carries noise for this class).
type ClassPrototype = Vec<Option<Vec<Tone>>>;

/// Draw a class's active channels and per-channel prototypes. `owner` is a
/// participant index for personalized shapes or [`SHARED_OWNER`] for the
/// standardized set.
fn class_prototype(spec: &SynthSpec, owner: u64, class: usize) -> ClassPrototype {
    let mut rng = rng_for(spec.seed, "prototype", &[owner, class as u64]);
    let total = spec.layout.total_channels();
    let spans = spec.layout.group_spans();

    // Pick the active subset. When the budget allows, every group gets at
    // least one active channel: a group left entirely to noise would be
    // blown up to unit scale by per-group normalization and swamp the
    // signal-bearing groups.
    let mut active = vec![false; total];
    let mut remaining = spec.active_channels_per_class;
    if remaining >= spans.len() {
        for span in &spans {
            active[span.start + rng.gen_range(0..span.len())] = true;
            remaining -= 1;
        }
    }
    let pool: Vec<usize> = (0..total).filter(|&i| !active[i]).collect();
    for pick in sample_indices(&mut rng, pool.len(), remaining).into_iter() {
        active[pool[pick]] = true;
    }

    (0..total)
        .map(|ch| {
            if !active[ch] {
                return None;
            }
            let tones = (0..rng.gen_range(2..=4))
                .map(|_| Tone {
                    amp: rng.gen_range(0.5..=1.0),
                    center_s: rng.gen_range(0.3..=0.7) * spec.duration_s,
                    width_s: rng.gen_range(0.05..=0.15) * spec.duration_s,
                    freq_hz: rng.gen_range(1.0..=4.0),
                    phase: rng.gen_range(0.0..std::f64::consts::TAU),
                })
                .collect();
            Some(tones)
        })
        .collect()
}

fn condition_part(condition: Condition) -> u64 {
    Condition::ALL
        .iter()
        .position(|c| *c == condition)
        .expect("condition is in ALL") as u64
}

/// Synthesize one trial: prototype x per-channel jitter + white noise, in
/// native units per group.
fn synth_trial(
    spec: &SynthSpec,
    proto: &ClassPrototype,
    participant_idx: usize,
    class_idx: usize,
    trial_idx: usize,
    condition: Condition,
) -> RawGesture {
    let mut rng = rng_for(
        spec.seed,
        "trial",
        &[
            condition_part(condition),
            participant_idx as u64,
            class_idx as u64,
            trial_idx as u64,
        ],
    );
    let [lo, hi] = spec.amplitude_jitter;
    let total = spec.layout.total_channels();
    // Jitter is drawn for every channel (active or not) so the draw layout
    // never depends on which subset a prototype happens to activate.
    let jitter: Vec<f64> = (0..total).map(|_| rng.gen_range(lo..=hi)).collect();
    let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");

    let spans = spec.layout.group_spans();
    let mut signals = std::collections::BTreeMap::new();
    for (group, span) in spec.layout.groups.iter().zip(&spans) {
        let scale = group_scale(&group.name);
        let samples = spec.samples_for(group.sample_rate_hz);
        let rows: Vec<Vec<f64>> = span
            .clone()
            .map(|global| {
                let tones = proto[global].as_deref();
                (0..samples)
                    .map(|i| {
                        let t = i as f64 / group.sample_rate_hz;
                        let value = tones
                            .map(|ts| ts.iter().map(|tone| tone.value(t)).sum::<f64>())
                            .unwrap_or(0.0);
                        (value * jitter[global] + noise.sample(&mut rng)) * scale
                    })
                    .collect()
            })
            .collect();
        signals.insert(group.name.clone(), rows);
    }

    RawGesture {
        label: format!("g{class_idx:02}"),
        participant: format!("p{participant_idx:02}"),
        condition,
        trial: trial_idx as u32,
        signals,
    }
}

/// Generate the corpus a spec describes. Gestures come out ordered by
/// (participant, class, trial, condition); the order, like the contents, is
/// a pure function of the spec.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;

    let want = |c: Condition| spec.conditions.contains(&c);
    let variations: Vec<VariationKind> = VariationKind::ALL
        .into_iter()
        .filter(|k| want(k.condition()))
        .collect();
    let needs_base = want(Condition::Personalized) || !variations.is_empty();

    let mut gestures = Vec::new();
    for p in 0..spec.participants {
        let personalized: Vec<ClassPrototype> = if needs_base {
            (0..spec.classes).map(|k| class_prototype(spec, p as u64, k)).collect()
        } else {
            Vec::new()
        };
        let standardized: Vec<ClassPrototype> = if want(Condition::Standardized) {
            (0..spec.classes).map(|k| class_prototype(spec, SHARED_OWNER, k)).collect()
        } else {
            Vec::new()
        };

        for class in 0..spec.classes {
            for trial in 0..spec.trials_per_class {
                if needs_base {
                    let base = synth_trial(
                        spec,
                        &personalized[class],
                        p,
                        class,
                        trial,
                        Condition::Personalized,
                    );
                    for kind in &variations {
                        gestures.push(generate_variation(&base, *kind, spec)?);
                    }
                    if want(Condition::Personalized) {
                        gestures.push(base);
                    }
                }
                if want(Condition::Standardized) {
                    gestures.push(synth_trial(
                        spec,
                        &standardized[class],
                        p,
                        class,
                        trial,
                        Condition::Standardized,
                    ));
                }
            }
        }
    }
    Ok(Dataset::new(spec.layout.clone(), gestures))
}

/// Derive a variation-condition recording from a personalized base trial.
///
/// time: amplitudes x `drift_factor` plus fresh noise (a later-session
/// recording); speed: every channel time-compressed by `speed_factor` (same
/// trajectory, fewer samples); size: amplitudes x `size_factor`. The fresh
/// noise stream is addressed by the base's identity, so the same base always
/// yields the same variation.
pub fn generate_variation(
    base: &RawGesture,
    kind: VariationKind,
    spec: &SynthSpec,
) -> Result<RawGesture> {
    spec.validate()?;
    let mut out = base.clone();
    out.condition = kind.condition();

    match kind {
        VariationKind::Time => {
            let mut rng = rng_for(
                spec.seed,
                "variation-noise",
                &[
                    part_from_str(&base.participant),
                    part_from_str(&base.label),
                    u64::from(base.trial),
                ],
            );
            let noise = Normal::new(0.0, spec.noise_sigma).expect("validated sigma");
            for group in &spec.layout.groups {
                let scale = group_scale(&group.name);
                let rows = out.signals.get_mut(&group.name).ok_or_else(|| {
                    Error::InvalidGesture(format!("base gesture is missing group '{}'", group.name))
                })?;
                for row in rows {
                    for v in row.iter_mut() {
                        *v = *v * spec.drift_factor + noise.sample(&mut rng) * scale;
                    }
                }
            }
        }
        VariationKind::Speed => {
            for rows in out.signals.values_mut() {
                for row in rows.iter_mut() {
                    let m = ((row.len() as f64 / spec.speed_factor).round() as usize).max(2);
                    *row = resample_channel(row, m)?;
                }
            }
        }
        VariationKind::Size => {
            for rows in out.signals.values_mut() {
                for row in rows.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= spec.size_factor;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Result of the brute-force class-separability audit.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SeparabilityAudit {
    /// Largest L2 distance between normalized same-class recordings.
    pub max_within: f64,
    /// Smallest L2 distance between normalized different-class recordings.
    pub min_between: f64,
    pub pairs_within: usize,
    pub pairs_between: usize,
}

impl SeparabilityAudit {
    /// True when every same-class pair is closer than every cross-class
    /// pair — the corpus is separable by raw nearest-neighbor distance.
    pub fn passes(&self) -> bool {
        self.max_within < self.min_between
    }
}

/// Brute-force pairwise audit: normalize every recording, flatten it, and
/// compare L2 distances of all pairs within the same (participant,
/// condition) cell. Errors if the dataset has no same-class or no
/// cross-class pair to compare.
pub fn audit_separability(
    dataset: &Dataset,
    config: &RecognizerConfig,
) -> Result<SeparabilityAudit> {
    let mut flat: Vec<(usize, Vec<f64>)> = Vec::with_capacity(dataset.gestures.len());
    for (i, g) in dataset.gestures.iter().enumerate() {
        let processed = normalize(g, &dataset.layout, config)?;
        let row: Vec<f64> = processed.data.iter().flatten().copied().collect();
        flat.push((i, row));
    }

    let mut audit = SeparabilityAudit {
        max_within: f64::NEG_INFINITY,
        min_between: f64::INFINITY,
        pairs_within: 0,
        pairs_between: 0,
    };
    for (a, (ia, ra)) in flat.iter().enumerate() {
        let ga = &dataset.gestures[*ia];
        for (ib, rb) in flat.iter().skip(a + 1) {
            let gb = &dataset.gestures[*ib];
            if ga.participant != gb.participant || ga.condition != gb.condition {
                continue;
            }
            let dist = ra
                .iter()
                .zip(rb)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            if ga.label == gb.label {
                audit.pairs_within += 1;
                audit.max_within = audit.max_within.max(dist);
            } else {
                audit.pairs_between += 1;
                audit.min_between = audit.min_between.min(dist);
            }
        }
    }
    if audit.pairs_within == 0 || audit.pairs_between == 0 {
        return Err(Error::InsufficientData(format!(
            "separability audit needs same-class and cross-class pairs, found {} and {}",
            audit.pairs_within, audit.pairs_between
        )));
    }
    Ok(audit)
}

// ---------------------------------------------------------------------------
