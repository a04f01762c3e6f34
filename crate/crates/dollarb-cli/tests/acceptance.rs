//! Release gates for the recognizer and its supporting pipeline.
//!
//! One test per criterion, named `criterion_NN_*` so the harness prints one
//! pass/fail line per gate. Every tolerance is part of the contract and
//! appears verbatim in the asserts. Run with
//! `cargo test --test acceptance -- --nocapture` to see the measured values
//! behind each verdict.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dollarb::dataset::Dataset;
use dollarb::dsp::{design_butterworth, frequency_response, FilterKind};
use dollarb::eval::{bench_recognition, run_protocol, EvalConfig};
use dollarb::layout::{BiosignalGroup, BiosignalLayout, Condition, RawGesture};
use dollarb::linalg::symmetric_eigen;
use dollarb::recognizer::{
    enroll, normalize, recognize, resample_channel, LatentTemplate, RecognizerConfig,
};
use dollarb::segmentation::{participant_max_amplitudes, segment, segment_dataset};
use dollarb::synthgen::{audit_separability, generate, generate_variation, SynthSpec, VariationKind};

// ---------------------------------------------------------------------------
// Random fixtures
// ---------------------------------------------------------------------------

fn random_layout(rng: &mut ChaCha8Rng) -> BiosignalLayout {
    let rates = [50.0, 148.0, 500.0, 2000.0];
    let groups = (0..rng.gen_range(1..=3))
        .map(|i| BiosignalGroup {
            name: format!("g{i}"),
            channels: rng.gen_range(1..=3),
            sample_rate_hz: rates[rng.gen_range(0..rates.len())],
        })
        .collect();
    BiosignalLayout { groups }
}

/// A gesture with independent uniform samples per channel; `flat_group`
/// optionally forces one whole group to a constant (zero information).
fn random_gesture(
    rng: &mut ChaCha8Rng,
    layout: &BiosignalLayout,
    label: &str,
    flat_group: Option<usize>,
) -> RawGesture {
    let mut signals = BTreeMap::new();
    for (gi, group) in layout.groups.iter().enumerate() {
        let len = rng.gen_range(10..40);
        let rows: Vec<Vec<f64>> = (0..group.channels)
            .map(|_| {
                if flat_group == Some(gi) {
                    let level = rng.gen_range(-5.0..5.0);
                    vec![level; len]
                } else {
                    (0..len).map(|_| rng.gen_range(-5.0..5.0)).collect()
                }
            })
            .collect();
        signals.insert(group.name.clone(), rows);
    }
    RawGesture {
        label: label.to_owned(),
        participant: "p".to_owned(),
        condition: Condition::Personalized,
        trial: 0,
        signals,
    }
}

fn argsort(distances: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..distances.len()).collect();
    order.sort_by(|&i, &j| distances[i].partial_cmp(&distances[j]).unwrap().then(i.cmp(&j)));
    order
}

// ---------------------------------------------------------------------------
// 1. Self-match exactness
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_self_match_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0001);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let layout = random_layout(&mut rng);
        let c = layout.total_channels();
        let config = RecognizerConfig {
            n: rng.gen_range(8..=24),
            npc: rng.gen_range(1..=c),
        };
        let gesture = random_gesture(&mut rng, &layout, "self", None);
        let template = enroll(&gesture, &layout, &config).unwrap();
        let result = recognize(&gesture, &[template], &layout, &config).unwrap();
        assert_eq!(result.label, "self", "case {case}: wrong label");
        assert!(
            result.distance <= 1e-9,
            "case {case}: self-distance {} exceeds 1e-9",
            result.distance
        );
        worst = worst.max(result.distance);
    }
    println!("criterion 01 PASS: 1000/1000 self-matches, worst distance {worst:.2e} (gate 1e-9)");
}

// ---------------------------------------------------------------------------
// 2. Normalization contract
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_normalization_contract() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0002);
    let (mut worst_mean, mut worst_std) = (0.0f64, 0.0f64);
    for case in 0..1000 {
        let layout = random_layout(&mut rng);
        // Every tenth gesture carries one information-free (constant) group,
        // which must come out all-zero and is exempt from the unit-std rule.
        let flat = (case % 10 == 0).then(|| rng.gen_range(0..layout.groups.len()));
        let config = RecognizerConfig {
            n: rng.gen_range(8..=24),
            npc: 1,
        };
        let gesture = random_gesture(&mut rng, &layout, "norm", flat);
        let processed = normalize(&gesture, &layout, &config).unwrap();

        for (ch, row) in processed.data.iter().enumerate() {
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            assert!(
                mean.abs() <= 1e-9,
                "case {case}: channel {ch} mean {mean} exceeds 1e-9"
            );
            worst_mean = worst_mean.max(mean.abs());
        }
        for (gi, span) in layout.group_spans().iter().enumerate() {
            let rows = &processed.data[span.clone()];
            let count = rows.iter().map(Vec::len).sum::<usize>();
            let sumsq: f64 = rows.iter().flatten().map(|v| v * v).sum();
            if flat == Some(gi) {
                assert!(
                    rows.iter().flatten().all(|&v| v == 0.0),
                    "case {case}: constant group {gi} was not zeroed"
                );
            } else {
                // Channels are already demeaned, so the joint population std
                // of the group's concatenated samples is the RMS.
                let std = (sumsq / count as f64).sqrt();
                assert!(
                    (std - 1.0).abs() <= 1e-9,
                    "case {case}: group {gi} joint std {std} not within 1e-9 of 1"
                );
                worst_std = worst_std.max((std - 1.0).abs());
            }
        }
    }
    println!(
        "criterion 02 PASS: 1000 gestures, worst |mean| {worst_mean:.2e}, worst |std-1| {worst_std:.2e} (gates 1e-9)"
    );
}

// ---------------------------------------------------------------------------
// 3. Eigendecomposition oracle
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_eigen_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0003);
    let mut worst_residual = 0.0f64;
    for case in 0..200 {
        let c = rng.gen_range(2..=10);
        let mut a = vec![vec![0.0f64; c]; c];
        for i in 0..c {
            for j in 0..=i {
                let v = rng.gen_range(-1.0..1.0);
                a[i][j] = v;
                a[j][i] = v;
            }
        }
        let eigen = symmetric_eigen(&a).unwrap();
        assert_eq!(eigen.values.len(), c);

        let tol = 1e-8 * eigen.values[0].max(1.0);
        for (k, (lambda, u)) in eigen.values.iter().zip(&eigen.vectors).enumerate() {
            let residual: f64 = (0..c)
                .map(|i| {
                    let av: f64 = (0..c).map(|j| a[i][j] * u[j]).sum();
                    let r = av - lambda * u[i];
                    r * r
                })
                .sum::<f64>()
                .sqrt();
            assert!(
                residual <= tol,
                "case {case}: pair {k} residual {residual:.3e} exceeds {tol:.3e}"
            );
            worst_residual = worst_residual.max(residual);
        }
        for i in 0..c {
            for j in 0..c {
                let dot: f64 = (0..c).map(|r| eigen.vectors[i][r] * eigen.vectors[j][r]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!(
                    (dot - expect).abs() <= 1e-8,
                    "case {case}: <u{i}, u{j}> = {dot} is not orthonormal within 1e-8"
                );
            }
        }
        for w in eigen.values.windows(2) {
            assert!(w[0] >= w[1], "case {case}: eigenvalues not descending: {w:?}");
        }
        let trace: f64 = (0..c).map(|i| a[i][i]).sum();
        let sum: f64 = eigen.values.iter().sum();
        assert!(
            (sum - trace).abs() <= 1e-8 * trace.abs().max(1.0),
            "case {case}: eigenvalue sum {sum} vs trace {trace} off by more than 1e-8 relative"
        );
    }
    println!("criterion 03 PASS: 200 matrices, worst eigenpair residual {worst_residual:.2e}");
}

// ---------------------------------------------------------------------------
// 4. Resampling exactness
// ---------------------------------------------------------------------------

#[test]
fn criterion_04_resampling_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0004);
    let mut worst = 0.0f64;

    // Linear ramps land exactly on the line at every resampled position.
    for &len in &[2usize, 3, 7, 64, 101] {
        for &n in &[2usize, 5, 17, 64, 101] {
            let (a, b) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let ramp: Vec<f64> = (0..len).map(|i| a + b * i as f64).collect();
            let out = resample_channel(&ramp, n).unwrap();
            for (j, got) in out.iter().enumerate() {
                let t = j as f64 * (len - 1) as f64 / (n - 1) as f64;
                let expect = a + b * t;
                assert!(
                    (got - expect).abs() <= 1e-12,
                    "ramp len {len} -> n {n}: point {j} off by {:.3e}",
                    (got - expect).abs()
                );
                worst = worst.max((got - expect).abs());
            }
        }
    }

    // Endpoints are copied exactly (bit-for-bit) from arbitrary input.
    for _ in 0..100 {
        let len = rng.gen_range(2..50);
        let n = rng.gen_range(2..50);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(-1e6..1e6)).collect();
        let out = resample_channel(&xs, n).unwrap();
        assert_eq!(out[0].to_bits(), xs[0].to_bits(), "first point not exact");
        assert_eq!(
            out[n - 1].to_bits(),
            xs[len - 1].to_bits(),
            "last point not exact"
        );
    }

    // n = N is the identity.
    for _ in 0..100 {
        let len = rng.gen_range(2..80);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(-1e3..1e3)).collect();
        let out = resample_channel(&xs, len).unwrap();
        for (got, want) in out.iter().zip(&xs) {
            assert!(
                (got - want).abs() <= 1e-12,
                "identity resample moved a sample by {:.3e}",
                (got - want).abs()
            );
        }
    }
    println!("criterion 04 PASS: ramps within {worst:.2e} (gate 1e-12), endpoints bit-exact, n=N identity");
}

// ---------------------------------------------------------------------------
// 5. Per-group scale invariance
// ---------------------------------------------------------------------------

fn scale_group(gesture: &RawGesture, group: &str, k: f64) -> RawGesture {
    let mut out = gesture.clone();
    for row in out.signals.get_mut(group).unwrap() {
        for v in row {
            *v *= k;
        }
    }
    out
}

#[test]
fn criterion_05_scale_invariance() {
    let layout = BiosignalLayout {
        groups: vec![
            BiosignalGroup { name: "g0".into(), channels: 3, sample_rate_hz: 100.0 },
            BiosignalGroup { name: "g1".into(), channels: 2, sample_rate_hz: 50.0 },
        ],
    };
    let config = RecognizerConfig { n: 16, npc: 5 };
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0005);
    let mut worst_rel = 0.0f64;

    for trial in 0..100 {
        let templates: Vec<RawGesture> = (0..4)
            .map(|i| random_gesture(&mut rng, &layout, &format!("t{i}"), None))
            .collect();
        let candidate = random_gesture(&mut rng, &layout, "probe", None);

        let enrolled: Vec<LatentTemplate> = templates
            .iter()
            .map(|t| enroll(t, &layout, &config).unwrap())
            .collect();
        let base = recognize(&candidate, &enrolled, &layout, &config).unwrap();

        for k in [0.1, 10.0, 1e4] {
            // The whole g0 group is scaled everywhere: in the candidate and
            // in every template recording (a sensor-gain change).
            let scaled_enrolled: Vec<LatentTemplate> = templates
                .iter()
                .map(|t| enroll(&scale_group(t, "g0", k), &layout, &config).unwrap())
                .collect();
            let scaled = recognize(
                &scale_group(&candidate, "g0", k),
                &scaled_enrolled,
                &layout,
                &config,
            )
            .unwrap();

            assert_eq!(
                scaled.template_index, base.template_index,
                "trial {trial}, k={k}: argmin moved"
            );
            for (i, (d, d0)) in scaled.distances.iter().zip(&base.distances).enumerate() {
                let rel = (d - d0).abs() / d0.abs().max(1e-12);
                assert!(
                    rel <= 1e-6,
                    "trial {trial}, k={k}: distance {i} changed by {rel:.3e} relative"
                );
                worst_rel = worst_rel.max(rel);
            }
        }
    }
    println!(
        "criterion 05 PASS: 100 trials x k in {{0.1, 10, 1e4}}, argmin stable, worst relative distance drift {worst_rel:.2e} (gate 1e-6)"
    );
}

// ---------------------------------------------------------------------------
// 6. Synthetic accuracy curve (user-dependent)
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_synthetic_accuracy_curve() {
    let spec = SynthSpec::new(42);
    assert_eq!(spec.classes, 10);
    assert_eq!(spec.layout.total_channels(), 88);
    let dataset = generate(&spec).unwrap();

    let audit = audit_separability(&dataset, &RecognizerConfig::default()).unwrap();
    assert!(
        audit.passes(),
        "default corpus fails its separability audit: max within-class {} vs min between-class {}",
        audit.max_within,
        audit.min_between
    );

    let config = EvalConfig::user_dependent(42);
    assert_eq!(config.templates_t, (1..=9).collect::<Vec<_>>());
    assert_eq!(config.repetitions, 100);
    let report = run_protocol(&dataset, &config).unwrap();

    let kind = Condition::Personalized.as_str();
    let curve: Vec<f64> = (1..=9)
        .map(|t| report.mean_error_rate(t, kind).unwrap())
        .collect();

    assert!(
        curve[8] <= 0.05,
        "error at T=9 is {:.3}, above the 5% gate",
        curve[8]
    );
    assert!(
        curve[0] <= 0.30,
        "error at T=1 is {:.3}, above the 30% gate",
        curve[0]
    );
    for t in 1..9 {
        assert!(
            curve[t] <= curve[t - 1] + 0.02,
            "error rose from {:.3} at T={} to {:.3} at T={} (allowed noise 2pp)",
            curve[t - 1],
            t,
            curve[t],
            t + 1
        );
    }
    let shown: Vec<String> = curve.iter().map(|e| format!("{:.1}%", 100.0 * e)).collect();
    println!(
        "criterion 06 PASS: separability margin {:.3}, user-dependent error over T=1..9: [{}]",
        audit.min_between / audit.max_within,
        shown.join(", ")
    );
}

// ---------------------------------------------------------------------------
// 7. Noiseless variation robustness
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_noiseless_variation_robustness() {
    let mut spec = SynthSpec::new(2024);
    spec.classes = 5;
    spec.trials_per_class = 2;
    spec.noise_sigma = 0.0;
    spec.amplitude_jitter = [1.0, 1.0];
    assert_eq!(spec.speed_factor, 2.0);
    assert_eq!(spec.size_factor, 2.0);
    let dataset = generate(&spec).unwrap();

    let config = RecognizerConfig::default();
    let templates: Vec<LatentTemplate> = dataset
        .gestures
        .iter()
        .map(|g| enroll(g, &dataset.layout, &config).unwrap())
        .collect();

    let mut trials = 0usize;
    let mut errors = 0usize;
    for base in &dataset.gestures {
        for kind in [VariationKind::Speed, VariationKind::Size] {
            let varied = generate_variation(base, kind, &spec).unwrap();
            let result = recognize(&varied, &templates, &dataset.layout, &config).unwrap();
            trials += 1;
            if result.label != base.label {
                errors += 1;
            }
        }
    }
    assert_eq!(
        errors, 0,
        "noiseless x2 speed/size variations misrecognized {errors}/{trials} times"
    );
    println!("criterion 07 PASS: {trials}/{trials} noiseless speed x2 and size x2 variations recognized");
}

// ---------------------------------------------------------------------------
// 8. Segmentation recovery on padded bursts
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_segmentation_recovery() {
    let rate = 2000.0;
    let duration = 2.0;
    let samples = (rate * duration) as usize;
    let layout = BiosignalLayout {
        groups: vec![BiosignalGroup { name: "emg".into(), channels: 3, sample_rate_hz: rate }],
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0008);
    let mut gestures = Vec::new();
    let mut truth = Vec::new();
    for i in 0..200 {
        let t0 = rng.gen_range(0.2..1.0);
        let t1 = t0 + rng.gen_range(0.6..0.8);
        let (i0, i1) = ((t0 * rate) as usize, (t1 * rate) as usize);
        let rows: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                (0..samples)
                    .map(|s| {
                        let amp = if (i0..i1).contains(&s) { 1.0 } else { 0.003 };
                        amp * rng.gen_range(-1.0..1.0)
                    })
                    .collect()
            })
            .collect();
        let mut signals = BTreeMap::new();
        signals.insert("emg".to_owned(), rows);
        gestures.push(RawGesture {
            label: "burst".to_owned(),
            participant: format!("r{i:03}"),
            condition: Condition::Personalized,
            trial: 0,
            signals,
        });
        truth.push((t0, t1));
    }
    let dataset = Dataset::new(layout.clone(), gestures);
    let bounds = segment_dataset(&dataset, "emg").unwrap();

    let slack = 0.150 + 1e-9;
    let mut tight = 0usize;
    for (b, &(t0, t1)) in bounds.iter().zip(&truth) {
        let contains = b.start_s <= t0 && b.stop_s >= t1;
        if contains && t0 - b.start_s <= slack && b.stop_s - t1 <= slack {
            tight += 1;
        }
    }
    assert!(
        tight >= 190,
        "only {tight}/200 bursts recovered within 150 ms per side (gate: 190)"
    );

    // Silence has no onset to find: bounds degrade to the full recording.
    let quiet_rows = vec![vec![0.0; samples]; 3];
    let mut signals = BTreeMap::new();
    signals.insert("emg".to_owned(), quiet_rows);
    let quiet = RawGesture {
        label: "quiet".to_owned(),
        participant: "silent".to_owned(),
        condition: Condition::Personalized,
        trial: 0,
        signals,
    };
    let maxima = participant_max_amplitudes(&[&quiet], "emg", 3).unwrap();
    let b = segment(&quiet, &layout, "emg", &maxima).unwrap();
    assert_eq!(b.start_s, 0.0, "silence start moved to {}", b.start_s);
    assert_eq!(b.stop_s, duration, "silence stop moved to {}", b.stop_s);

    println!("criterion 08 PASS: {tight}/200 bursts contained within 150 ms per side; silence spans the full recording");
}

// ---------------------------------------------------------------------------
// 9. Envelope highpass attenuation
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_envelope_attenuation() {
    let highpass = design_butterworth(FilterKind::Highpass, 4, 40.0, 2000.0).unwrap();
    let pass = frequency_response(&highpass, 100.0);
    let stop = frequency_response(&highpass, 10.0);
    let attenuation_db = 20.0 * (pass / stop).log10();
    assert!(
        attenuation_db >= 40.0,
        "10 Hz is only {attenuation_db:.1} dB below 100 Hz (gate 40 dB)"
    );
    println!(
        "criterion 09 PASS: 4th-order 40 Hz highpass puts 10 Hz {attenuation_db:.1} dB below 100 Hz (gate 40 dB)"
    );
}

// ---------------------------------------------------------------------------
// 10. Latency budget
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_latency_budget() {
    let layout = BiosignalLayout::emg_imu();
    let config = RecognizerConfig::default();
    let report = bench_recognition(&layout, &config, 9, 100, 7).unwrap();
    assert!(
        report.warmed.mean_ms < 500.0,
        "warmed mean {:.2} ms breaches the 500 ms budget",
        report.warmed.mean_ms
    );
    println!(
        "criterion 10 PASS: 9 templates at c=88, n=64, nPC=50: warmed mean {:.2} ms (sd {:.2}) over {} runs (gate 500 ms)",
        report.warmed.mean_ms, report.warmed.sd_ms, report.warmed.recognitions
    );
}

// ---------------------------------------------------------------------------
// 11. Determinism of seeded commands
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_seeded_commands_are_byte_identical() {
    let bin = env!("CARGO_BIN_EXE_dollarb");
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();

    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin).args(args).output().unwrap();
        assert!(
            out.status.success(),
            "`dollarb {}` failed: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        );
    };

    // synth: the corpus files must match byte for byte.
    for target in ["a", "b"] {
        run(&[
            "synth", "--seed", "99", "--classes", "3", "--trials", "3",
            "--duration", "0.5", "--out", &path(target),
        ]);
    }
    for file in ["layout.json", "gestures.jsonl"] {
        assert_eq!(
            std::fs::read(dir.path().join("a").join(file)).unwrap(),
            std::fs::read(dir.path().join("b").join(file)).unwrap(),
            "synth runs with equal seeds disagree on {file}"
        );
    }

    // evaluate: the report must match byte for byte.
    for target in ["r1.json", "r2.json"] {
        run(&[
            "evaluate", "--protocol", "ud", "--dataset", &path("a"),
            "--T", "1,2", "--reps", "5", "--seed", "99",
            "--n", "32", "--npc", "20", "--out", &path(target),
        ]);
    }
    assert_eq!(
        std::fs::read(dir.path().join("r1.json")).unwrap(),
        std::fs::read(dir.path().join("r2.json")).unwrap(),
        "evaluate runs with equal seeds disagree"
    );

    println!("criterion 11 PASS: synth and evaluate (the seeded commands) reproduce byte-identical outputs");
}

// ---------------------------------------------------------------------------
// 12. Brute-force equivalence on tiny cases
// ---------------------------------------------------------------------------

/// A from-scratch rewrite of the four matching steps, sharing no code with
/// the library: plain-loop resampling and normalization, a classical
/// largest-pivot Jacobi eigensolver (the library sweeps cyclically), and
/// direct projection + L1 scoring.
mod straight_line {
    use dollarb::layout::{BiosignalLayout, RawGesture};

    fn lerp_resample(xs: &[f64], n: usize) -> Vec<f64> {
        let last = xs.len() - 1;
        (0..n)
            .map(|j| {
                let pos = j as f64 * last as f64 / (n - 1) as f64;
                let i = (pos as usize).min(last - 1);
                let w = pos - i as f64;
                xs[i] * (1.0 - w) + xs[i + 1] * w
            })
            .collect()
    }

    /// Resample, demean per channel, then divide each group's rows by the
    /// population std of the group's pooled demeaned samples.
    pub fn normalize(gesture: &RawGesture, layout: &BiosignalLayout, n: usize) -> Vec<Vec<f64>> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut spans = Vec::new();
        for group in &layout.groups {
            let start = rows.len();
            for channel in &gesture.signals[&group.name] {
                let r = lerp_resample(channel, n);
                let mean = r.iter().sum::<f64>() / n as f64;
                rows.push(r.iter().map(|v| v - mean).collect());
            }
            spans.push(start..rows.len());
        }
        for span in spans {
            let pooled: f64 = rows[span.clone()].iter().flatten().map(|v| v * v).sum();
            let count = rows[span.clone()].iter().map(Vec::len).sum::<usize>();
            let std = (pooled / count as f64).sqrt();
            if std > 0.0 {
                for row in &mut rows[span] {
                    for v in row {
                        *v /= std;
                    }
                }
            }
        }
        rows
    }

    /// Eigenvectors of a symmetric matrix, descending by eigenvalue, via
    /// classical Jacobi: zero the largest off-diagonal entry each step.
    fn eigenvectors_descending(mut a: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        let c = a.len();
        let mut v = vec![vec![0.0; c]; c];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        let scale: f64 = a
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        for _ in 0..100 * c * c {
            let (mut p, mut q, mut biggest) = (0, 1, 0.0);
            for i in 0..c {
                for j in i + 1..c {
                    if a[i][j].abs() > biggest {
                        biggest = a[i][j].abs();
                        p = i;
                        q = j;
                    }
                }
            }
            if biggest <= 1e-15 * scale {
                break;
            }
            let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
            let t = if theta == 0.0 {
                1.0
            } else {
                theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
            };
            let cos = 1.0 / (t * t + 1.0).sqrt();
            let sin = t * cos;
            for k in 0..c {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = cos * akp - sin * akq;
                a[k][q] = sin * akp + cos * akq;
            }
            for k in 0..c {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = cos * apk - sin * aqk;
                a[q][k] = sin * apk + cos * aqk;
            }
            for row in &mut v {
                let (vp, vq) = (row[p], row[q]);
                row[p] = cos * vp - sin * vq;
                row[q] = sin * vp + cos * vq;
            }
        }
        let mut order: Vec<usize> = (0..c).collect();
        order.sort_by(|&i, &j| a[j][j].partial_cmp(&a[i][i]).unwrap().then(i.cmp(&j)));
        order
            .into_iter()
            .map(|k| (0..c).map(|r| v[r][k]).collect())
            .collect()
    }

    /// The template's own basis: eigenvectors of `data . data^T / (n - 1)`.
    pub fn basis(data: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
        let c = data.len();
        let mut cov = vec![vec![0.0; c]; c];
        for i in 0..c {
            for j in 0..c {
                cov[i][j] =
                    data[i].iter().zip(&data[j]).map(|(x, y)| x * y).sum::<f64>() / (n - 1) as f64;
            }
        }
        eigenvectors_descending(cov)
    }

    /// Time-major flattening of the projection onto `basis`.
    pub fn latent(data: &[Vec<f64>], basis: &[Vec<f64>], n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n * basis.len());
        for t in 0..n {
            for u in basis {
                out.push(data.iter().zip(u).map(|(row, w)| row[t] * w).sum());
            }
        }
        out
    }

    pub fn l1(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }
}

#[test]
fn criterion_12_brute_force_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC0_0012);
    let mut worst_gap = 0.0f64;

    for case in 0..50 {
        // Tiny problems: at most 4 channels, at most 8 resampled points,
        // full-rank latent space (nPC = c).
        let layout = BiosignalLayout {
            groups: (0..rng.gen_range(1..=2))
                .map(|i| BiosignalGroup {
                    name: format!("g{i}"),
                    channels: rng.gen_range(1..=2),
                    sample_rate_hz: 100.0,
                })
                .collect(),
        };
        let c = layout.total_channels();
        let n = rng.gen_range(4..=8);
        let config = RecognizerConfig { n, npc: c };

        let count = rng.gen_range(3..=5);
        let templates: Vec<RawGesture> = (0..count)
            .map(|i| {
                let mut g = random_gesture(&mut rng, &layout, &format!("t{i}"), None);
                // Short recordings (5..=12 samples) stress the interpolation.
                for rows in g.signals.values_mut() {
                    let len = rng.gen_range(5..=12);
                    for row in rows {
                        row.truncate(len);
                    }
                }
                g
            })
            .collect();
        let candidate = {
            let mut g = random_gesture(&mut rng, &layout, "probe", None);
            g.participant = "q".into();
            g
        };

        let enrolled: Vec<LatentTemplate> = templates
            .iter()
            .map(|t| enroll(t, &layout, &config).unwrap())
            .collect();
        let library = recognize(&candidate, &enrolled, &layout, &config).unwrap();

        let probe = straight_line::normalize(&candidate, &layout, n);
        let brute: Vec<f64> = templates
            .iter()
            .map(|t| {
                let data = straight_line::normalize(t, &layout, n);
                let basis = straight_line::basis(&data, n);
                straight_line::l1(
                    &straight_line::latent(&probe, &basis, n),
                    &straight_line::latent(&data, &basis, n),
                )
            })
            .collect();

        assert_eq!(
            argsort(&library.distances),
            argsort(&brute),
            "case {case}: rankings diverge\n  library: {:?}\n  brute:   {:?}",
            library.distances,
            brute
        );
        assert_eq!(library.template_index, argsort(&brute)[0], "case {case}: argmin diverges");
        for (d, b) in library.distances.iter().zip(&brute) {
            worst_gap = worst_gap.max((d - b).abs() / b.abs().max(1e-12));
        }
    }
    println!(
        "criterion 12 PASS: 50/50 tiny cases rank identically to the straight-line rewrite (worst relative distance gap {worst_gap:.2e})"
    );
}
