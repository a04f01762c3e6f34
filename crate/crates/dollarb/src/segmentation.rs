//! Activity segmentation: find where a gesture actually happens inside a
//! padded recording, using only the rectified EMG.
//!
//! The detector runs per channel on an RMS trace (100 ms windows, 50 ms hop)
//! of the rectified raw EMG, collects a family of cheap heuristic cutoff
//! candidates (steepest rise/fall, amplitude thresholds, recording edges, and
//! slope candidates restricted by the threshold crossings), throws away
//! candidates in implausible regions, and then resolves conservatively: the
//! earliest start and the latest stop win. A recording with no usable
//! candidates degrades to its full extent rather than failing.

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::dsp::{diff, rectify, rms_windows};
use crate::layout::{BiosignalLayout, RawGesture};
use crate::{Error, Result};

/// Detected activity bounds, in seconds from the start of the recording.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentBounds {
    pub start_s: f64,
    pub stop_s: f64,
}

/// Start/stop cutoff candidates on one RMS trace, as RMS sample indices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutoffCandidates {
    pub starts: Vec<usize>,
    pub stops: Vec<usize>,
}

// ---------------------------------------------------------------------------
// Channel selection
// ---------------------------------------------------------------------------

fn population_variance(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Indices of the channels worth segmenting on: the union of the 3 channels
/// with the highest participant-wide rectified amplitude and the 3 with the
/// highest variance within this gesture, minus any channel whose variance
/// falls below 10% of the gesture's maximum channel variance.
///
/// Ranking ties resolve to the lowest channel index; the result is sorted
/// ascending and never empty (the maximum-variance channel always survives).
pub fn select_relevant_channels(
    emg_abs: &[Vec<f64>],
    participant_max_amplitudes: &[f64],
) -> Result<Vec<usize>> {
    if emg_abs.is_empty() {
        return Err(Error::InvalidArgument(
            "channel selection needs at least one channel".into(),
        ));
    }
    if participant_max_amplitudes.len() != emg_abs.len() {
        return Err(Error::InvalidArgument(format!(
            "participant amplitude vector has {} entries for {} channels",
            participant_max_amplitudes.len(),
            emg_abs.len()
        )));
    }

    let variances: Vec<f64> = emg_abs.iter().map(|ch| population_variance(ch)).collect();
    let top3 = |scores: &[f64]| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..scores.len()).collect();
        // Stable sort: equal scores keep ascending index order.
        idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
        idx.truncate(3);
        idx
    };

    let mut selected: Vec<usize> = top3(participant_max_amplitudes);
    for ch in top3(&variances) {
        if !selected.contains(&ch) {
            selected.push(ch);
        }
    }
    let max_var = variances.iter().cloned().fold(0.0, f64::max);
    selected.retain(|&ch| variances[ch] >= 0.1 * max_var);
    selected.sort_unstable();
    Ok(selected)
}

/// Per-channel maximum rectified amplitude across all of a participant's
/// recordings; this is the cross-gesture half of the channel ranking.
pub fn participant_max_amplitudes(
    gestures: &[&RawGesture],
    emg_group: &str,
    channels: usize,
) -> Result<Vec<f64>> {
    if gestures.is_empty() {
        return Err(Error::InsufficientData(
            "participant amplitudes need at least one gesture".into(),
        ));
    }
    let mut maxima = vec![0.0_f64; channels];
    for g in gestures {
        let rows = g.group_signals(emg_group)?;
        if rows.len() != channels {
            return Err(Error::InvalidGesture(format!(
                "channel-count mismatch in group '{emg_group}': expected {channels}, got {}",
                rows.len()
            )));
        }
        for (ch, row) in rows.iter().enumerate() {
            for v in row {
                maxima[ch] = maxima[ch].max(v.abs());
            }
        }
    }
    Ok(maxima)
}

// ---------------------------------------------------------------------------
// Cutoff heuristics on one RMS trace
// ---------------------------------------------------------------------------

fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

fn threshold_value(channel: &[f64], fraction: f64) -> f64 {
    let min = channel.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = channel.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    fraction * (max - min) + min
}

/// Threshold crossings at `fraction` of the amplitude range: the start is
/// the first sample that rises to/above the threshold after being below it,
/// the stop is the last sample that falls below after being at/above it.
/// Either side may be absent (no such crossing).
pub fn threshold_cutoffs(channel: &[f64], fraction: f64) -> (Option<usize>, Option<usize>) {
    let t = threshold_value(channel, fraction);
    let below: Vec<bool> = channel.iter().map(|v| *v < t).collect();
    let mut start = None;
    let mut stop = None;
    for i in 1..below.len() {
        if below[i - 1] && !below[i] && start.is_none() {
            start = Some(i);
        }
        if !below[i - 1] && below[i] {
            stop = Some(i);
        }
    }
    (start, stop)
}

/// Edge detection at `fraction` of the amplitude range: a recording that is
/// already above threshold at its first (last) sample yields a start (stop)
/// at that edge. Catches bursts clipped by the recording window.
pub fn edge_cutoffs(channel: &[f64], fraction: f64) -> (Option<usize>, Option<usize>) {
    let t = threshold_value(channel, fraction);
    let start = (channel[0] > t).then_some(0);
    let stop = (channel[channel.len() - 1] > t).then_some(channel.len() - 1);
    (start, stop)
}

/// All heuristic cutoff candidates for one RMS trace (needs >= 4 samples).
///
/// Starts: the steepest rise (argmax of the first difference), the rising
/// 0.3 threshold crossing, the leading edge, and crossing-restricted slope
/// variants of the first and second differences. Stops mirror the starts
/// (the steepest-fall candidate sits one sample past its argmin, and both
/// second-difference kinks sit one sample past their extremum, at the middle
/// of their support); the stop-side restricted variants anchor at the
/// falling 0.3 and 0.15 crossings. The 0.15 crossing itself is never a
/// candidate — it only anchors its variant.
///
/// A restricted variant is the slope landmark admitted only on the outer
/// side of its crossing: the landmark when it is more conservative than the
/// crossing (earlier for starts, later for stops), the crossing otherwise.
/// It can widen the crossing's cut, never narrow it — and unlike a raw
/// search of the region beyond the crossing, it never ranks the flat noise
/// tail of a well-padded recording.
pub fn candidate_cutoffs(channel: &[f64]) -> Result<CutoffCandidates> {
    if channel.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "cutoff detection needs at least 4 RMS samples, got {}",
            channel.len()
        )));
    }
    let dc = diff(channel)?;
    let d2c = diff(&dc)?;

    let rise = argmax_first(&dc);
    let fall = argmin_first(&dc) + 1;
    // A second difference at index i spans RMS samples i..=i+2; both kinks
    // anchor at the middle of that support (i + 1). Anchoring the start-side
    // kink at i instead would claim the onset a full window earlier than the
    // curvature evidence places it, and that one candidate would dominate
    // the conservative min over candidates on every sharp onset.
    let kink_up = argmax_first(&d2c) + 1;
    let kink_down = argmin_first(&d2c) + 1;

    let mut out = CutoffCandidates::default();
    out.starts.push(rise);
    out.stops.push(fall);

    let (start_below_1, stop_below_1) = threshold_cutoffs(channel, 0.3);
    let (_, stop_below_2) = threshold_cutoffs(channel, 0.15);
    let (edge_start, edge_stop) = edge_cutoffs(channel, 0.3);
    out.starts.extend(start_below_1);
    out.starts.extend(edge_start);
    out.stops.extend(stop_below_1);
    out.stops.extend(edge_stop);

    if let Some(sb) = start_below_1 {
        // Both first-difference start variants anchor at the same crossing
        // (their stop-side counterparts differ in threshold), so the same
        // candidate is recorded twice; min-resolution makes that harmless.
        out.starts.push(rise.min(sb));
        out.starts.push(rise.min(sb));
        out.starts.push(kink_up.min(sb));
    }
    if let Some(pb) = stop_below_1 {
        out.stops.push(fall.max(pb));
        out.stops.push(kink_down.max(pb));
    }
    if let Some(pb) = stop_below_2 {
        out.stops.push(fall.max(pb));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Whole-gesture segmentation
// ---------------------------------------------------------------------------

fn rms_window_samples(rate_hz: f64) -> usize {
    (0.100 * rate_hz).round().max(1.0) as usize
}

fn rms_hop_samples(rate_hz: f64) -> usize {
    (0.050 * rate_hz).round().max(1.0) as usize
}

/// Detect activity bounds for one gesture from its rectified EMG group.
///
/// `participant_max_amplitudes` carries per-channel rectified maxima across
/// the participant's recordings (see [`participant_max_amplitudes`]). The
/// result always satisfies `0 <= start < stop <= duration`; if no usable
/// candidate survives, the bounds cover the full recording.
pub fn segment(
    gesture: &RawGesture,
    layout: &BiosignalLayout,
    emg_group: &str,
    participant_max: &[f64],
) -> Result<SegmentBounds> {
    let group = layout.group(emg_group).ok_or_else(|| {
        Error::InvalidArgument(format!("layout has no group named '{emg_group}'"))
    })?;
    let rows = gesture.group_signals(emg_group)?;
    let duration = gesture.duration_s(layout);

    let abs_rows: Vec<Vec<f64>> = rows.iter().map(|r| rectify(r)).collect();
    let relevant = select_relevant_channels(&abs_rows, participant_max)?;

    let rate = group.sample_rate_hz;
    let window = rms_window_samples(rate);
    let hop = rms_hop_samples(rate);

    let mut starts: Vec<f64> = Vec::new();
    let mut stops: Vec<f64> = Vec::new();
    for &ch in &relevant {
        if abs_rows[ch].len() < window {
            continue;
        }
        let rms = rms_windows(&abs_rows[ch], window, hop)?;
        if rms.len() < 4 {
            continue;
        }
        let cands = candidate_cutoffs(&rms)?;
        let last = rms.len() - 1;
        for idx in cands.starts {
            // A start in the final third of the trace is noise, not onset.
            if 3 * idx > 2 * last {
                continue;
            }
            starts.push((idx * hop) as f64 / rate);
        }
        for idx in cands.stops {
            // A stop in the first third of the trace is equally implausible.
            if 3 * idx < last {
                continue;
            }
            stops.push(((idx * hop + window) as f64 / rate).min(duration));
        }
    }

    // Conservative resolution: earliest start, latest stop; absent sides
    // fall back to the recording edges.
    let start_s = starts.iter().cloned().fold(f64::INFINITY, f64::min);
    let stop_s = stops.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let (start_s, stop_s) = if start_s.is_finite() && stop_s.is_finite() {
        (start_s, stop_s)
    } else {
        (
            if start_s.is_finite() { start_s } else { 0.0 },
            if stop_s.is_finite() { stop_s } else { duration },
        )
    };
    if start_s < stop_s {
        Ok(SegmentBounds { start_s, stop_s })
    } else {
        Ok(SegmentBounds {
            start_s: 0.0,
            stop_s: duration,
        })
    }
}

/// Segment every gesture of a dataset, computing each participant's
/// amplitude profile from their own recordings. Bounds come back aligned
/// with `dataset.gestures`.
pub fn segment_dataset(dataset: &Dataset, emg_group: &str) -> Result<Vec<SegmentBounds>> {
    let group = dataset.layout.group(emg_group).ok_or_else(|| {
        Error::InvalidArgument(format!("layout has no group named '{emg_group}'"))
    })?;
    let channels = group.channels;

    let mut bounds = vec![
        SegmentBounds {
            start_s: 0.0,
            stop_s: 0.0
        };
        dataset.gestures.len()
    ];
    for participant in dataset.participants() {
        let indices = dataset.select(|g| g.participant == participant);
        let refs: Vec<&RawGesture> = indices.iter().map(|&i| &dataset.gestures[i]).collect();
        let maxima = participant_max_amplitudes(&refs, emg_group, channels)?;
        for &i in &indices {
            bounds[i] = segment(&dataset.gestures[i], &dataset.layout, emg_group, &maxima)?;
        }
    }
    Ok(bounds)
}

/// Cut a gesture down to the detected bounds, slicing every group at its own
/// sample rate (start index floors, stop index ceils, so the cut never lands
/// more than one sample period inside the requested bounds). Each group
/// keeps at least 2 samples.
pub fn crop_gesture(
    gesture: &RawGesture,
    layout: &BiosignalLayout,
    bounds: &SegmentBounds,
) -> Result<RawGesture> {
    let mut cropped = gesture.clone();
    for group in &layout.groups {
        let rows = gesture.group_signals(&group.name)?;
        let n = rows[0].len();
        let rate = group.sample_rate_hz;
        let mut start = (bounds.start_s * rate).floor() as usize;
        let mut stop = ((bounds.stop_s * rate).ceil() as usize).min(n);
        if start + 2 > stop {
            // Degenerate window for this rate: widen minimally.
            stop = (start + 2).min(n);
            start = stop.saturating_sub(2);
        }
        let new_rows: Vec<Vec<f64>> = rows.iter().map(|r| r[start..stop].to_vec()).collect();
        cropped.signals.insert(group.name.clone(), new_rows);
    }
    Ok(cropped)
}

// ---------------------------------------------------------------------------
