//! Recording layout and raw gesture records.
//!
//! A recording session captures several *groups* of channels, each group
//! sharing one native sample rate (e.g. 16 EMG electrodes at 2000 Hz next to
//! 72 IMU axes at 148 Hz). The layout pins the group order, which in turn
//! fixes how channels concatenate into the recognizer's `c x n` matrix.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Layout
// ---------------------------------------------------------------------------

/// One homogeneous block of channels sharing a sample rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiosignalGroup {
    /// Group name, unique within a layout (`"emg"`, `"imu"`, ...).
    pub name: String,
    /// Number of channels in the group.
    pub channels: usize,
    /// Native sample rate of every channel in the group.
    pub sample_rate_hz: f64,
}

/// Ordered set of signal groups describing one apparatus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiosignalLayout {
    pub groups: Vec<BiosignalGroup>,
}

impl BiosignalLayout {
    /// A forearm-band layout: 16 EMG channels at 2000 Hz plus 12 inertial
    /// sensors x 6 axes = 72 IMU channels at 148 Hz (88 channels total).
    pub fn emg_imu() -> Self {
        BiosignalLayout {
            groups: vec![
                BiosignalGroup {
                    name: "emg".to_owned(),
                    channels: 16,
                    sample_rate_hz: 2000.0,
                },
                BiosignalGroup {
                    name: "imu".to_owned(),
                    channels: 72,
                    sample_rate_hz: 148.0,
                },
            ],
        }
    }

    /// Total channel count across all groups (the recognizer's `c`).
    pub fn total_channels(&self) -> usize {
        self.groups.iter().map(|g| g.channels).sum()
    }

    /// Look a group up by name.
    pub fn group(&self, name: &str) -> Option<&BiosignalGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Row range each group occupies once channels are stacked in layout
    /// order (group i covers `spans[i]` of the `c` concatenated rows).
    pub fn group_spans(&self) -> Vec<std::ops::Range<usize>> {
        let mut spans = Vec::with_capacity(self.groups.len());
        let mut start = 0;
        for g in &self.groups {
            spans.push(start..start + g.channels);
            start += g.channels;
        }
        spans
    }

    /// Reject empty, duplicated, or physically meaningless layouts.
    pub fn validate(&self) -> Result<()> {
        if self.groups.is_empty() {
            return Err(Error::InvalidLayout("layout declares no groups".into()));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if g.name.is_empty() {
                return Err(Error::InvalidLayout(format!("group {i} has an empty name")));
            }
            if g.channels == 0 {
                return Err(Error::InvalidLayout(format!(
                    "group '{}' declares zero channels",
                    g.name
                )));
            }
            if !g.sample_rate_hz.is_finite() || g.sample_rate_hz <= 0.0 {
                return Err(Error::InvalidLayout(format!(
                    "group '{}' has a non-positive sample rate",
                    g.name
                )));
            }
            if self.groups[..i].iter().any(|prev| prev.name == g.name) {
                return Err(Error::InvalidLayout(format!(
                    "duplicate group name '{}'",
                    g.name
                )));
            }
        }
        Ok(())
    }

    /// Parse a layout from JSON text and validate it.
    pub fn from_json_str(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Hex SHA-256 of the canonical JSON encoding; used to tie template
    /// stores to the layout they were enrolled under.
    pub fn content_hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("layout serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            use std::fmt::Write;
            let _ = write!(hex, "{byte:02x}");
        }
        hex
    }
}

// ---------------------------------------------------------------------------
// Gestures
// ---------------------------------------------------------------------------

/// Recording condition a gesture was captured under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    /// Participant's own articulation, used for enrollment and matching.
    Personalized,
    /// Re-articulated at a different time (amplitude drift, fresh noise).
    VariationTime,
    /// Articulated faster or slower (different sample count, same shape).
    VariationSpeed,
    /// Articulated larger or smaller (scaled amplitude).
    VariationSize,
    /// Shared vocabulary articulated the same way by every participant.
    Standardized,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Personalized,
        Condition::VariationTime,
        Condition::VariationSpeed,
        Condition::VariationSize,
        Condition::Standardized,
    ];

    /// The wire name (`"personalized"`, `"variation_time"`, ...).
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::Personalized => "personalized",
            Condition::VariationTime => "variation_time",
            Condition::VariationSpeed => "variation_speed",
            Condition::VariationSize => "variation_size",
            Condition::Standardized => "standardized",
        }
    }
}

/// One recorded gesture: raw channel data per group, plus identity metadata.
///
/// Channel counts must match the layout, but the sample count per group is
/// free (movement speed changes how many samples a gesture spans), as long as
/// every channel inside one group has the same length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawGesture {
    /// Gesture class label.
    pub label: String,
    /// Participant identifier.
    pub participant: String,
    pub condition: Condition,
    /// Trial index within (participant, label, condition).
    pub trial: u32,
    /// Channel data keyed by group name; each entry holds `channels` rows of
    /// equal length.
    pub signals: BTreeMap<String, Vec<Vec<f64>>>,
}

impl RawGesture {
    /// Channel rows for one group.
    pub fn group_signals(&self, name: &str) -> Result<&[Vec<f64>]> {
        self.signals
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidGesture(format!("gesture has no group '{name}'")))
    }

    /// Wall-clock length of the recording: the longest group duration.
    pub fn duration_s(&self, layout: &BiosignalLayout) -> f64 {
        layout
            .groups
            .iter()
            .filter_map(|g| {
                let rows = self.signals.get(&g.name)?;
                let n = rows.first().map_or(0, Vec::len);
                Some(n as f64 / g.sample_rate_hz)
            })
            .fold(0.0, f64::max)
    }

    /// Check this gesture against a layout: every group present with the
    /// declared channel count, equal channel lengths of at least 2 samples,
    /// and all samples finite.
    pub fn validate(&self, layout: &BiosignalLayout) -> Result<()> {
        self.validate_inner(layout).map_err(Error::InvalidGesture)
    }

    fn validate_inner(&self, layout: &BiosignalLayout) -> std::result::Result<(), String> {
        for key in self.signals.keys() {
            if layout.group(key).is_none() {
                return Err(format!("group '{key}' is not in the layout"));
            }
        }
        for group in &layout.groups {
            let rows = self
                .signals
                .get(&group.name)
                .ok_or_else(|| format!("missing group '{}'", group.name))?;
            if rows.len() != group.channels {
                return Err(format!(
                    "channel-count mismatch in group '{}': layout declares {}, gesture has {}",
                    group.name,
                    group.channels,
                    rows.len()
                ));
            }
            let n = rows[0].len();
            if n < 2 {
                return Err(format!(
                    "group '{}' needs at least 2 samples per channel, got {n}",
                    group.name
                ));
            }
            for (c, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(format!(
                        "unequal channel lengths in group '{}': channel 0 has {n}, channel {c} has {}",
                        group.name,
                        row.len()
                    ));
                }
                if let Some(i) = row.iter().position(|v| !v.is_finite()) {
                    return Err(format!(
                        "non-finite sample in group '{}', channel {c}, index {i}",
                        group.name
                    ));
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
