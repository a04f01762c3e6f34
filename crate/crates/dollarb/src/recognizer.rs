//! The recognizer core: resample, normalize, per-template PCA, and latent
//! L1 matching.
//!
//! Enrollment turns one raw gesture into a template: every channel is
//! linearly resampled to `n` points, demeaned, jointly amplitude-normalized
//! per signal group, and the resulting `c x n` matrix is projected onto its
//! own top `nPC` principal directions. The projection matrix `U` is kept with
//! the template. Recognition resamples and normalizes a candidate once, then
//! projects it *into each template's space* and sums absolute differences
//! along the latent trajectory; the template with the smallest path distance
//! wins, ties resolving to the earliest template.

use serde::{Deserialize, Serialize};

use crate::layout::{BiosignalLayout, RawGesture};
use crate::linalg::symmetric_eigen;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Configuration and intermediate types
// ---------------------------------------------------------------------------

/// Recognizer parameters: `n` resampled points per channel and `npc`
/// retained principal components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecognizerConfig {
    pub n: usize,
    pub npc: usize,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        RecognizerConfig { n: 64, npc: 50 }
    }
}

impl RecognizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.npc == 0 {
            return Err(Error::InvalidArgument("npc must be at least 1".into()));
        }
        Ok(())
    }
}

/// A gesture after resampling and normalization: `c` channel rows of exactly
/// `n` samples, each row mean-zero, each group jointly scaled to unit
/// population standard deviation (all-flat groups stay all-zero).
#[derive(Clone, Debug, PartialEq)]
pub struct ProcessedGesture {
    pub n: usize,
    /// Channel rows stacked in layout order.
    pub data: Vec<Vec<f64>>,
}

impl ProcessedGesture {
    pub fn channels(&self) -> usize {
        self.data.len()
    }
}

/// Output of per-template PCA.
#[derive(Clone, Debug, PartialEq)]
pub struct Pca {
    /// Projection matrix, `c` rows of `npc` entries (`components[ch][k]` is
    /// channel `ch`'s weight in component `k`).
    pub components: Vec<Vec<f64>>,
    /// The gesture's own latent trajectory, flattened time-major: entry
    /// `t * npc + k` is component `k` at time step `t`.
    pub latent_points: Vec<f64>,
}

/// An enrolled template: its projection matrix and latent trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentTemplate {
    pub label: String,
    /// Projection matrix, row-major: `c` rows of `npc` entries.
    pub components: Vec<Vec<f64>>,
    /// Latent trajectory, flattened time-major (`n * npc` entries).
    pub points: Vec<f64>,
}

impl LatentTemplate {
    pub fn channels(&self) -> usize {
        self.components.len()
    }

    pub fn npc(&self) -> usize {
        self.components.first().map_or(0, Vec::len)
    }

    pub fn n(&self) -> usize {
        let npc = self.npc();
        if npc == 0 {
            0
        } else {
            self.points.len() / npc
        }
    }

    /// Structural consistency with a layout and recognizer configuration.
    pub fn validate(&self, layout: &BiosignalLayout, config: &RecognizerConfig) -> Result<()> {
        let c = layout.total_channels();
        if self.channels() != c {
            return Err(Error::InvalidArgument(format!(
                "template '{}' has {} channel rows, layout has {c}",
                self.label,
                self.channels()
            )));
        }
        if self.components.iter().any(|row| row.len() != config.npc) {
            return Err(Error::InvalidArgument(format!(
                "template '{}' was enrolled with a different npc than {}",
                self.label, config.npc
            )));
        }
        if self.points.len() != config.n * config.npc {
            return Err(Error::InvalidArgument(format!(
                "template '{}' has {} latent points, expected n*npc = {}",
                self.label,
                self.points.len(),
                config.n * config.npc
            )));
        }
        Ok(())
    }
}

/// Outcome of matching one candidate against a template set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecognitionResult {
    /// Label of the winning template.
    pub label: String,
    /// Index of the winning template (first minimum on ties).
    pub template_index: usize,
    /// Latent path distance to the winning template.
    pub distance: f64,
    /// Distance to every template, in template order.
    pub distances: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Step 1: resample
// ---------------------------------------------------------------------------

/// Piecewise-linear resampling of one channel onto `n` evenly spaced points
/// over the original index range `0..=N-1`.
///
/// Endpoints are reproduced exactly, and `n == N` is the identity.
pub fn resample_channel(points: &[f64], n: usize) -> Result<Vec<f64>> {
    let len = points.len();
    if len < 2 {
        return Err(Error::InvalidArgument(format!(
            "resampling needs at least 2 input samples, got {len}"
        )));
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "resampling needs at least 2 output samples, got {n}"
        )));
    }
    let mut out = Vec::with_capacity(n);
    let span = (len - 1) as f64;
    let steps = (n - 1) as f64;
    for j in 0..n {
        let t = (j as f64 * span) / steps;
        let idx = t.floor() as usize;
        let frac = t - idx as f64;
        if frac == 0.0 {
            // Hits a node (always true for j = 0 and j = n-1): copy exactly.
            out.push(points[idx]);
        } else {
            out.push(points[idx] + frac * (points[idx + 1] - points[idx]));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Step 2: normalize
// ---------------------------------------------------------------------------

/// Resample every channel to `config.n` points, demean each channel, and
/// jointly scale each group by the population standard deviation of its
/// concatenated demeaned samples. A group whose demeaned samples are all
/// zero is left untouched (no NaNs from flat input).
pub fn normalize(
    gesture: &RawGesture,
    layout: &BiosignalLayout,
    config: &RecognizerConfig,
) -> Result<ProcessedGesture> {
    config.validate()?;
    layout.validate()?;
    gesture.validate(layout)?;

    let n = config.n;
    let mut data: Vec<Vec<f64>> = Vec::with_capacity(layout.total_channels());
    for group in &layout.groups {
        let rows = gesture.group_signals(&group.name)?;
        let group_start = data.len();
        for row in rows {
            let mut resampled = resample_channel(row, n)?;
            if resampled.iter().all(|v| *v == resampled[0]) {
                // A constant channel demeans to exactly zero. Subtracting the
                // computed mean instead can leave a 1-ulp residue (the sum of
                // n equal values rounds), and when the whole group is flat the
                // joint scaling below would amplify that residue to O(1).
                resampled.fill(0.0);
            } else {
                let mean = resampled.iter().sum::<f64>() / n as f64;
                for v in &mut resampled {
                    *v -= mean;
                }
            }
            data.push(resampled);
        }

        // Joint amplitude normalization over the group's demeaned samples.
        let group_rows = &mut data[group_start..];
        let count = (group_rows.len() * n) as f64;
        let mean = group_rows.iter().flatten().sum::<f64>() / count;
        let var = group_rows
            .iter()
            .flatten()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / count;
        let std = var.sqrt();
        if std > 0.0 {
            for row in group_rows.iter_mut() {
                for v in row.iter_mut() {
                    *v /= std;
                }
            }
        }
    }
    Ok(ProcessedGesture { n, data })
}

// ---------------------------------------------------------------------------
// Step 3: per-template PCA
// ---------------------------------------------------------------------------

/// Channel covariance (`1/(n-1)` normalization) of the processed gesture,
/// eigendecomposed, with the top `npc` components retained and the gesture
/// projected onto them.
pub fn compute_pca(processed: &ProcessedGesture, npc: usize) -> Result<Pca> {
    let c = processed.channels();
    let n = processed.n;
    if npc == 0 || npc > c {
        return Err(Error::InvalidArgument(format!(
            "npc must be in 1..={c} (channel count), got {npc}"
        )));
    }

    let mut cov = vec![vec![0.0; c]; c];
    let denom = (n - 1) as f64;
    for i in 0..c {
        for j in i..c {
            let dot: f64 = processed.data[i]
                .iter()
                .zip(&processed.data[j])
                .map(|(a, b)| a * b)
                .sum();
            cov[i][j] = dot / denom;
            cov[j][i] = cov[i][j];
        }
    }

    let eigen = symmetric_eigen(&cov)?;
    let mut components = vec![vec![0.0; npc]; c];
    for (k, vector) in eigen.vectors.iter().take(npc).enumerate() {
        for ch in 0..c {
            components[ch][k] = vector[ch];
        }
    }
    let latent_points = project_flat(&processed.data, &components, n, npc);
    Ok(Pca {
        components,
        latent_points,
    })
}

/// Project `c x n` channel data through a `c x npc` projection matrix and
/// flatten the result time-major.
fn project_flat(data: &[Vec<f64>], components: &[Vec<f64>], n: usize, npc: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * npc];
    for (row, comp) in data.iter().zip(components) {
        for (t, &x) in row.iter().enumerate() {
            let base = t * npc;
            for k in 0..npc {
                out[base + k] += x * comp[k];
            }
        }
    }
    out
}

/// Latent path distance between the projection of `data` and a template's
/// stored points, computed without materializing the projected trajectory.
fn latent_distance(data: &[Vec<f64>], template: &LatentTemplate, n: usize, npc: usize) -> f64 {
    let mut row = vec![0.0; npc];
    let mut dist = 0.0;
    for t in 0..n {
        row.fill(0.0);
        for (channel, comp) in data.iter().zip(&template.components) {
            let x = channel[t];
            for k in 0..npc {
                row[k] += x * comp[k];
            }
        }
        let base = t * npc;
        for k in 0..npc {
            dist += (row[k] - template.points[base + k]).abs();
        }
    }
    dist
}

// ---------------------------------------------------------------------------
// Enrollment and recognition
// ---------------------------------------------------------------------------

/// Enroll one gesture as a template.
pub fn enroll(
    gesture: &RawGesture,
    layout: &BiosignalLayout,
    config: &RecognizerConfig,
) -> Result<LatentTemplate> {
    let processed = normalize(gesture, layout, config)?;
    let pca = compute_pca(&processed, config.npc)?;
    Ok(LatentTemplate {
        label: gesture.label.clone(),
        components: pca.components,
        points: pca.latent_points,
    })
}

/// Match a candidate against a template set.
///
/// The candidate is resampled and normalized once; each template then
/// projects it through its own `U` and scores the latent L1 path distance.
/// The smallest distance wins; on exact ties the earliest template does.
pub fn recognize(
    candidate: &RawGesture,
    templates: &[LatentTemplate],
    layout: &BiosignalLayout,
    config: &RecognizerConfig,
) -> Result<RecognitionResult> {
    for t in templates {
        t.validate(layout, config)?;
    }
    let processed = normalize(candidate, layout, config)?;
    let refs: Vec<&LatentTemplate> = templates.iter().collect();
    recognize_processed(&processed, &refs, config)
}

/// Match an already-normalized candidate against borrowed templates.
///
/// Bulk evaluation entry point: callers that score one candidate against
/// many template subsets (or many candidates against one cached enrollment)
/// normalize and validate up front and skip both here. Same matching rule
/// as [`recognize`]: smallest latent L1 distance, earliest template on ties.
pub fn recognize_processed(
    processed: &ProcessedGesture,
    templates: &[&LatentTemplate],
    config: &RecognizerConfig,
) -> Result<RecognitionResult> {
    let distances: Vec<f64> = templates
        .iter()
        .map(|t| template_distance(processed, t, config))
        .collect();
    let best = best_index(&distances).ok_or_else(|| {
        Error::InsufficientData("no templates to recognize against".into())
    })?;

    Ok(RecognitionResult {
        label: templates[best].label.clone(),
        template_index: best,
        distance: distances[best],
        distances,
    })
}

/// Latent L1 distance between a normalized candidate and one template:
/// project the candidate through the template's components and compare
/// against the template's own latent points.
pub fn template_distance(
    processed: &ProcessedGesture,
    template: &LatentTemplate,
    config: &RecognizerConfig,
) -> f64 {
    latent_distance(&processed.data, template, config.n, config.npc)
}

/// Index of the smallest distance; on exact ties the earliest index wins.
/// `None` for an empty slice. This is the one matching rule every caller
/// shares, so cached-distance evaluation cannot drift from `recognize`.
pub fn best_index(distances: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &d) in distances.iter().enumerate() {
        if best.is_none_or(|b| d < distances[b]) {
            best = Some(i);
        }
    }
    best
}

/// L1 distance between two flattened latent trajectories of equal length.
pub fn path_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "latent trajectories differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum())
}

// ---------------------------------------------------------------------------
