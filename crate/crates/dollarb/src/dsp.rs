//! Causal DSP front end: Butterworth IIR filters, rectification, windowed
//! reductions, and the EMG linear envelope.
//!
//! Filters are designed from the analog Butterworth prototype via the
//! bilinear transform with frequency pre-warping and stored as a cascade of
//! second-order sections, which keeps high orders numerically tame. All
//! filtering is forward-only (no zero-phase tricks), matching an online
//! pipeline.

use num_complex::Complex64;

use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Filter design
// ---------------------------------------------------------------------------

/// Filter passband shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterKind {
    Lowpass,
    Highpass,
}

/// One second-order section, normalized so the leading denominator
/// coefficient is 1: `H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiquadSection {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

/// A designed filter: `order/2` biquad sections applied in series.
#[derive(Clone, Debug, PartialEq)]
pub struct BiquadCascade {
    pub kind: FilterKind,
    pub order: usize,
    pub cutoff_hz: f64,
    pub sample_rate_hz: f64,
    pub sections: Vec<BiquadSection>,
}

/// Design a Butterworth lowpass/highpass of even order 2..=8.
///
/// The analog prototype pole pairs give per-section damping factors
/// `2 sin((2k+1) pi / (2 order))`; the bilinear transform with cutoff
/// pre-warped to `tan(pi fc / fs)` maps each analog section to a biquad.
/// The design is exact at the band edge: lowpass DC gain and highpass
/// Nyquist gain are 1, and the magnitude at `cutoff_hz` is `1/sqrt(2)`.
pub fn design_butterworth(
    kind: FilterKind,
    order: usize,
    cutoff_hz: f64,
    sample_rate_hz: f64,
) -> Result<BiquadCascade> {
    if !matches!(order, 2 | 4 | 6 | 8) {
        return Err(Error::InvalidArgument(format!(
            "filter order must be one of 2, 4, 6, 8, got {order}"
        )));
    }
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sample rate must be positive, got {sample_rate_hz}"
        )));
    }
    if !cutoff_hz.is_finite() || cutoff_hz <= 0.0 || cutoff_hz >= sample_rate_hz / 2.0 {
        return Err(Error::InvalidArgument(format!(
            "cutoff must satisfy 0 < fc < fs/2, got fc={cutoff_hz} at fs={sample_rate_hz}"
        )));
    }

    let wc = (std::f64::consts::PI * cutoff_hz / sample_rate_hz).tan();
    let wc2 = wc * wc;
    let mut sections = Vec::with_capacity(order / 2);
    for k in 0..order / 2 {
        // Damping of the k-th conjugate pole pair of the analog prototype.
        let damp = 2.0 * (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * order) as f64).sin();
        let k0 = 1.0 + damp * wc + wc2;
        let (b0, b1, b2) = match kind {
            FilterKind::Lowpass => (wc2 / k0, 2.0 * wc2 / k0, wc2 / k0),
            FilterKind::Highpass => (1.0 / k0, -2.0 / k0, 1.0 / k0),
        };
        sections.push(BiquadSection {
            b0,
            b1,
            b2,
            a1: 2.0 * (wc2 - 1.0) / k0,
            a2: (1.0 - damp * wc + wc2) / k0,
        });
    }
    Ok(BiquadCascade {
        kind,
        order,
        cutoff_hz,
        sample_rate_hz,
        sections,
    })
}

/// Magnitude of the cascade's frequency response at `freq_hz`.
pub fn frequency_response(cascade: &BiquadCascade, freq_hz: f64) -> f64 {
    let omega = 2.0 * std::f64::consts::PI * freq_hz / cascade.sample_rate_hz;
    let z1 = Complex64::from_polar(1.0, -omega); // z^-1
    let z2 = z1 * z1;
    cascade
        .sections
        .iter()
        .map(|s| {
            let num = Complex64::new(s.b0, 0.0) + s.b1 * z1 + s.b2 * z2;
            let den = Complex64::new(1.0, 0.0) + s.a1 * z1 + s.a2 * z2;
            (num / den).norm()
        })
        .product()
}

// ---------------------------------------------------------------------------
// Filtering and sample-wise ops
// ---------------------------------------------------------------------------

/// Run the cascade causally over `signal` (direct form II transposed, zero
/// initial state). An empty signal yields an empty output.
pub fn filter_forward(cascade: &BiquadCascade, signal: &[f64]) -> Vec<f64> {
    let mut data = signal.to_vec();
    for s in &cascade.sections {
        let (mut s1, mut s2) = (0.0, 0.0);
        for x in data.iter_mut() {
            let y = s.b0 * *x + s1;
            s1 = s.b1 * *x - s.a1 * y + s2;
            s2 = s.b2 * *x - s.a2 * y;
            *x = y;
        }
    }
    data
}

/// Full-wave rectification: element-wise absolute value.
pub fn rectify(signal: &[f64]) -> Vec<f64> {
    signal.iter().map(|v| v.abs()).collect()
}

fn check_windowing(len: usize, window: usize, hop: usize) -> Result<()> {
    if window == 0 || hop == 0 {
        return Err(Error::InvalidArgument(
            "window and hop must be positive".into(),
        ));
    }
    if hop > window {
        return Err(Error::InvalidArgument(format!(
            "hop ({hop}) must not exceed window ({window})"
        )));
    }
    if window > len {
        return Err(Error::InvalidArgument(format!(
            "window ({window}) exceeds signal length ({len})"
        )));
    }
    Ok(())
}

/// Mean over sliding windows of `window` samples advancing by `hop`.
///
/// Only windows lying fully inside the signal are emitted, so the output has
/// `floor((len - window) / hop) + 1` samples.
pub fn moving_average_downsample(signal: &[f64], window: usize, hop: usize) -> Result<Vec<f64>> {
    check_windowing(signal.len(), window, hop)?;
    let count = (signal.len() - window) / hop + 1;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let chunk = &signal[k * hop..k * hop + window];
        out.push(chunk.iter().sum::<f64>() / window as f64);
    }
    Ok(out)
}

/// Root-mean-square over sliding windows; same windowing convention as
/// [`moving_average_downsample`].
pub fn rms_windows(signal: &[f64], window: usize, hop: usize) -> Result<Vec<f64>> {
    check_windowing(signal.len(), window, hop)?;
    let count = (signal.len() - window) / hop + 1;
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        let chunk = &signal[k * hop..k * hop + window];
        let mean_sq = chunk.iter().map(|v| v * v).sum::<f64>() / window as f64;
        out.push(mean_sq.sqrt());
    }
    Ok(out)
}

/// First difference: `out[i] = signal[i+1] - signal[i]` (length `len - 1`).
pub fn diff(signal: &[f64]) -> Result<Vec<f64>> {
    if signal.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "diff needs at least 2 samples, got {}",
            signal.len()
        )));
    }
    Ok(signal.windows(2).map(|w| w[1] - w[0]).collect())
}

// ---------------------------------------------------------------------------
// EMG linear envelope
// ---------------------------------------------------------------------------

/// Linear envelope of one raw EMG channel.
///
/// 4th-order 40 Hz highpass (motion-artifact removal), full-wave
/// rectification, 4th-order 40 Hz lowpass, then a moving-average
/// downsample over 100 ms windows hopping 50 ms. At 2000 Hz this lands on a
/// 20 Hz envelope (window 200, hop 100).
pub fn emg_linear_envelope(signal: &[f64], sample_rate_hz: f64) -> Result<Vec<f64>> {
    let highpass = design_butterworth(FilterKind::Highpass, 4, 40.0, sample_rate_hz)?;
    let lowpass = design_butterworth(FilterKind::Lowpass, 4, 40.0, sample_rate_hz)?;
    let window = envelope_window(sample_rate_hz);
    let hop = envelope_hop(sample_rate_hz);
    let smoothed = filter_forward(&lowpass, &rectify(&filter_forward(&highpass, signal)));
    moving_average_downsample(&smoothed, window, hop)
}

/// Envelope window length in samples: 100 ms at the given rate.
pub fn envelope_window(sample_rate_hz: f64) -> usize {
    (0.100 * sample_rate_hz).round().max(1.0) as usize
}

/// Envelope hop length in samples: 50 ms at the given rate.
pub fn envelope_hop(sample_rate_hz: f64) -> usize {
    (0.050 * sample_rate_hz).round().max(1.0) as usize
}

// ---------------------------------------------------------------------------
