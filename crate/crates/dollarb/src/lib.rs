//! Template-based gesture recognition for multi-rate biosignal recordings.
//!
//! The crate implements a $-family recognizer for gestures captured as
//! parallel EMG and IMU channel groups, together with everything needed to
//! exercise it end to end:
//!
//! ```text
//!   raw recording (c channels, mixed rates)
//!        |  segmentation        activity bounds from rectified EMG
//!        |  dsp                 EMG linear envelope (highpass, rectify,
//!        |                      lowpass, moving-average downsample)
//!        v
//!   resample -> normalize       every channel to n points, joint per-group
//!        |                      amplitude normalization
//!        v
//!   per-template PCA            c x nPC projection enrolled per template
//!        |
//!        v
//!   latent L1 matching          candidate projected into each template's
//!                               space; smallest path distance wins
//! ```
//!
//! [`synthgen`] builds deterministic synthetic corpora, [`eval`] runs the
//! user-dependent / articulation-variability / user-independent protocols,
//! and [`dataset`] + [`store`] define the on-disk formats.

pub mod dataset;
pub mod dsp;
pub mod eval;
pub mod layout;
pub mod linalg;
pub mod segmentation;
pub mod store;
pub mod recognizer;
pub mod synthgen;
pub(crate) mod streams;

mod error;

pub use error::{Error, Result};
