//! Dataset directories: `layout.json` plus gesture records in `.jsonl` files.
//!
//! A dataset directory holds exactly one `layout.json` and any number of
//! `*.jsonl` files, each line one JSON gesture record. Loading walks the
//! `.jsonl` files in lexicographic name order and keeps line order within
//! each file, so a dataset always loads into the same gesture sequence.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::layout::{BiosignalLayout, RawGesture};
use crate::{Error, Result};

/// An in-memory dataset: the layout plus every gesture, already validated.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub layout: BiosignalLayout,
    pub gestures: Vec<RawGesture>,
}

impl Dataset {
    pub fn new(layout: BiosignalLayout, gestures: Vec<RawGesture>) -> Self {
        Dataset { layout, gestures }
    }

    /// Gestures matching a predicate, as indices into `self.gestures`.
    pub fn select<F: Fn(&RawGesture) -> bool>(&self, pred: F) -> Vec<usize> {
        (0..self.gestures.len())
            .filter(|&i| pred(&self.gestures[i]))
            .collect()
    }

    /// Distinct participant names in first-appearance order.
    pub fn participants(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for g in &self.gestures {
            if !out.iter().any(|p| *p == g.participant) {
                out.push(g.participant.clone());
            }
        }
        out
    }

    /// Distinct class labels in first-appearance order.
    pub fn labels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for g in &self.gestures {
            if !out.iter().any(|l| *l == g.label) {
                out.push(g.label.clone());
            }
        }
        out
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parse one `.jsonl` line into a gesture record (no layout validation).
pub fn parse_gesture_line(line: &str) -> std::result::Result<RawGesture, serde_json::Error> {
    serde_json::from_str(line)
}

/// Load `dir/layout.json` and every gesture from `dir/*.jsonl`.
///
/// Every record is validated against the layout; errors name the offending
/// file and line. File order is lexicographic by file name, and gestures keep
/// their line order within each file.
pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let layout_path = dir.join("layout.json");
    let layout_text = fs::read_to_string(&layout_path).map_err(|e| io_err(&layout_path, e))?;
    let layout = BiosignalLayout::from_json_str(&layout_text).map_err(|e| Error::Json {
        path: layout_path.clone(),
        source: e,
    })?;
    layout.validate()?;

    let mut jsonl_paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| io_err(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "jsonl"))
        .collect();
    jsonl_paths.sort();

    let mut gestures = Vec::new();
    for path in &jsonl_paths {
        let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
        for (idx, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| io_err(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let record = |message: String| Error::Record {
                path: path.clone(),
                line: idx + 1,
                message,
            };
            let gesture =
                parse_gesture_line(&line).map_err(|e| record(format!("malformed record: {e}")))?;
            gesture
                .validate(&layout)
                .map_err(|e| record(e.to_string()))?;
            gestures.push(gesture);
        }
    }
    Ok(Dataset { layout, gestures })
}

/// Write a dataset directory: `layout.json` plus one `gestures.jsonl`.
///
/// The whole dataset is validated before anything touches the disk, so a bad
/// record (e.g. a NaN sample) leaves no partial output behind. Numbers are
/// serialized with full round-trip precision: loading the directory back
/// yields bit-identical samples.
pub fn save_dataset(dir: &Path, dataset: &Dataset) -> Result<()> {
    dataset.layout.validate()?;
    for (i, g) in dataset.gestures.iter().enumerate() {
        g.validate(&dataset.layout)
            .map_err(|e| Error::InvalidGesture(format!("gesture {i}: {e}")))?;
    }

    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let layout_path = dir.join("layout.json");
    let layout_json =
        serde_json::to_string_pretty(&dataset.layout).expect("layout serializes");
    fs::write(&layout_path, layout_json + "\n").map_err(|e| io_err(&layout_path, e))?;

    let jsonl_path = dir.join("gestures.jsonl");
    let file = fs::File::create(&jsonl_path).map_err(|e| io_err(&jsonl_path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for g in &dataset.gestures {
        let line = serde_json::to_string(g).expect("gesture serializes");
        writeln!(w, "{line}").map_err(|e| io_err(&jsonl_path, e))?;
    }
    w.flush().map_err(|e| io_err(&jsonl_path, e))?;
    Ok(())
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{BiosignalGroup, Condition};
    use std::collections::BTreeMap;

    fn sample_dataset() -> Dataset {
        let layout = BiosignalLayout {
            groups: vec![BiosignalGroup {
                name: "emg".into(),
                channels: 1,
                sample_rate_hz: 50.0,
            }],
        };
        let mk = |label: &str, trial: u32, samples: Vec<f64>| {
            let mut signals = BTreeMap::new();
            signals.insert("emg".to_owned(), vec![samples]);
            RawGesture {
                label: label.into(),
                participant: "p00".into(),
                condition: Condition::Personalized,
                trial,
                signals,
            }
        };
        Dataset::new(
            layout,
            vec![
                mk("a", 0, vec![0.1, 0.2, 0.30000000000000004]),
                mk("b", 1, vec![-1.5e-7, 2.0, 3.5]),
            ],
        )
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let ds = sample_dataset();
        save_dataset(dir.path(), &ds).unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.layout, ds.layout);
        assert_eq!(back.gestures.len(), ds.gestures.len());
        for (a, b) in back.gestures.iter().zip(&ds.gestures) {
            assert_eq!(a, b);
            for (ra, rb) in a.signals["emg"].iter().zip(&b.signals["emg"]) {
                for (x, y) in ra.iter().zip(rb) {
                    assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }

    #[test]
    fn nan_aborts_before_any_file_is_written() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("ds");
        let mut ds = sample_dataset();
        ds.gestures[1].signals.get_mut("emg").unwrap()[0][0] = f64::NAN;
        assert!(save_dataset(&out, &ds).is_err());
        assert!(!out.exists(), "no partial dataset may be left behind");
    }

    #[test]
    fn empty_jsonl_files_are_fine() {
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &sample_dataset()).unwrap();
        fs::write(dir.path().join("aaa_empty.jsonl"), "").unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.gestures.len(), 2);
    }

    #[test]
    fn file_order_is_lexicographic() {
        let dir = tempfile::tempdir().unwrap();
        let ds = sample_dataset();
        save_dataset(dir.path(), &ds).unwrap();
        // Rename gestures.jsonl -> z.jsonl and prepend an a.jsonl.
        fs::rename(
            dir.path().join("gestures.jsonl"),
            dir.path().join("z.jsonl"),
        )
        .unwrap();
        let first = serde_json::to_string(&ds.gestures[1]).unwrap();
        fs::write(dir.path().join("a.jsonl"), first + "\n").unwrap();
        let back = load_dataset(dir.path()).unwrap();
        assert_eq!(back.gestures.len(), 3);
        assert_eq!(back.gestures[0].label, "b");
        assert_eq!(back.gestures[1].label, "a");
    }

    #[test]
    fn bad_record_errors_name_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        save_dataset(dir.path(), &sample_dataset()).unwrap();
        fs::write(
            dir.path().join("bad.jsonl"),
            "\n{\"label\": \"x\", \"participant\": \"p\"}\n",
        )
        .unwrap();
        let err = load_dataset(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.jsonl") && msg.contains(":2:"), "got: {msg}");
    }

    #[test]
    fn missing_layout_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_dataset(dir.path()).is_err());
    }

    #[test]
    fn mismatched_record_is_rejected_with_location() {
        let dir = tempfile::tempdir().unwrap();
        let ds = sample_dataset();
        save_dataset(dir.path(), &ds).unwrap();
        let mut bad = ds.gestures[0].clone();
        bad.signals
            .get_mut("emg")
            .unwrap()
            .push(vec![0.0, 1.0, 2.0]);
        fs::write(
            dir.path().join("bad.jsonl"),
            serde_json::to_string(&bad).unwrap() + "\n",
        )
        .unwrap();
        let err = load_dataset(dir.path()).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("channel-count mismatch") && msg.contains("bad.jsonl"),
            "got: {msg}"
        );
    }
}
