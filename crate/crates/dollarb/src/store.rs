//! On-disk template stores.
//!
//! A store is a single JSON document holding the recognizer configuration,
//! a hash of the layout the templates were enrolled under, and the enrolled
//! templates themselves. The hash lets `recognize`/`evaluate` refuse a store
//! whose geometry silently disagrees with the dataset at hand.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::layout::BiosignalLayout;
use crate::recognizer::{LatentTemplate, RecognizerConfig};
use crate::{Error, Result};

/// A set of enrolled templates plus the context needed to use them safely.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemplateStore {
    pub config: RecognizerConfig,
    /// SHA-256 of the canonical JSON of the enrollment layout.
    pub layout_hash: String,
    pub templates: Vec<LatentTemplate>,
}

impl TemplateStore {
    pub fn new(config: RecognizerConfig, layout: &BiosignalLayout) -> Self {
        TemplateStore {
            config,
            layout_hash: layout.content_hash(),
            templates: Vec::new(),
        }
    }

    /// Parse a store from JSON text (no structural validation yet).
    pub fn from_json_str(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Check the store against the layout it is about to be used with:
    /// matching hash, valid configuration, and structurally consistent
    /// templates.
    pub fn validate_against(&self, layout: &BiosignalLayout) -> Result<()> {
        self.config.validate()?;
        if self.layout_hash != layout.content_hash() {
            return Err(Error::InvalidArgument(
                "template store was enrolled under a different layout".into(),
            ));
        }
        for t in &self.templates {
            t.validate(layout, &self.config)?;
        }
        Ok(())
    }
}

/// Write a store as single-line JSON (latent templates make these files
/// large; pretty-printing would triple their size for no benefit).
pub fn save_store(path: &Path, store: &TemplateStore) -> Result<()> {
    let json = serde_json::to_string(store).expect("store serializes");
    fs::write(path, json).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Read a store back from disk.
pub fn load_store(path: &Path) -> Result<TemplateStore> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    TemplateStore::from_json_str(&text).map_err(|e| Error::Json {
        path: path.to_path_buf(),
        source: e,
    })
}

// ---------------------------------------------------------------------------
