//! Run manifests: each subcommand records what it read and wrote (as
//! SHA-256 fingerprints) together with the fully resolved config that
//! drove it, so `verify` can replay the run from the manifest alone and
//! compare bytes.

use std::collections::BTreeMap;
use std::path::Path;

use essc_core::experiment::ExperimentConfig;
use essc_core::Result;
use serde::{Deserialize, Serialize};

use crate::io;

/// One subcommand's reproducibility record, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub master_seed: u64,
    /// The resolved config, embedded so replay needs no external file.
    pub config: ExperimentConfig,
    /// Relative path -> SHA-256 of every file the command read.
    pub inputs: BTreeMap<String, String>,
    /// Relative path -> SHA-256 of every file the command wrote.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig, config_hash: &str) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            master_seed: config.master_seed,
            config: config.clone(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn file_name(command: &str) -> String {
        format!("manifest_{command}.json")
    }

    pub fn record_input(&mut self, name: &str, bytes: &[u8]) {
        self.inputs.insert(name.to_string(), io::sha256_hex(bytes));
    }

    pub fn record_output(&mut self, name: &str, bytes: &[u8]) {
        self.outputs.insert(name.to_string(), io::sha256_hex(bytes));
    }

    /// Write `manifest_<command>.json` into the output directory.
    pub fn write(&self, out: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        io::write_atomic(&out.join(Self::file_name(&self.command)), text.as_bytes())
    }

    /// Read a manifest if present; `Ok(None)` when the file is missing.
    pub fn read(out: &Path, command: &str) -> Result<Option<Self>> {
        let path = out.join(Self::file_name(command));
        if !path.exists() {
            return Ok(None);
        }
        let text = io::read_string(&path)?;
        Ok(Some(serde_json::from_str(&text)?))
    }
}
