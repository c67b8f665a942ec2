//! Artifact writer: every CSV carries the hash of the resolved config, and the manifest lists them.

use std::path::PathBuf;

use anyhow::Context;
use kdvb_core::io::Table;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub struct Artifacts {
    dir: PathBuf,
    command: String,
    config: RunConfig,
    seed: u64,
    hash: String,
    files: Vec<String>,
    warnings: Vec<String>,
}

/// SHA-256 of the command and resolved config, leaving out the output directory so that reruns
/// elsewhere produce identical files.
pub fn config_hash(command: &str, config: &RunConfig) -> anyhow::Result<String> {
    let mut hashed = config.clone();
    hashed.run.out = None;
    let text = serde_json::to_string(&json!({ "command": command, "config": hashed }))?;
    Ok(Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect())
}

impl Artifacts {
    pub fn new(command: &str, config: &RunConfig) -> anyhow::Result<Self> {
        let dir = config.run.out.clone().context("missing configuration value `run.out`")?;
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            command: command.to_string(),
            config: config.clone(),
            seed: config.run.seed.unwrap_or(0),
            hash: config_hash(command, config)?,
            files: Vec::new(),
            warnings: Vec::new(),
        })
    }

    pub fn warn(&mut self, w: impl Into<String>) {
        self.warnings.push(w.into());
    }

    pub fn table(&mut self, name: &str, table: Table) -> anyhow::Result<()> {
        let table = table
            .with_meta("manifest_sha256", &self.hash)
            .with_meta("command", &self.command)
            .with_meta("seed", self.seed);
        let file = format!("{name}.csv");
        table.write(&self.dir.join(&file))?;
        self.files.push(file);
        Ok(())
    }

    /// Writes `manifest.json` and returns its path.
    pub fn finish(self, status: &str, summary: impl Serialize) -> anyhow::Result<PathBuf> {
        let manifest = json!({
            "command": self.command,
            "status": status,
            "manifest_sha256": self.hash,
            "seed": self.seed,
            "config": self.config,
            "outputs": self.files,
            "warnings": self.warnings,
            "summary": serde_json::to_value(summary)?,
        });
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
