//! Run manifests: every command leaves a JSON record of its parameters,
//! seed, version, duration, and the digests of every file it wrote.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize)]
struct OutputRecord {
    path: String,
    sha256: String,
    bytes: u64,
}

#[derive(Serialize)]
struct ManifestBody<'a> {
    command: &'a str,
    parameters: &'a serde_json::Value,
    seed: u64,
    version: &'a str,
    duration_ms: u128,
    outputs: &'a [OutputRecord],
}

/// Collects output files as a command runs; [`RunManifest::write`] emits
/// the manifest itself.
pub struct RunManifest {
    command: String,
    parameters: serde_json::Value,
    seed: u64,
    started: Instant,
    outputs: Vec<OutputRecord>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            seed,
            started: Instant::now(),
            outputs: vec![],
        }
    }

    /// Record a file that was just written; reads it back to digest it.
    pub fn record(&mut self, path: &Path) -> Result<()> {
        let bytes =
            fs::read(path).with_context(|| format!("reading back output {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        let sha256 = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.outputs.push(OutputRecord {
            path: path.display().to_string(),
            sha256,
            bytes: bytes.len() as u64,
        });
        Ok(())
    }

    /// Write `<command>_manifest.json` into the output directory.
    pub fn write(self, out_dir: &Path) -> Result<PathBuf> {
        let body = ManifestBody {
            command: &self.command,
            parameters: &self.parameters,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_ms: self.started.elapsed().as_millis(),
            outputs: &self.outputs,
        };
        let path = out_dir.join(format!("{}_manifest.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(&body)?)
            .with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(path)
    }
}
