//! Run manifest: command, flags, seed, input hashes, version, duration.
//!
//! Result files are byte-reproducible for identical inputs and seed; the
//! manifest carries the wall-clock duration and is therefore written as a
//! sidecar (or to stderr), never mixed into result outputs.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    /// SHA-256 of every input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    pub duration_ms: u64,
}

pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            seed: None,
            inputs: BTreeMap::new(),
            started: Instant::now(),
        }
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(&mut self, path: &Path) -> std::io::Result<&mut Self> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        self.inputs
            .insert(path.display().to_string(), format!("{:x}", hasher.finalize()));
        Ok(self)
    }

    pub fn finish(self) -> RunManifest {
        RunManifest {
            command: self.command,
            argv: std::env::args().collect(),
            seed: self.seed,
            inputs: self.inputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
            duration_ms: self.started.elapsed().as_millis() as u64,
        }
    }
}

/// Writes the manifest next to the output prefix, or to stderr when the run
/// produced no files.
pub fn emit(manifest: RunManifest, out: Option<&PathBuf>) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    match out {
        Some(prefix) => {
            let path = sibling(prefix, "manifest.json");
            std::fs::write(path, text + "\n")
        }
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

/// `prefix.ext` path for multi-file outputs sharing one `--out` prefix.
pub fn sibling(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}
