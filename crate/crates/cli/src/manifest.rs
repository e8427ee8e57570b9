//! Run manifests: what was run, with which configuration, and checksums of
//! everything written.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;
use wavemap_core::constants::CONSTANTS_VERSION;
use wavemap_core::field::TorusGrid;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OutputEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config_echo: serde_json::Value,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputEntry>,
    pub artifact_version: String,
    pub constants_version: u32,
    pub wall_time_s: f64,
    pub grid: Option<TorusGrid>,
    pub seed: Option<u64>,
}

pub fn sha256_file(path: &Path) -> Result<(String, u64)> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {} for checksum", path.display()))?;
    let digest = Sha256::digest(&bytes);
    Ok((digest.iter().map(|b| format!("{b:02x}")).collect(), bytes.len() as u64))
}

/// Collects inputs/outputs during a run and writes the manifest at the end.
pub struct Recorder {
    subcommand: String,
    start: Instant,
    config_echo: serde_json::Value,
    inputs: Vec<String>,
    outputs: Vec<PathBuf>,
    grid: Option<TorusGrid>,
    seed: Option<u64>,
}

impl Recorder {
    pub fn new(subcommand: &str, config_echo: serde_json::Value) -> Self {
        Self {
            subcommand: subcommand.into(),
            start: Instant::now(),
            config_echo,
            inputs: Vec::new(),
            outputs: Vec::new(),
            grid: None,
            seed: None,
        }
    }

    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.display().to_string());
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.to_path_buf());
    }

    pub fn grid(&mut self, g: TorusGrid) {
        self.grid = Some(g);
    }

    pub fn seed(&mut self, s: u64) {
        self.seed = Some(s);
    }

    /// Checksum every recorded output and write the manifest to `path`.
    pub fn finish(self, path: &Path) -> Result<RunManifest> {
        let outputs = self
            .outputs
            .iter()
            .map(|p| {
                let (sha256, bytes) = sha256_file(p)?;
                Ok(OutputEntry { path: p.display().to_string(), sha256, bytes })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = RunManifest {
            subcommand: self.subcommand,
            config_echo: self.config_echo,
            inputs: self.inputs,
            outputs,
            artifact_version: env!("CARGO_PKG_VERSION").into(),
            constants_version: CONSTANTS_VERSION,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            grid: self.grid,
            seed: self.seed,
        };
        std::fs::write(path, serde_json::to_string_pretty(&m)?).with_context(|| format!("writing manifest {}", path.display()))?;
        Ok(m)
    }
}

/// `report.json` → `report.manifest.json`.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "run".into());
    out.with_file_name(format!("{stem}.manifest.json"))
}
