//! Per-run manifest: inputs, configuration, seed and artifact checksums.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{fail, Failure};

pub fn sha256_file(path: &Path) -> Result<String, Failure> {
    let bytes = std::fs::read(path).map_err(|e| Failure::new("cli", "checksum", format!("{}: {e}", path.display())))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Serialize)]
pub struct Manifest {
    subcommand: &'static str,
    version: &'static str,
    seed: Option<u64>,
    config: serde_json::Value,
    inputs: BTreeMap<String, String>,
    artifacts: BTreeMap<String, String>,
    #[serde(skip)]
    out_dir: PathBuf,
}

impl Manifest {
    pub fn new(subcommand: &'static str, config: &impl Serialize, seed: Option<u64>, out_dir: &Path) -> Self {
        Self {
            subcommand,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config: serde_json::to_value(config).expect("arguments serialize"),
            inputs: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            out_dir: out_dir.to_path_buf(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), Failure> {
        let sum = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), sum);
        Ok(())
    }

    /// Records a file already written under the output directory.
    pub fn artifact(&mut self, path: &Path) -> Result<(), Failure> {
        let sum = sha256_file(path)?;
        let rel = path.strip_prefix(&self.out_dir).unwrap_or(path);
        self.artifacts.insert(rel.display().to_string(), sum);
        Ok(())
    }

    /// Writes `name` under the output directory and records it.
    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Failure::new("cli", "write", format!("{}: {e}", path.display())))?;
        self.artifact(&path)?;
        Ok(path)
    }

    pub fn finish(self) -> Result<(), Failure> {
        let path = self.out_dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self).map_err(fail("cli", "manifest"))?;
        std::fs::write(&path, json + "\n").map_err(|e| Failure::new("cli", "manifest", format!("{}: {e}", path.display())))
    }
}
