//! Output directories: every run leaves its resolved configuration, input
//! checksums and the tool version next to its results.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

/// Overrides the number of significant digits in CSV output.
pub const PRECISION_ENV: &str = "GAPSCOPE_PRECISION";
pub const DEFAULT_PRECISION: usize = 17;

pub fn precision() -> Result<usize> {
    match std::env::var(PRECISION_ENV) {
        Ok(text) => {
            let digits: usize = text
                .trim()
                .parse()
                .with_context(|| format!("{PRECISION_ENV}={text:?} is not a digit count"))?;
            if !(1..=17).contains(&digits) {
                bail!("{PRECISION_ENV} must be between 1 and 17, got {digits}");
            }
            Ok(digits)
        }
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    /// Creates the directory and writes `config.json`.
    pub fn create(root: &Path, command: &str, config: &impl Serialize, inputs: &[PathBuf]) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        let checksums = inputs
            .iter()
            .map(|p| Ok(json!({ "path": p.display().to_string(), "sha256": sha256_file(p)? })))
            .collect::<Result<Vec<_>>>()?;
        let doc = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config,
            "inputs": checksums,
        });
        let out = Self { root: root.to_path_buf() };
        out.write("config.json", &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        Ok(out)
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.path(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    pub fn write_json(&self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        self.write(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }
}
