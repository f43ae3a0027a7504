use std::fs::File;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Serialize)]
struct FileEntry {
    name: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    experiment: &'a str,
    command: &'a str,
    seed: u64,
    config_sha256: String,
    config: &'a ExperimentConfig,
    files: Vec<FileEntry>,
    version: &'static str,
    timestamp: u64,
}

/// Collects the files written by one run and finishes with `manifest.json`.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    experiment: &'static str,
    files: Vec<String>,
}

impl Run {
    pub fn start(cfg: &ExperimentConfig, command: &'static str, experiment: &'static str) -> Result<Self, CliError> {
        let dir = cfg.out_dir.join(command);
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir, command, experiment, files: Vec::new() })
    }

    pub fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    pub fn csv(&mut self, name: &str) -> Result<csv::Writer<File>, CliError> {
        Ok(csv::Writer::from_path(self.path(name))?)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value)?;
        std::fs::write(self.path(name), text + "\n")?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        std::fs::write(self.path(name), body)?;
        Ok(())
    }

    pub fn finish(self, cfg: &ExperimentConfig) -> Result<PathBuf, CliError> {
        let files = self
            .files
            .iter()
            .map(|name| {
                let bytes = std::fs::read(self.dir.join(name))?;
                Ok(FileEntry { name: name.clone(), sha256: sha256_hex(&bytes) })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let config_text = cfg.to_toml()?;
        let manifest = Manifest {
            experiment: self.experiment,
            command: self.command,
            seed: cfg.seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            config: cfg,
            files,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        };
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(path)
    }
}
