//! Output directories and the run manifest written into each of them.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use phaseless_core::io::{sha256_hex, write_atomic};
use serde::Serialize;

use crate::error::{CliError, CliResult};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, Serialize)]
pub struct FileRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub scene_hash: Option<String>,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub warnings: Vec<String>,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

fn now_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis())
}

/// Collects inputs and outputs of one command and writes the manifest last.
pub struct Run {
    dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    pub fn start(dir: &Path, command: &str, seed: Option<u64>, threads: Option<usize>) -> CliResult<Run> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source: source.into(),
        })?;
        Ok(Run {
            dir: dir.to_path_buf(),
            manifest: RunManifest {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                args: std::env::args().skip(1).collect(),
                seed,
                threads,
                scene_hash: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
                warnings: Vec::new(),
                started_unix_ms: now_ms(),
                finished_unix_ms: 0,
            },
        })
    }

    pub fn set_scene_hash(&mut self, hash: String) {
        self.manifest.scene_hash = Some(hash);
    }

    pub fn input(&mut self, path: &Path, contents: &[u8]) {
        self.manifest.inputs.push(FileRecord {
            path: path.display().to_string(),
            sha256: sha256_hex(contents),
        });
    }

    pub fn warn(&mut self, message: String) {
        eprintln!("warning: {message}");
        self.manifest.warnings.push(message);
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> CliResult<()> {
        let path = self.dir.join(name);
        write_atomic(&path, contents).map_err(|source| CliError::Write { path, source })?;
        self.manifest.outputs.push(FileRecord {
            path: name.to_string(),
            sha256: sha256_hex(contents),
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.manifest.finished_unix_ms = now_ms();
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        let path = self.dir.join(MANIFEST_NAME);
        write_atomic(&path, text.as_bytes()).map_err(|source| CliError::Write {
            path: path.clone(),
            source,
        })?;
        Ok(path)
    }
}
