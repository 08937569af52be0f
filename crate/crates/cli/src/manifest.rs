use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
    /// For inputs produced by an earlier run: whether the file still
    /// matches the digest that run recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matches_producer: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub command: String,
    pub version: String,
    pub args: Vec<String>,
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub exit_code: i32,
    pub seed: Option<u64>,
    pub config: Option<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub started: String,
    pub finished: String,
    pub wall_seconds: f64,
    pub acceptance: BTreeMap<String, f64>,
    pub stage_seconds: BTreeMap<String, f64>,
    #[serde(default)]
    pub details: serde_json::Value,
}

pub fn sha256_file(path: &Path) -> CliResult<(String, u64)> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

/// Digest of an input, checked against the manifest of the run that wrote
/// it when one sits next to it.
pub fn input_digest(path: &Path) -> CliResult<FileDigest> {
    let (sha256, bytes) = sha256_file(path)?;
    let producer = path
        .parent()
        .map(|dir| dir.join(MANIFEST))
        .filter(|m| m.is_file())
        .and_then(|m| std::fs::read_to_string(m).ok())
        .and_then(|text| serde_json::from_str::<Manifest>(&text).ok());
    let name = path.file_name().map(|n| n.to_string_lossy().to_string());
    let matches_producer = producer.and_then(|m| {
        m.outputs
            .iter()
            .find(|o| Some(&o.path) == name.as_ref())
            .map(|o| o.sha256 == sha256)
    });
    if matches_producer == Some(false) {
        log::warn!("{} changed since the run that produced it", path.display());
    }
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256,
        bytes,
        matches_producer,
    })
}

/// Digests of every file under `dir` except the manifest, with paths
/// relative to `dir`, in sorted order.
pub fn output_digests(dir: &Path) -> CliResult<Vec<FileDigest>> {
    let mut files = Vec::new();
    collect(dir, dir, &mut files)?;
    files.sort();
    files
        .into_iter()
        .map(|(rel, abs)| {
            let (sha256, bytes) = sha256_file(&abs)?;
            Ok(FileDigest {
                path: rel,
                sha256,
                bytes,
                matches_producer: None,
            })
        })
        .collect()
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<(String, PathBuf)>) -> CliResult<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_dir() {
            collect(root, &path, out)?;
        } else if path.file_name().is_some_and(|n| n != MANIFEST) {
            let rel = path.strip_prefix(root).expect("under root");
            out.push((rel.to_string_lossy().replace('\\', "/"), path));
        }
    }
    Ok(())
}
