use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ReportError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileHash {
    pub name: String,
    pub sha256: String,
}

/// Record of one CLI run. Written last, once every output exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    /// Hashes of the inputs: source files, or canonical JSON of built-ins.
    pub inputs: Vec<FileHash>,
    pub seeds: Vec<u64>,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<FileHash>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<String, ReportError> {
    let bytes = std::fs::read(path).map_err(|e| ReportError::io(path, e))?;
    Ok(sha256_hex(&bytes))
}

pub fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn start(command_line: Vec<String>) -> Self {
        RunManifest {
            command_line,
            inputs: Vec::new(),
            seeds: Vec::new(),
            started_at: now_rfc3339(),
            finished_at: String::new(),
            outputs: Vec::new(),
        }
    }

    pub fn add_input(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.inputs.push(FileHash {
            name: name.into(),
            sha256: sha256_hex(bytes),
        });
    }

    /// Hashes the named outputs inside `dir` and writes the manifest there,
    /// via a temporary file and a rename.
    pub fn finish(mut self, dir: &Path, outputs: &[&str]) -> Result<Self, ReportError> {
        self.outputs = outputs
            .iter()
            .map(|name| {
                Ok(FileHash {
                    name: name.to_string(),
                    sha256: hash_file(&dir.join(name))?,
                })
            })
            .collect::<Result<_, ReportError>>()?;
        self.finished_at = now_rfc3339();
        let text = serde_json::to_string_pretty(&self).expect("manifest serializes");
        let tmp = dir.join(".manifest.json.tmp");
        std::fs::write(&tmp, text + "\n").map_err(|e| ReportError::io(&tmp, e))?;
        let dest = dir.join(MANIFEST_FILE);
        std::fs::rename(&tmp, &dest).map_err(|e| ReportError::io(&dest, e))?;
        Ok(self)
    }
}

/// Re-hashes every output listed in `dir/manifest.json`; returns the names
/// whose hashes no longer match.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>, ReportError> {
    let path = dir.join(MANIFEST_FILE);
    let text = std::fs::read_to_string(&path).map_err(|e| ReportError::io(&path, e))?;
    let m: RunManifest = serde_json::from_str(&text).map_err(|e| ReportError::Manifest(e.to_string()))?;
    let mut bad = Vec::new();
    for f in &m.outputs {
        if hash_file(&dir.join(&f.name))? != f.sha256 {
            bad.push(f.name.clone());
        }
    }
    Ok(bad)
}

/// Creates `dir`, refusing to reuse a non-empty directory unless `force`.
pub fn prepare_output_dir(dir: &Path, force: bool) -> Result<(), ReportError> {
    if dir.exists() {
        let non_empty = std::fs::read_dir(dir)
            .map_err(|e| ReportError::io(dir, e))?
            .next()
            .is_some();
        if non_empty && !force {
            return Err(ReportError::OutputNotEmpty(dir.display().to_string()));
        }
    } else {
        std::fs::create_dir_all(dir).map_err(|e| ReportError::io(dir, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_hashes_verify() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.csv"), "x\n1\n").unwrap();
        let mut m = RunManifest::start(vec!["neurashed".into(), "train".into()]);
        m.add_input("graph.json", b"{}");
        m.seeds.push(7);
        m.finish(dir.path(), &["a.csv"]).unwrap();
        assert!(verify_manifest(dir.path()).unwrap().is_empty());
        std::fs::write(dir.path().join("a.csv"), "x\n2\n").unwrap();
        assert_eq!(verify_manifest(dir.path()).unwrap(), vec!["a.csv".to_string()]);
        assert!(!dir.path().join(".manifest.json.tmp").exists());
    }

    #[test]
    fn refuses_non_empty_dir() {
        let dir = tempfile::tempdir().unwrap();
        prepare_output_dir(dir.path(), false).unwrap();
        std::fs::write(dir.path().join("x"), "").unwrap();
        assert!(matches!(prepare_output_dir(dir.path(), false), Err(ReportError::OutputNotEmpty(_))));
        prepare_output_dir(dir.path(), true).unwrap();
        prepare_output_dir(&dir.path().join("new/sub"), false).unwrap();
    }
}
