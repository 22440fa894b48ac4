use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::{load_binary_csv, BitMatrix};
use crate::{Error, Result};

/// A list of datasets with their expected shapes, read from TOML:
///
/// ```toml
/// [[dataset]]
/// name = "msweb"
/// path = "msweb/msweb.train.data"
/// rows = 29441
/// cols = 294
/// sha256 = "..."   # optional
/// ```
///
/// Relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, Deserialize)]
pub struct Manifest {
    #[serde(rename = "dataset", default)]
    pub datasets: Vec<DatasetEntry>,
    #[serde(skip)]
    base: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DatasetEntry {
    pub name: String,
    pub path: PathBuf,
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub sha256: Option<String>,
}

impl Manifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: Manifest =
            toml::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        manifest.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(manifest)
    }

    pub fn get(&self, name: &str) -> Option<&DatasetEntry> {
        self.datasets.iter().find(|d| d.name == name)
    }

    pub fn resolve(&self, entry: &DatasetEntry) -> PathBuf {
        if entry.path.is_absolute() {
            entry.path.clone()
        } else {
            self.base.join(&entry.path)
        }
    }

    /// Loads a dataset and checks its checksum and shape against the entry.
    pub fn load_dataset(&self, entry: &DatasetEntry) -> Result<BitMatrix> {
        let path = self.resolve(entry);
        if let Some(expected) = &entry.sha256 {
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            let actual = hex_digest(&bytes);
            if !actual.eq_ignore_ascii_case(expected) {
                return Err(Error::Manifest {
                    name: entry.name.clone(),
                    reason: format!("sha256 {actual} does not match manifest {expected}"),
                });
            }
        }
        let data = load_binary_csv(&path)?;
        if (data.rows(), data.cols()) != (entry.rows, entry.cols) {
            return Err(Error::Manifest {
                name: entry.name.clone(),
                reason: format!(
                    "shape {}x{} does not match manifest {}x{}",
                    data.rows(),
                    data.cols(),
                    entry.rows,
                    entry.cols
                ),
            });
        }
        Ok(data)
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
