//! On-disk layout of a crawl:
//!
//! ```text
//! <root>/manifest.json
//! <root>/<domain>/record.json
//! <root>/<domain>/round-000/clickstream.json
//! <root>/<domain>/round-000/<group>/step-0.png
//! ```

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use cookiediff_core::model::{Clickstream, DomainRecord, Group};
use cookiediff_core::Raster;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: cookiediff_core::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub const RECORD_FILE: &str = "record.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug)]
pub struct Store {
    root: PathBuf,
}

pub fn round_dir(round: usize) -> String {
    format!("round-{round:03}")
}

/// Screenshot path relative to the domain directory.
pub fn screenshot_path(round: usize, group: Group, step: usize) -> String {
    format!("{}/{}/step-{step}.png", round_dir(round), group.as_str())
}

impl Store {
    /// Opens `root`, creating it if needed.
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(io_err(&root))?;
        Ok(Store { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn domain_dir(&self, domain: &str) -> PathBuf {
        self.root.join(domain)
    }

    /// Writes `bytes` next to `path` and renames into place, so readers never
    /// observe a half-written file.
    fn write_atomic(&self, path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    }

    fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<(), StoreError> {
        let bytes = serde_json::to_vec_pretty(value).map_err(|source| StoreError::Json {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_atomic(path, &bytes)
    }

    pub fn save_record(&self, record: &DomainRecord) -> Result<(), StoreError> {
        let path = self.domain_dir(&record.apex.name).join(RECORD_FILE);
        self.write_json(&path, record)
    }

    pub fn load_record(&self, domain: &str) -> Result<Option<DomainRecord>, StoreError> {
        let path = self.domain_dir(domain).join(RECORD_FILE);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(&path)(e)),
        };
        serde_json::from_slice(&bytes)
            .map(Some)
            .map_err(|source| StoreError::Json { path, source })
    }

    /// Drops everything stored for `domain`, ahead of crawling it again.
    pub fn reset_domain(&self, domain: &str) -> Result<(), StoreError> {
        let dir = self.domain_dir(domain);
        match fs::remove_dir_all(&dir) {
            Err(e) if e.kind() != io::ErrorKind::NotFound => Err(io_err(&dir)(e)),
            _ => Ok(()),
        }
    }

    pub fn write_clickstream(
        &self,
        domain: &str,
        round: usize,
        clickstream: &Clickstream,
    ) -> Result<(), StoreError> {
        let path = self
            .domain_dir(domain)
            .join(round_dir(round))
            .join("clickstream.json");
        self.write_json(&path, clickstream)
    }

    pub fn write_screenshot(&self, domain: &str, rel: &str, raster: &Raster) -> Result<(), StoreError> {
        let path = self.domain_dir(domain).join(rel);
        let png = raster.to_png().map_err(|source| StoreError::Image {
            path: path.clone(),
            source,
        })?;
        self.write_atomic(&path, &png)
    }

    pub fn read_screenshot(&self, domain: &str, rel: &str) -> Result<Raster, StoreError> {
        let path = self.domain_dir(domain).join(rel);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        Raster::from_png(&bytes).map_err(|source| StoreError::Image { path, source })
    }

    /// Every record in the store, ordered by rank then name.
    pub fn records(&self) -> Result<Vec<DomainRecord>, StoreError> {
        let mut out = Vec::new();
        let entries = fs::read_dir(&self.root).map_err(io_err(&self.root))?;
        for entry in entries {
            let entry = entry.map_err(io_err(&self.root))?;
            if !entry.path().join(RECORD_FILE).is_file() {
                continue;
            }
            let name = entry.file_name().to_string_lossy().into_owned();
            if let Some(record) = self.load_record(&name)? {
                out.push(record);
            }
        }
        out.sort_by(|a, b| (a.apex.rank, &a.apex.name).cmp(&(b.apex.rank, &b.apex.name)));
        Ok(out)
    }

    pub fn write_manifest<T: Serialize>(&self, manifest: &T) -> Result<(), StoreError> {
        self.write_json(&self.root.join(MANIFEST_FILE), manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cookiediff_core::ApexDomain;

    #[test]
    fn record_round_trip_and_ordering() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path().join("s")).unwrap();
        for (rank, name) in [(3, "c.test"), (1, "a.test")] {
            let rec = DomainRecord::new(ApexDomain::new(rank, name).unwrap(), 5);
            store.save_record(&rec).unwrap();
        }
        let names: Vec<_> = store.records().unwrap().into_iter().map(|r| r.apex.name).collect();
        assert_eq!(names, ["a.test", "c.test"]);
        assert!(store.load_record("missing.test").unwrap().is_none());
        store.reset_domain("a.test").unwrap();
        store.reset_domain("a.test").unwrap();
        assert_eq!(store.records().unwrap().len(), 1);
    }

    #[test]
    fn screenshots_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let raster = Raster::filled(50, 30, [1, 2, 3, 255]);
        let rel = screenshot_path(2, Group::Control, 4);
        assert_eq!(rel, "round-002/control/step-4.png");
        store.write_screenshot("x.test", &rel, &raster).unwrap();
        assert_eq!(store.read_screenshot("x.test", &rel).unwrap(), raster);
    }
}
