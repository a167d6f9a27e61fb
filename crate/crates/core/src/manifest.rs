//! Probe/gallery manifests: `path,subject,role` CSV files.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MANIFEST_HEADER: [&str; 3] = ["path", "subject", "role"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Gallery,
    Probe,
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "gallery" => Ok(Role::Gallery),
            "probe" => Ok(Role::Probe),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Gallery => "gallery",
            Role::Probe => "probe",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Path exactly as written in the manifest.
    pub path: String,
    pub subject: String,
    pub role: Role,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DatasetManifest {
    entries: Vec<ManifestEntry>,
    base_dir: PathBuf,
}

impl DatasetManifest {
    /// Builds a manifest from entries; relative paths resolve against `base_dir`.
    pub fn new(entries: Vec<ManifestEntry>, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let base_dir = base_dir.into();
        if entries.is_empty() {
            return Err(Error::Manifest {
                path: base_dir,
                reason: "empty manifest".into(),
            });
        }
        let mut seen = HashSet::new();
        for e in &entries {
            if !seen.insert((e.path.as_str(), e.role)) {
                return Err(Error::Manifest {
                    path: base_dir,
                    reason: format!("duplicate entry ({}, {})", e.path, e.role),
                });
            }
        }
        Ok(DatasetManifest { entries, base_dir })
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn base_dir(&self) -> &Path {
        &self.base_dir
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }

    pub fn gallery(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.role == Role::Gallery)
    }

    pub fn probes(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.role == Role::Probe)
    }

    /// Probe subjects with no gallery entry, sorted.
    pub fn subjects_missing_from_gallery(&self) -> Vec<String> {
        let gallery: HashSet<&str> = self.gallery().map(|e| e.subject.as_str()).collect();
        self.probes()
            .map(|e| e.subject.as_str())
            .filter(|s| !gallery.contains(s))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(String::from)
            .collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(MANIFEST_HEADER)?;
        for e in &self.entries {
            w.write_record([e.path.as_str(), e.subject.as_str(), &e.role.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Parses manifest text. `origin` is used for error messages and as the
/// base directory for relative image paths.
pub fn parse_manifest(text: &str, origin: &Path) -> Result<DatasetManifest> {
    let err = |reason: String| Error::Manifest {
        path: origin.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>() != MANIFEST_HEADER {
        return Err(err(format!(
            "missing header `path,subject,role` (found `{}`)",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| err(e.to_string()))?;
        let line = record.position().map_or(i + 2, |p| p.line() as usize);
        let role = record[2]
            .parse::<Role>()
            .map_err(|msg| err(format!("line {line}: {msg}")))?;
        if record[0].is_empty() || record[1].is_empty() {
            return Err(err(format!("line {line}: empty path or subject")));
        }
        entries.push(ManifestEntry {
            path: record[0].to_string(),
            subject: record[1].to_string(),
            role,
        });
    }
    let base = origin.parent().map(Path::to_path_buf).unwrap_or_default();
    let manifest = DatasetManifest::new(entries, base).map_err(|e| match e {
        Error::Manifest { reason, .. } => err(reason),
        other => other,
    })?;
    for subject in manifest.subjects_missing_from_gallery() {
        log::warn!(
            "{}: probe subject {subject:?} has no gallery entry",
            origin.display()
        );
    }
    Ok(manifest)
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_manifest(&text, path)
}
