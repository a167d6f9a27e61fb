//! Seeded probe/gallery split generation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::manifest::{DatasetManifest, ManifestEntry, Role};

/// An unlabelled-role image listing: `(path, subject)` pairs.
pub fn parse_image_list(text: &str, origin: &Path) -> Result<Vec<(String, String)>> {
    let err = |reason: String| Error::Manifest {
        path: origin.to_path_buf(),
        reason,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| err(e.to_string()))?.clone();
    if header.len() < 2 || &header[0] != "path" || &header[1] != "subject" {
        return Err(err("missing header `path,subject`".into()));
    }
    let mut items = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| err(e.to_string()))?;
        if record.len() < 2 {
            return Err(err(format!("short row: {:?}", record)));
        }
        items.push((record[0].to_string(), record[1].to_string()));
    }
    if items.is_empty() {
        return Err(err("empty image list".into()));
    }
    Ok(items)
}

pub fn load_image_list(path: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_image_list(&text, path)
}

/// Assigns `probes_per_subject` randomly chosen images of each subject to
/// the probe set and the rest to the gallery. Subjects with too few images
/// to keep at least one gallery image stay entirely in the gallery.
///
/// Entries keep input order; only roles are assigned. The same seed always
/// gives the same split.
pub fn split_manifest(
    items: &[(String, String)],
    probes_per_subject: usize,
    seed: u64,
    base_dir: &Path,
) -> Result<DatasetManifest> {
    if probes_per_subject == 0 {
        return Err(Error::Invalid(
            "probes per subject must be at least 1".into(),
        ));
    }
    let mut by_subject: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (_, subject)) in items.iter().enumerate() {
        by_subject.entry(subject).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut roles = vec![Role::Gallery; items.len()];
    for (subject, mut idx) in by_subject {
        if idx.len() <= probes_per_subject {
            log::warn!(
                "subject {subject:?} has {} image(s); keeping all in the gallery",
                idx.len()
            );
            continue;
        }
        idx.shuffle(&mut rng);
        for &i in &idx[..probes_per_subject] {
            roles[i] = Role::Probe;
        }
    }
    let entries = items
        .iter()
        .zip(roles)
        .map(|((path, subject), role)| ManifestEntry {
            path: path.clone(),
            subject: subject.clone(),
            role,
        })
        .collect();
    DatasetManifest::new(entries, base_dir)
}
