//! One-to-many identification runs, rank-k accuracy and report tables.

use std::fmt::{self, Write as _};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::image::{load_gray_image, GrayImage};
use crate::manifest::{DatasetManifest, Role};
use crate::matching::{rank_gallery, GalleryItem, Metric, RankedList};
use crate::transform::{FeatureVector, Mode};

/// One labelled image of a dataset.
#[derive(Clone, Debug)]
pub struct Sample {
    pub id: String,
    pub subject: String,
    pub image: GrayImage,
}

/// Decoded gallery and probe images.
#[derive(Clone, Debug, Default)]
pub struct Dataset {
    pub gallery: Vec<Sample>,
    pub probes: Vec<Sample>,
}

impl Dataset {
    /// Loads every image named in `manifest`. All failures are collected
    /// and returned together.
    pub fn load(manifest: &DatasetManifest) -> Result<Dataset> {
        let loaded: Vec<(Role, Result<Sample>)> = manifest
            .entries()
            .par_iter()
            .map(|e| {
                let sample = load_gray_image(manifest.resolve(e)).map(|image| Sample {
                    id: e.path.clone(),
                    subject: e.subject.clone(),
                    image,
                });
                (e.role, sample)
            })
            .collect();
        let mut dataset = Dataset::default();
        let mut failures = Vec::new();
        for (role, sample) in loaded {
            match (role, sample) {
                (Role::Gallery, Ok(s)) => dataset.gallery.push(s),
                (Role::Probe, Ok(s)) => dataset.probes.push(s),
                (_, Err(e)) => failures.push(e),
            }
        }
        if !failures.is_empty() {
            return Err(Error::ImagesFailed { failures });
        }
        dataset.validate()?;
        Ok(dataset)
    }

    pub fn validate(&self) -> Result<()> {
        if self.probes.is_empty() {
            return Err(Error::EmptyProbeSet);
        }
        if self.gallery.is_empty() {
            return Err(Error::EmptyGallery);
        }
        Ok(())
    }
}

/// Features for every gallery and probe image under one descriptor.
#[derive(Clone, Debug)]
pub struct FeatureSet {
    pub descriptor: Descriptor,
    pub mode: Mode,
    pub gallery: Vec<FeatureVector>,
    pub probes: Vec<FeatureVector>,
}

impl FeatureSet {
    pub fn extract(dataset: &Dataset, descriptor: Descriptor, mode: Mode) -> Result<FeatureSet> {
        let run = |samples: &[Sample]| -> Result<Vec<FeatureVector>> {
            samples
                .par_iter()
                .map(|s| descriptor.extract(&s.image, mode))
                .collect()
        };
        let gallery = run(&dataset.gallery)?;
        let probes = run(&dataset.probes)?;
        if let Some(first) = gallery.first() {
            let expected = first.len();
            let all = gallery.iter().chain(&probes);
            if let Some(bad) = all.map(FeatureVector::len).find(|&l| l != expected) {
                return Err(Error::LengthMismatch {
                    left: expected,
                    right: bad,
                });
            }
        }
        Ok(FeatureSet {
            descriptor,
            mode,
            gallery,
            probes,
        })
    }
}

/// Returns the rank-1 subject together with the full ranked list.
pub fn identify(
    probe_id: &str,
    probe: &FeatureVector,
    gallery: &[GalleryItem<'_>],
    metric: Metric,
) -> Result<(String, RankedList)> {
    let ranked = rank_gallery(probe_id, probe, gallery, metric)?;
    Ok((ranked.best().subject.clone(), ranked))
}

/// How a probe counts as correct at rank k.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankRule {
    /// Some same-subject gallery item appears within the top k (CMC).
    #[default]
    Cumulative,
    /// The item at exactly position k has the probe's subject.
    Exact,
}

impl std::str::FromStr for RankRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cumulative" => Ok(RankRule::Cumulative),
            "exact" => Ok(RankRule::Exact),
            other => Err(Error::Invalid(format!(
                "unknown rank rule {other:?} (expected cumulative or exact)"
            ))),
        }
    }
}

impl fmt::Display for RankRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RankRule::Cumulative => "cumulative",
            RankRule::Exact => "exact",
        })
    }
}

/// Ranked gallery lists for every probe under one descriptor and metric.
#[derive(Clone, Debug)]
pub struct IdentificationRun {
    pub descriptor: Descriptor,
    pub metric: Metric,
    pub mode: Mode,
    pub gallery_ids: Vec<String>,
    pub probe_subjects: Vec<String>,
    pub ranked: Vec<RankedList>,
}

impl IdentificationRun {
    pub fn execute(dataset: &Dataset, features: &FeatureSet, metric: Metric) -> Result<Self> {
        dataset.validate()?;
        let gallery: Vec<GalleryItem<'_>> = dataset
            .gallery
            .iter()
            .zip(&features.gallery)
            .map(|(s, f)| GalleryItem {
                subject: &s.subject,
                feature: f,
            })
            .collect();
        let ranked = dataset
            .probes
            .par_iter()
            .zip(&features.probes)
            .map(|(p, f)| rank_gallery(&p.id, f, &gallery, metric))
            .collect::<Result<Vec<_>>>()?;
        Ok(IdentificationRun {
            descriptor: features.descriptor,
            metric,
            mode: features.mode,
            gallery_ids: dataset.gallery.iter().map(|s| s.id.clone()).collect(),
            probe_subjects: dataset.probes.iter().map(|s| s.subject.clone()).collect(),
            ranked,
        })
    }

    pub fn gallery_size(&self) -> usize {
        self.gallery_ids.len()
    }

    /// Writes `probe,gallery,subject,metric,score,rank` rows. Scores use
    /// the shortest representation that parses back to the same value.
    pub fn write_scores<W: Write>(&self, out: W, with_header: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if with_header {
            w.write_record(SCORE_HEADER)?;
        }
        for list in &self.ranked {
            for (pos, m) in list.matches.iter().enumerate() {
                w.write_record([
                    list.probe_id.as_str(),
                    self.gallery_ids[m.gallery_index].as_str(),
                    m.subject.as_str(),
                    &self.metric.to_string(),
                    &m.score.to_string(),
                    &(pos + 1).to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(())
    }
}

pub const SCORE_HEADER: [&str; 6] = ["probe", "gallery", "subject", "metric", "score", "rank"];

/// Percentage of probes identified at rank `k`.
pub fn rank_k_accuracy(run: &IdentificationRun, k: usize, rule: RankRule) -> Result<f64> {
    if run.ranked.is_empty() {
        return Err(Error::EmptyProbeSet);
    }
    let gallery = run.gallery_size();
    if k == 0 || k > gallery {
        return Err(Error::RankOutOfRange { k, gallery });
    }
    let hits = run
        .ranked
        .iter()
        .zip(&run.probe_subjects)
        .filter(|(list, subject)| match rule {
            RankRule::Cumulative => list.first_rank_of(subject).is_some_and(|r| r <= k),
            RankRule::Exact => list.matches[k - 1].subject == **subject,
        })
        .count();
    Ok(100.0 * hits as f64 / run.ranked.len() as f64)
}

pub fn cmc_curve(
    run: &IdentificationRun,
    k_max: usize,
    rule: RankRule,
) -> Result<Vec<(usize, f64)>> {
    if k_max == 0 || k_max > run.gallery_size() {
        return Err(Error::RankOutOfRange {
            k: k_max,
            gallery: run.gallery_size(),
        });
    }
    (1..=k_max)
        .map(|k| rank_k_accuracy(run, k, rule).map(|a| (k, a)))
        .collect()
}

/// Rounds a percentage to two decimals.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub metric: Metric,
    pub rank: usize,
    pub accuracy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub descriptor: String,
    pub cells: Vec<ReportCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmcSeries {
    pub descriptor: String,
    pub metric: Metric,
    pub points: Vec<(usize, f64)>,
}

/// Accuracy table: one row per descriptor, one column per (metric, rank).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mode: Mode,
    pub rule: RankRule,
    pub probes: usize,
    pub gallery: usize,
    pub metrics: Vec<Metric>,
    pub ranks: Vec<usize>,
    pub rows: Vec<ReportRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cmc: Vec<CmcSeries>,
}

impl EvalReport {
    /// Builds a report from runs; rows follow first appearance of each descriptor.
    pub fn from_runs(runs: &[IdentificationRun], ranks: &[usize], rule: RankRule) -> Result<Self> {
        let first = runs
            .first()
            .ok_or_else(|| Error::Invalid("no runs to report".into()))?;
        if ranks.is_empty() {
            return Err(Error::Invalid("no ranks requested".into()));
        }
        let mut metrics: Vec<Metric> = Vec::new();
        let mut rows: Vec<ReportRow> = Vec::new();
        for run in runs {
            if !metrics.contains(&run.metric) {
                metrics.push(run.metric);
            }
            let label = run.descriptor.label();
            let row_idx = match rows.iter().position(|r| r.descriptor == label) {
                Some(i) => i,
                None => {
                    rows.push(ReportRow {
                        descriptor: label,
                        cells: Vec::new(),
                    });
                    rows.len() - 1
                }
            };
            for &k in ranks {
                rows[row_idx].cells.push(ReportCell {
                    metric: run.metric,
                    rank: k,
                    accuracy: round2(rank_k_accuracy(run, k, rule)?),
                });
            }
        }
        Ok(EvalReport {
            mode: first.mode,
            rule,
            probes: first.ranked.len(),
            gallery: first.gallery_size(),
            metrics,
            ranks: ranks.to_vec(),
            rows,
            cmc: Vec::new(),
        })
    }

    pub fn with_cmc(mut self, runs: &[IdentificationRun], k_max: usize) -> Result<Self> {
        self.cmc = runs
            .iter()
            .map(|run| {
                Ok(CmcSeries {
                    descriptor: run.descriptor.label(),
                    metric: run.metric,
                    points: cmc_curve(run, k_max, self.rule)?
                        .into_iter()
                        .map(|(k, a)| (k, round2(a)))
                        .collect(),
                })
            })
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn accuracy(&self, descriptor: &str, metric: Metric, rank: usize) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.descriptor == descriptor)?
            .cells
            .iter()
            .find(|c| c.metric == metric && c.rank == rank)
            .map(|c| c.accuracy)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Long-form CSV: `descriptor,metric,rank,accuracy`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["descriptor", "metric", "rank", "accuracy"])?;
        for row in &self.rows {
            for c in &row.cells {
                w.write_record([
                    row.descriptor.as_str(),
                    &c.metric.to_string(),
                    &c.rank.to_string(),
                    &format!("{:.2}", c.accuracy),
                ])?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Aligned text table with one column per metric and rank.
    pub fn to_table(&self) -> String {
        let mut columns: Vec<(Metric, usize)> = Vec::new();
        for &m in &self.metrics {
            for &k in &self.ranks {
                columns.push((m, k));
            }
        }
        let headers: Vec<String> = columns.iter().map(|(m, k)| format!("{m}@{k}")).collect();
        let name_w = self
            .rows
            .iter()
            .map(|r| r.descriptor.len())
            .chain(["descriptor".len()])
            .max()
            .unwrap_or(10);
        let cell_w = headers.iter().map(String::len).max().unwrap_or(0).max(6);

        let mut out = String::new();
        let _ = write!(out, "{:<name_w$}", "descriptor");
        for h in &headers {
            let _ = write!(out, "  {h:>cell_w$}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:<name_w$}", row.descriptor);
            for &(m, k) in &columns {
                let cell = row
                    .cells
                    .iter()
                    .find(|c| c.metric == m && c.rank == k)
                    .map(|c| format!("{:.2}", c.accuracy))
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, "  {cell:>cell_w$}");
            }
            out.push('\n');
        }
        out
    }
}

/// Every descriptor against every metric over one dataset.
pub fn run_all(
    dataset: &Dataset,
    descriptors: &[Descriptor],
    metrics: &[Metric],
    mode: Mode,
) -> Result<Vec<IdentificationRun>> {
    if descriptors.is_empty() || metrics.is_empty() {
        return Err(Error::Invalid(
            "at least one descriptor and one metric are required".into(),
        ));
    }
    dataset.validate()?;
    let mut runs = Vec::with_capacity(descriptors.len() * metrics.len());
    for &d in descriptors {
        let features = FeatureSet::extract(dataset, d, mode)?;
        for &m in metrics {
            runs.push(IdentificationRun::execute(dataset, &features, m)?);
        }
    }
    Ok(runs)
}

pub fn compare_descriptors(
    dataset: &Dataset,
    descriptors: &[Descriptor],
    metrics: &[Metric],
    ranks: &[usize],
    mode: Mode,
    rule: RankRule,
) -> Result<EvalReport> {
    let runs = run_all(dataset, descriptors, metrics, mode)?;
    EvalReport::from_runs(&runs, ranks, rule)
}
