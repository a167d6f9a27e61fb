//! Feature-vector comparison and gallery ranking.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::FeatureVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Metric {
    /// Cosine similarity; larger is closer.
    #[serde(rename = "CS")]
    Cs,
    /// Sum of absolute differences; smaller is closer.
    #[serde(rename = "SAD")]
    Sad,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Cs, Metric::Sad];

    pub fn score(self, a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
        match self {
            Metric::Cs => cosine_similarity(a, b),
            Metric::Sad => sad(a, b),
        }
    }

    /// Orders two scores best first.
    pub fn compare(self, a: f64, b: f64) -> Ordering {
        match self {
            Metric::Cs => b.total_cmp(&a),
            Metric::Sad => a.total_cmp(&b),
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cs" | "cosine" => Ok(Metric::Cs),
            "sad" => Ok(Metric::Sad),
            _ => Err(Error::Invalid(format!(
                "unknown metric {s:?} (expected cs or sad)"
            ))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cs => "CS",
            Metric::Sad => "SAD",
        })
    }
}

fn check_lengths(a: &FeatureVector, b: &FeatureVector) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptyFeature);
    }
    Ok(())
}

/// `dot(a, b) / (|a| |b|)`, or 0 when either vector is all zeros.
pub fn cosine_similarity(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    check_lengths(a, b)?;
    let (mut dot, mut aa, mut bb) = (0u128, 0u128, 0u128);
    for (&x, &y) in a.values().iter().zip(b.values()) {
        let (x, y) = (x as u64, y as u64);
        dot += (x * y) as u128;
        aa += (x * x) as u128;
        bb += (y * y) as u128;
    }
    if aa == 0 || bb == 0 {
        log::warn!("cosine similarity of a zero-norm feature vector; scoring 0");
        return Ok(0.0);
    }
    if dot == aa && aa == bb {
        return Ok(1.0);
    }
    let denom = match aa.checked_mul(bb) {
        Some(p) => (p as f64).sqrt(),
        None => (aa as f64).sqrt() * (bb as f64).sqrt(),
    };
    let cs = dot as f64 / denom;
    Ok(cs.clamp(0.0, 1.0))
}

/// Sum of absolute differences, accumulated exactly in integers.
pub fn sad(a: &FeatureVector, b: &FeatureVector) -> Result<f64> {
    check_lengths(a, b)?;
    let total: u64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum();
    Ok(total as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchScore {
    pub gallery_index: usize,
    pub subject: String,
    pub score: f64,
    pub metric: Metric,
}

/// Gallery items for one probe, best match first. Equal scores are ordered
/// by ascending gallery index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankedList {
    pub probe_id: String,
    pub metric: Metric,
    pub matches: Vec<MatchScore>,
}

impl RankedList {
    pub fn best(&self) -> &MatchScore {
        &self.matches[0]
    }

    /// 1-based rank of the first gallery item whose subject is `subject`.
    pub fn first_rank_of(&self, subject: &str) -> Option<usize> {
        self.matches
            .iter()
            .position(|m| m.subject == subject)
            .map(|i| i + 1)
    }
}

pub struct GalleryItem<'a> {
    pub subject: &'a str,
    pub feature: &'a FeatureVector,
}

pub fn rank_gallery(
    probe_id: &str,
    probe: &FeatureVector,
    gallery: &[GalleryItem<'_>],
    metric: Metric,
) -> Result<RankedList> {
    if gallery.is_empty() {
        return Err(Error::EmptyGallery);
    }
    let scores = gallery
        .par_iter()
        .map(|g| metric.score(probe, g.feature))
        .collect::<Result<Vec<f64>>>()?;
    let mut order: Vec<usize> = (0..gallery.len()).collect();
    order.sort_by(|&i, &j| metric.compare(scores[i], scores[j]).then(i.cmp(&j)));
    let matches = order
        .into_iter()
        .map(|i| MatchScore {
            gallery_index: i,
            subject: gallery[i].subject.to_string(),
            score: scores[i],
            metric,
        })
        .collect();
    Ok(RankedList {
        probe_id: probe_id.to_string(),
        metric,
        matches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fv(v: &[u32]) -> FeatureVector {
        FeatureVector::new(v.to_vec())
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&fv(&[242]), &fv(&[242])).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&fv(&[1, 0]), &fv(&[0, 1])).unwrap(), 0.0);
        let cs = cosine_similarity(&fv(&[3, 4]), &fv(&[4, 3])).unwrap();
        assert!((cs - 0.96).abs() < 1e-12, "{cs}");
        assert_eq!(cosine_similarity(&fv(&[0, 0]), &fv(&[1, 2])).unwrap(), 0.0);
        assert!(matches!(
            cosine_similarity(&fv(&[1]), &fv(&[1, 2])),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
        assert!(matches!(
            cosine_similarity(&fv(&[]), &fv(&[])),
            Err(Error::EmptyFeature)
        ));
    }

    #[test]
    fn sad_examples() {
        assert_eq!(sad(&fv(&[5, 6]), &fv(&[5, 6])).unwrap(), 0.0);
        assert_eq!(sad(&fv(&[0, 0]), &fv(&[3, 4])).unwrap(), 7.0);
        assert_eq!(sad(&fv(&[255; 9]), &fv(&[0; 9])).unwrap(), 2295.0);
        assert!(sad(&fv(&[1, 2]), &fv(&[1])).is_err());
    }

    fn gallery<'a>(subjects: &'a [String], feats: &'a [FeatureVector]) -> Vec<GalleryItem<'a>> {
        subjects
            .iter()
            .zip(feats)
            .map(|(s, f)| GalleryItem {
                subject: s,
                feature: f,
            })
            .collect()
    }

    #[test]
    fn exact_match_ranks_first() {
        let feats: Vec<FeatureVector> = (0..5u32).map(|i| fv(&[i * 10, 200 - i, 7])).collect();
        let subjects: Vec<String> = (0..5).map(|i| format!("s{i}")).collect();
        let g = gallery(&subjects, &feats);
        let r = rank_gallery("p", &feats[3], &g, Metric::Sad).unwrap();
        assert_eq!(r.best().gallery_index, 3);
        assert_eq!(r.best().score, 0.0);
        assert_eq!(r.first_rank_of("s3"), Some(1));
    }

    #[test]
    fn ties_by_gallery_index() {
        let feats = vec![fv(&[9, 9]), fv(&[1, 1]), fv(&[1, 1])];
        let subjects: Vec<String> = vec!["x".into(), "b".into(), "a".into()];
        let g = gallery(&subjects, &feats);
        for m in Metric::ALL {
            let r = rank_gallery("p", &fv(&[1, 1]), &g, m).unwrap();
            let order: Vec<usize> = r.matches.iter().map(|s| s.gallery_index).collect();
            if m == Metric::Sad {
                assert_eq!(order, vec![1, 2, 0]);
            } else {
                // all three are parallel to the probe
                assert_eq!(order, vec![0, 1, 2]);
            }
        }
    }

    #[test]
    fn empty_gallery() {
        assert!(matches!(
            rank_gallery("p", &fv(&[1]), &[], Metric::Cs),
            Err(Error::EmptyGallery)
        ));
    }

    #[test]
    fn metric_parse() {
        assert_eq!("CS".parse::<Metric>().unwrap(), Metric::Cs);
        assert_eq!("sad".parse::<Metric>().unwrap(), Metric::Sad);
        assert!("l2".parse::<Metric>().is_err());
    }

    fn vec_of(len: usize) -> impl Strategy<Value = Vec<u32>> {
        proptest::collection::vec(0u32..256, len)
    }

    proptest! {
        #[test]
        fn ranking_matches_brute_force(
            probe in vec_of(6),
            items in proptest::collection::vec(vec_of(6), 1..12),
        ) {
            let feats: Vec<FeatureVector> = items.iter().map(|v| fv(v)).collect();
            let subjects: Vec<String> = (0..feats.len()).map(|i| format!("s{}", i % 3)).collect();
            let g = gallery(&subjects, &feats);
            let probe = fv(&probe);
            for m in Metric::ALL {
                let r = rank_gallery("p", &probe, &g, m).unwrap();
                let mut seen: Vec<usize> = r.matches.iter().map(|s| s.gallery_index).collect();
                seen.sort_unstable();
                prop_assert_eq!(seen, (0..feats.len()).collect::<Vec<_>>());

                // brute force: position = number of items strictly better, or equal with smaller index
                let scores: Vec<f64> = feats.iter().map(|f| m.score(&probe, f).unwrap()).collect();
                for (pos, s) in r.matches.iter().enumerate() {
                    let i = s.gallery_index;
                    let better = (0..feats.len()).filter(|&j| {
                        let c = m.compare(scores[j], scores[i]);
                        c == Ordering::Less || (c == Ordering::Equal && j < i)
                    }).count();
                    prop_assert_eq!(pos, better);
                }
            }
        }

        #[test]
        fn cosine_scale_invariant(v in proptest::collection::vec(1u32..256, 1..20), lambda in 1u32..50) {
            let scaled: Vec<u32> = v.iter().map(|x| x * lambda).collect();
            let cs = cosine_similarity(&fv(&v), &fv(&scaled)).unwrap();
            prop_assert!((cs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn sad_is_a_metric(a in vec_of(8), b in vec_of(8), c in vec_of(8)) {
            let (a, b, c) = (fv(&a), fv(&b), fv(&c));
            prop_assert_eq!(sad(&a, &b).unwrap(), sad(&b, &a).unwrap());
            prop_assert!(sad(&a, &c).unwrap() <= sad(&a, &b).unwrap() + sad(&b, &c).unwrap());
            prop_assert_eq!(sad(&a, &a).unwrap(), 0.0);
        }

        #[test]
        fn cosine_in_unit_interval(a in vec_of(8), b in vec_of(8)) {
            let cs = cosine_similarity(&fv(&a), &fv(&b)).unwrap();
            prop_assert!((0.0..=1.0).contains(&cs));
        }
    }
}
