//! Local ternary tree pattern (LTTP) texture descriptors with LBP, LTP and
//! LGS baselines, and a one-to-many identification pipeline built on them.
//!
//! ```
//! use lttp_core::{GrayImage, Mode, TraversalVariant, lttp_transform};
//!
//! let img = GrayImage::from_fn(3, 3, |x, y| [[9, 6, 8], [8, 9, 5], [11, 7, 10]][y][x]);
//! let ti = lttp_transform(&img, TraversalVariant::Ld, Mode::Dense).unwrap();
//! assert_eq!(ti.codes, vec![242]);
//! ```

pub mod baseline;
pub mod bench;
pub mod blocks;
pub mod descriptor;
mod error;
pub mod evaluation;
pub mod image;
pub mod lttp;
pub mod manifest;
pub mod matching;
pub mod pnm;
pub mod reference;
pub mod split;
pub mod transform;

pub use baseline::{
    lbp_histogram, lbp_transform, lgs_transform, ltp_feature, ltp_transform, LtpThreshold,
};
pub use blocks::{partition_blocks, Block, BlockGrid};
pub use descriptor::{Descriptor, DESCRIPTOR_NAMES};
pub use error::{Error, Result};
pub use evaluation::{
    cmc_curve, compare_descriptors, identify, rank_k_accuracy, run_all, Dataset, EvalReport,
    FeatureSet, IdentificationRun, RankRule, Sample,
};
pub use image::{load_gray_image, GrayImage};
pub use lttp::{
    build_ternary_tree, encode_lttp, label_edges, lttp_feature, lttp_transform, CodeWord,
    EdgeLabels, TernaryTree, TraversalVariant,
};
pub use manifest::{load_manifest, DatasetManifest, ManifestEntry, Role};
pub use matching::{
    cosine_similarity, rank_gallery, sad, GalleryItem, MatchScore, Metric, RankedList,
};
pub use transform::{FeatureVector, Mode, TransformedImage};
