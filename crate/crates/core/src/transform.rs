//! Shared plumbing for 3x3 descriptor operators: site layout (dense or
//! block), the transformed-image container, and flattened feature vectors.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocks::{grid_dims, BLOCK_SIZE};
use crate::error::{Error, Result};
use crate::image::{GrayImage, MIN_SIDE};

/// Which pixels an operator is applied to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Every interior pixel; output is (w-2) x (h-2).
    #[default]
    Dense,
    /// Centre of each non-overlapping 3x3 block; output is floor(w/3) x floor(h/3).
    Block,
}

impl Mode {
    pub fn output_dims(self, width: usize, height: usize) -> (usize, usize) {
        match self {
            Mode::Dense => (width.saturating_sub(2), height.saturating_sub(2)),
            Mode::Block => {
                let (rows, cols) = grid_dims(width, height);
                (cols, rows)
            }
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Mode::Dense),
            "block" => Ok(Mode::Block),
            other => Err(Error::Invalid(format!(
                "unknown mode {other:?} (expected dense or block)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Dense => "dense",
            Mode::Block => "block",
        })
    }
}

/// Grid of 8-bit descriptor codes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransformedImage {
    pub width: usize,
    pub height: usize,
    pub codes: Vec<u8>,
    pub mode: Mode,
}

impl TransformedImage {
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.codes[y * self.width + x]
    }

    /// Codes as intensities, for writing out as a netpbm image.
    pub fn to_image(&self) -> GrayImage {
        GrayImage::new(self.width, self.height, self.codes.clone())
            .expect("transformed image dimensions are consistent")
    }

    /// Row-major flattening.
    pub fn flatten(&self) -> FeatureVector {
        FeatureVector::from_codes(&self.codes)
    }
}

/// Flattened descriptor output. Values are non-negative integers: raw
/// codes for flattened transforms, bin counts for histograms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeatureVector {
    values: Vec<u32>,
}

impl FeatureVector {
    pub fn new(values: Vec<u32>) -> Self {
        FeatureVector { values }
    }

    pub fn from_codes(codes: &[u8]) -> Self {
        FeatureVector {
            values: codes.iter().map(|&c| c as u32).collect(),
        }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|&v| v as f64).collect()
    }

    /// Concatenates `other` after `self`.
    pub fn concat(mut self, other: &FeatureVector) -> FeatureVector {
        self.values.extend_from_slice(&other.values);
        self
    }
}

impl From<Vec<u32>> for FeatureVector {
    fn from(values: Vec<u32>) -> Self {
        FeatureVector::new(values)
    }
}

/// Runs a 3x3 kernel over the sites selected by `mode`.
///
/// The kernel receives the rows above, at, and below the centre plus the
/// centre column. Rows of output are computed in parallel; results do not
/// depend on the schedule.
pub(crate) fn apply_kernel<K>(img: &GrayImage, mode: Mode, kernel: K) -> Result<TransformedImage>
where
    K: Fn(&[u8], &[u8], &[u8], usize) -> u8 + Sync,
{
    img.ensure_min(MIN_SIDE, MIN_SIDE)?;
    let (out_w, out_h) = mode.output_dims(img.width(), img.height());
    let mut codes = vec![0u8; out_w * out_h];
    let (step, first) = match mode {
        Mode::Dense => (1, 1),
        Mode::Block => (BLOCK_SIZE, 1),
    };
    codes
        .par_chunks_mut(out_w)
        .enumerate()
        .for_each(|(oy, out_row)| {
            let y = first + oy * step;
            let (up, mid, down) = (img.row(y - 1), img.row(y), img.row(y + 1));
            for (ox, slot) in out_row.iter_mut().enumerate() {
                *slot = kernel(up, mid, down, first + ox * step);
            }
        });
    Ok(TransformedImage {
        width: out_w,
        height: out_h,
        codes,
        mode,
    })
}
