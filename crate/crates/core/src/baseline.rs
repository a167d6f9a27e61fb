//! Baseline local descriptors: LBP, LTP and LGS.
//!
//! All three share the LTTP tie rule (a zero difference yields bit 1) and
//! pack bits most-significant first, so they run through the same dense
//! and block site layouts and flatten the same way.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::image::GrayImage;
use crate::transform::{apply_kernel, FeatureVector, Mode, TransformedImage};

/// Dead-zone half-width for LTP.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LtpThreshold(pub u32);

impl Default for LtpThreshold {
    fn default() -> Self {
        LtpThreshold(5)
    }
}

#[inline(always)]
fn neighbours(up: &[u8], mid: &[u8], down: &[u8], x: usize) -> [u8; 8] {
    [
        up[x - 1],
        up[x],
        up[x + 1],
        mid[x - 1],
        mid[x + 1],
        down[x - 1],
        down[x],
        down[x + 1],
    ]
}

#[inline(always)]
fn pack(bits: impl Iterator<Item = bool>) -> u8 {
    bits.fold(0u8, |acc, b| (acc << 1) | b as u8)
}

/// Local binary pattern: neighbour >= centre, neighbours in row-major order.
pub fn lbp_transform(img: &GrayImage, mode: Mode) -> Result<TransformedImage> {
    apply_kernel(img, mode, |up, mid, down, x| {
        let c = mid[x];
        pack(neighbours(up, mid, down, x).into_iter().map(|n| n >= c))
    })
}

/// 256-bin histogram of LBP codes.
pub fn lbp_histogram(img: &GrayImage, mode: Mode) -> Result<FeatureVector> {
    let ti = lbp_transform(img, mode)?;
    let mut bins = vec![0u32; 256];
    for &c in &ti.codes {
        bins[c as usize] += 1;
    }
    Ok(FeatureVector::new(bins))
}

/// Local ternary pattern split into its upper (`n >= c + t`) and lower
/// (`n <= c - t`) binary planes.
pub fn ltp_transform(
    img: &GrayImage,
    threshold: LtpThreshold,
    mode: Mode,
) -> Result<(TransformedImage, TransformedImage)> {
    let t = threshold.0 as i64;
    let upper = apply_kernel(img, mode, |up, mid, down, x| {
        let c = mid[x] as i64;
        pack(
            neighbours(up, mid, down, x)
                .into_iter()
                .map(|n| n as i64 >= c + t),
        )
    })?;
    let lower = apply_kernel(img, mode, |up, mid, down, x| {
        let c = mid[x] as i64;
        pack(
            neighbours(up, mid, down, x)
                .into_iter()
                .map(|n| n as i64 <= c - t),
        )
    })?;
    Ok((upper, lower))
}

/// Upper plane followed by lower plane.
pub fn ltp_feature(img: &GrayImage, threshold: LtpThreshold, mode: Mode) -> Result<FeatureVector> {
    let (upper, lower) = ltp_transform(img, threshold, mode)?;
    Ok(upper.flatten().concat(&lower.flatten()))
}

/// Local graph structure over the six-pixel stencil
///
/// ```text
///   NW  .  NE
///   .   X  E
///   SW  .  SE
/// ```
///
/// visiting X->NW, NW->SW, SW->X, X->E, E->NE, NE->SE, SE->E, E->X. Each
/// directed edge p->q contributes `p >= q`.
pub fn lgs_transform(img: &GrayImage, mode: Mode) -> Result<TransformedImage> {
    apply_kernel(img, mode, |up, mid, down, x| {
        let centre = mid[x];
        let (nw, sw) = (up[x - 1], down[x - 1]);
        let (e, ne, se) = (mid[x + 1], up[x + 1], down[x + 1]);
        pack(
            [
                centre >= nw,
                nw >= sw,
                sw >= centre,
                centre >= e,
                e >= ne,
                ne >= se,
                se >= e,
                e >= centre,
            ]
            .into_iter(),
        )
    })
}
