//! Descriptor selection by name.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baseline::{
    lbp_histogram, lbp_transform, lgs_transform, ltp_feature, ltp_transform, LtpThreshold,
};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::lttp::{lttp_transform, TraversalVariant};
use crate::reference;
use crate::transform::{FeatureVector, Mode, TransformedImage};

pub const DESCRIPTOR_NAMES: [&str; 7] = [
    "lttp-ld", "lttp-lb", "lttp-rd", "lttp-rb", "lbp", "ltp", "lgs",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Descriptor {
    Lttp { variant: TraversalVariant },
    Lbp { histogram: bool },
    Ltp { threshold: LtpThreshold },
    Lgs,
}

impl Descriptor {
    pub fn lttp_all() -> [Descriptor; 4] {
        TraversalVariant::ALL.map(|variant| Descriptor::Lttp { variant })
    }

    /// Short name as accepted on the command line.
    pub fn name(&self) -> String {
        match self {
            Descriptor::Lttp { variant } => format!("lttp-{variant}"),
            Descriptor::Lbp { histogram: false } => "lbp".into(),
            Descriptor::Lbp { histogram: true } => "lbp-hist".into(),
            Descriptor::Ltp { .. } => "ltp".into(),
            Descriptor::Lgs => "lgs".into(),
        }
    }

    /// Name plus any parameter, for report rows.
    pub fn label(&self) -> String {
        match self {
            Descriptor::Ltp { threshold } => format!("ltp(t={})", threshold.0),
            other => other.name(),
        }
    }

    /// Parses a descriptor name, using `threshold` for LTP.
    pub fn parse_with(name: &str, threshold: LtpThreshold) -> Result<Descriptor> {
        let lower = name.to_ascii_lowercase();
        if let Some(v) = lower.strip_prefix("lttp-") {
            return Ok(Descriptor::Lttp {
                variant: v.parse()?,
            });
        }
        match lower.as_str() {
            "lbp" => Ok(Descriptor::Lbp { histogram: false }),
            "lbp-hist" => Ok(Descriptor::Lbp { histogram: true }),
            "ltp" => Ok(Descriptor::Ltp { threshold }),
            "lgs" => Ok(Descriptor::Lgs),
            _ => Err(Error::Invalid(format!(
                "unknown descriptor {name:?} (expected one of {})",
                DESCRIPTOR_NAMES.join(", ")
            ))),
        }
    }

    /// Transformed planes: one for most descriptors, upper and lower for LTP.
    pub fn transform(&self, img: &GrayImage, mode: Mode) -> Result<Vec<TransformedImage>> {
        Ok(match *self {
            Descriptor::Lttp { variant } => vec![lttp_transform(img, variant, mode)?],
            Descriptor::Lbp { .. } => vec![lbp_transform(img, mode)?],
            Descriptor::Ltp { threshold } => {
                let (u, l) = ltp_transform(img, threshold, mode)?;
                vec![u, l]
            }
            Descriptor::Lgs => vec![lgs_transform(img, mode)?],
        })
    }

    /// Same as [`Descriptor::transform`] via the naive per-pixel reference.
    pub fn reference_transform(
        &self,
        img: &GrayImage,
        mode: Mode,
    ) -> Result<Vec<TransformedImage>> {
        Ok(match *self {
            Descriptor::Lttp { variant } => vec![reference::lttp(img, variant, mode)?],
            Descriptor::Lbp { .. } => vec![reference::lbp(img, mode)?],
            Descriptor::Ltp { threshold } => {
                let (u, l) = reference::ltp(img, threshold, mode)?;
                vec![u, l]
            }
            Descriptor::Lgs => vec![reference::lgs(img, mode)?],
        })
    }

    pub fn extract(&self, img: &GrayImage, mode: Mode) -> Result<FeatureVector> {
        match *self {
            Descriptor::Lttp { variant } => Ok(lttp_transform(img, variant, mode)?.flatten()),
            Descriptor::Lbp { histogram: false } => Ok(lbp_transform(img, mode)?.flatten()),
            Descriptor::Lbp { histogram: true } => lbp_histogram(img, mode),
            Descriptor::Ltp { threshold } => ltp_feature(img, threshold, mode),
            Descriptor::Lgs => Ok(lgs_transform(img, mode)?.flatten()),
        }
    }
}

impl FromStr for Descriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Descriptor::parse_with(s, LtpThreshold::default())
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
