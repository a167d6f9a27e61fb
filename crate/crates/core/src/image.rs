//! Grayscale image container and file loading.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pnm;

/// Smallest side accepted by every 3x3 descriptor stencil.
pub const MIN_SIDE: usize = 3;

/// Row-major 8-bit grayscale image.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width.checked_mul(height) != Some(data.len()) {
            return Err(Error::Malformed(format!(
                "{}x{} image needs {} bytes, got {}",
                width,
                height,
                width.saturating_mul(height),
                data.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        GrayImage {
            width,
            height,
            data,
        }
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        GrayImage {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    /// Intensity at column `x`, row `y`. Panics when out of bounds.
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        assert!(
            x < self.width && y < self.height,
            "pixel ({x}, {y}) out of bounds"
        );
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn row(&self, y: usize) -> &[u8] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    /// 3x3 window centred on (`x`, `y`), indexed `[row][col]`.
    pub fn window(&self, x: usize, y: usize) -> [[u8; 3]; 3] {
        assert!(
            x >= 1 && y >= 1 && x + 1 < self.width && y + 1 < self.height,
            "window centre ({x}, {y}) lacks a full neighbourhood"
        );
        let mut w = [[0u8; 3]; 3];
        for (dy, row) in w.iter_mut().enumerate() {
            row.copy_from_slice(&self.row(y + dy - 1)[x - 1..x + 2]);
        }
        w
    }

    /// Applies `lut` to every pixel.
    pub fn map(&self, lut: &[u8; 256]) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| lut[v as usize]).collect(),
        }
    }

    pub(crate) fn ensure_min(&self, min_width: usize, min_height: usize) -> Result<()> {
        if self.width < min_width || self.height < min_height {
            return Err(Error::ImageTooSmall {
                width: self.width,
                height: self.height,
                min_width,
                min_height,
            });
        }
        Ok(())
    }
}

/// Loads an 8-bit single-channel image.
///
/// Netpbm files (P2, P5, single-plane P7) are recognised by their magic
/// bytes. Files with a `.raw` extension are read as headerless 8-bit
/// samples whose dimensions come from a sidecar file next to them with the
/// extension replaced by `.dims`, holding `width height [channels]`.
pub fn load_gray_image(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.first() == Some(&b'P') {
        return pnm::decode(&bytes).map_err(|e| e.with_path(path));
    }
    let is_raw = path
        .extension()
        .map(|ext| ext.eq_ignore_ascii_case("raw"))
        .unwrap_or(false);
    if is_raw {
        return load_raw(path, bytes);
    }
    Err(Error::UnsupportedFormat {
        path: path.to_path_buf(),
        reason: "expected netpbm (P2/P5/P7) or .raw with .dims sidecar".into(),
    })
}

fn load_raw(path: &Path, bytes: Vec<u8>) -> Result<GrayImage> {
    let sidecar = path.with_extension("dims");
    let text = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
    let fields: Vec<usize> = text
        .split_whitespace()
        .map(|tok| tok.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::UnsupportedFormat {
            path: sidecar.clone(),
            reason: "sidecar must hold `width height [channels]`".into(),
        })?;
    let (width, height, channels) = match fields.as_slice() {
        [w, h] => (*w, *h, 1),
        [w, h, c] => (*w, *h, *c),
        _ => {
            return Err(Error::UnsupportedFormat {
                path: sidecar,
                reason: "sidecar must hold `width height [channels]`".into(),
            })
        }
    };
    if channels != 1 {
        return Err(Error::ChannelCount {
            path: path.to_path_buf(),
            channels,
        });
    }
    GrayImage::new(width, height, bytes).map_err(|e| e.with_path(path))
}

impl Error {
    pub(crate) fn with_path(self, path: &Path) -> Error {
        match self {
            Error::Malformed(msg) => Error::UnsupportedFormat {
                path: path.to_path_buf(),
                reason: msg,
            },
            Error::ChannelCount { channels, .. } => Error::ChannelCount {
                path: path.to_path_buf(),
                channels,
            },
            Error::MaxVal { maxval, .. } => Error::MaxVal {
                path: path.to_path_buf(),
                maxval,
            },
            Error::UnsupportedFormat { reason, .. } => Error::UnsupportedFormat {
                path: path.to_path_buf(),
                reason,
            },
            other => other,
        }
    }
}
