//! Netpbm grayscale codec (P2, P5, and single-plane P7).
//!
//! Only 8-bit single-channel images with maxval 255 are accepted. Color
//! formats are recognised so they can be rejected with a channel-count
//! error instead of a generic parse failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::GrayImage;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Malformed(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Malformed(format!("{what} out of range")))
    }
}

fn check_maxval(maxval: u32) -> Result<()> {
    if maxval != 255 {
        return Err(Error::MaxVal {
            path: PathBuf::new(),
            maxval,
        });
    }
    Ok(())
}

/// Decodes a netpbm byte stream into a grayscale image.
pub fn decode(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || bytes[0] != b'P' {
        return Err(Error::Malformed("missing netpbm magic".into()));
    }
    match bytes[1] {
        b'2' | b'5' => {}
        b'3' | b'6' => {
            return Err(Error::ChannelCount {
                path: PathBuf::new(),
                channels: 3,
            })
        }
        b'7' => return decode_pam(bytes),
        b'1' | b'4' => {
            return Err(Error::Malformed(
                "bitmap (P1/P4) images are not 8-bit grayscale".into(),
            ))
        }
        other => {
            return Err(Error::Malformed(format!(
                "unknown netpbm magic P{}",
                other as char
            )))
        }
    }
    let ascii = bytes[1] == b'2';
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    check_maxval(maxval)?;
    let len = width
        .checked_mul(height)
        .ok_or_else(|| Error::Malformed("dimensions overflow".into()))?;

    let data = if ascii {
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            let v = cur.number("sample")?;
            if v > 255 {
                return Err(Error::Malformed(format!("sample {v} exceeds maxval")));
            }
            data.push(v as u8);
        }
        data
    } else {
        // exactly one whitespace byte separates the header from the raster
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(Error::Malformed("missing raster separator".into())),
        }
        let raster = &bytes[cur.pos..];
        if raster.len() < len {
            return Err(Error::Malformed(format!(
                "raster truncated: {} of {} bytes",
                raster.len(),
                len
            )));
        }
        raster[..len].to_vec()
    };
    GrayImage::new(width, height, data)
}

fn decode_pam(bytes: &[u8]) -> Result<GrayImage> {
    let mut width = None;
    let mut height = None;
    let mut depth = None;
    let mut maxval = None;
    let mut pos = 2;
    loop {
        let end = bytes[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .map(|i| pos + i)
            .ok_or_else(|| Error::Malformed("PAM header missing ENDHDR".into()))?;
        let line = std::str::from_utf8(&bytes[pos..end])
            .map_err(|_| Error::Malformed("PAM header is not text".into()))?
            .trim();
        pos = end + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let value = parts.next().and_then(|v| v.parse::<u32>().ok());
        match key {
            "ENDHDR" => break,
            "WIDTH" => width = value,
            "HEIGHT" => height = value,
            "DEPTH" => depth = value,
            "MAXVAL" => maxval = value,
            _ => {}
        }
    }
    let (Some(width), Some(height), Some(depth), Some(maxval)) = (width, height, depth, maxval)
    else {
        return Err(Error::Malformed("incomplete PAM header".into()));
    };
    if depth != 1 {
        return Err(Error::ChannelCount {
            path: PathBuf::new(),
            channels: depth as usize,
        });
    }
    check_maxval(maxval)?;
    let len = width as usize * height as usize;
    if bytes.len() - pos < len {
        return Err(Error::Malformed("raster truncated".into()));
    }
    GrayImage::new(
        width as usize,
        height as usize,
        bytes[pos..pos + len].to_vec(),
    )
}

/// Binary (P5) encoding with the minimal header `P5\n<w> <h>\n255\n`.
pub fn encode_binary(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// ASCII (P2) encoding, one image row per line.
pub fn encode_ascii(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P2\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    for y in 0..img.height() {
        let line: Vec<String> = img.row(y).iter().map(|v| v.to_string()).collect();
        out.extend_from_slice(line.join(" ").as_bytes());
        out.push(b'\n');
    }
    out
}

pub fn save_pgm(path: impl AsRef<Path>, img: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&encode_binary(img))
        .map_err(|e| Error::io(path, e))
}
