//! Naive per-pixel reference implementations of every descriptor.
//!
//! These build each window explicitly (an actual [`TernaryTree`] with its
//! traversal list for LTTP) and are kept deliberately simple so the fast
//! row kernels can be checked against them bit for bit.

use crate::baseline::LtpThreshold;
use crate::blocks::partition_blocks;
use crate::error::Result;
use crate::image::{GrayImage, MIN_SIDE};
use crate::lttp::{build_ternary_tree, encode_lttp, label_edges, TraversalVariant};
use crate::transform::{Mode, TransformedImage};

type Window = [[u8; 3]; 3];

/// Output width, height, and the window at every site in row-major order.
fn sites(img: &GrayImage, mode: Mode) -> Result<(usize, usize, Vec<Window>)> {
    img.ensure_min(MIN_SIDE, MIN_SIDE)?;
    match mode {
        Mode::Dense => {
            let (w, h) = (img.width() - 2, img.height() - 2);
            let mut windows = Vec::with_capacity(w * h);
            for y in 1..img.height() - 1 {
                for x in 1..img.width() - 1 {
                    windows.push(img.window(x, y));
                }
            }
            Ok((w, h, windows))
        }
        Mode::Block => {
            let grid = partition_blocks(img)?;
            let windows = grid.blocks().iter().map(|b| b.pixels).collect();
            Ok((grid.cols(), grid.rows(), windows))
        }
    }
}

fn map_sites(
    img: &GrayImage,
    mode: Mode,
    f: impl Fn(&[[u8; 3]; 3]) -> u8,
) -> Result<TransformedImage> {
    let (width, height, windows) = sites(img, mode)?;
    Ok(TransformedImage {
        width,
        height,
        codes: windows.iter().map(f).collect(),
        mode,
    })
}

fn row_major_neighbours(w: &[[u8; 3]; 3]) -> Vec<u8> {
    (0..9)
        .filter(|&i| i != 4)
        .map(|i| w[i / 3][i % 3])
        .collect()
}

fn bits_to_code(bits: &[bool]) -> u8 {
    let mut code = 0u32;
    for (q, &b) in bits.iter().rev().enumerate() {
        if b {
            code += 1 << q;
        }
    }
    code as u8
}

pub fn lttp(img: &GrayImage, variant: TraversalVariant, mode: Mode) -> Result<TransformedImage> {
    map_sites(img, mode, |w| {
        encode_lttp(&label_edges(&build_ternary_tree(w)), variant).value()
    })
}

pub fn lbp(img: &GrayImage, mode: Mode) -> Result<TransformedImage> {
    map_sites(img, mode, |w| {
        let c = w[1][1];
        let bits: Vec<bool> = row_major_neighbours(w).iter().map(|&n| n >= c).collect();
        bits_to_code(&bits)
    })
}

pub fn ltp(
    img: &GrayImage,
    threshold: LtpThreshold,
    mode: Mode,
) -> Result<(TransformedImage, TransformedImage)> {
    let t = threshold.0 as i64;
    let ternary = |w: &[[u8; 3]; 3]| -> Vec<i8> {
        let c = w[1][1] as i64;
        row_major_neighbours(w)
            .iter()
            .map(|&n| {
                let n = n as i64;
                if n >= c + t {
                    1
                } else if n <= c - t {
                    -1
                } else {
                    0
                }
            })
            .collect()
    };
    // with t = 0 a tie is both +1 and -1
    let upper = map_sites(img, mode, |w| {
        let c = w[1][1] as i64;
        let bits: Vec<bool> = if t == 0 {
            row_major_neighbours(w)
                .iter()
                .map(|&n| n as i64 >= c)
                .collect()
        } else {
            ternary(w).iter().map(|&v| v == 1).collect()
        };
        bits_to_code(&bits)
    })?;
    let lower = map_sites(img, mode, |w| {
        let c = w[1][1] as i64;
        let bits: Vec<bool> = if t == 0 {
            row_major_neighbours(w)
                .iter()
                .map(|&n| n as i64 <= c)
                .collect()
        } else {
            ternary(w).iter().map(|&v| v == -1).collect()
        };
        bits_to_code(&bits)
    })?;
    Ok((upper, lower))
}

pub fn lgs(img: &GrayImage, mode: Mode) -> Result<TransformedImage> {
    // (row, col) within the window
    const PATH: [((usize, usize), (usize, usize)); 8] = [
        ((1, 1), (0, 0)),
        ((0, 0), (2, 0)),
        ((2, 0), (1, 1)),
        ((1, 1), (1, 2)),
        ((1, 2), (0, 2)),
        ((0, 2), (2, 2)),
        ((2, 2), (1, 2)),
        ((1, 2), (1, 1)),
    ];
    map_sites(img, mode, |w| {
        let bits: Vec<bool> = PATH
            .iter()
            .map(|&((pr, pc), (qr, qc))| w[pr][pc] as i32 - w[qr][qc] as i32 >= 0)
            .collect();
        bits_to_code(&bits)
    })
}
