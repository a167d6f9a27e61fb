//! Non-overlapping 3x3 tiling of an image.

use crate::error::Result;
use crate::image::{GrayImage, MIN_SIDE};

pub const BLOCK_SIZE: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    /// Top-left corner as (row, col).
    pub origin: (usize, usize),
    pub pixels: [[u8; 3]; 3],
}

impl Block {
    /// Centre pixel coordinates as (row, col).
    pub fn center(&self) -> (usize, usize) {
        (self.origin.0 + 1, self.origin.1 + 1)
    }
}

/// Row-major grid of 3x3 blocks. Trailing rows and columns that cannot
/// fill a whole block are dropped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGrid {
    rows: usize,
    cols: usize,
    blocks: Vec<Block>,
}

impl BlockGrid {
    pub fn block_size(&self) -> usize {
        BLOCK_SIZE
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn get(&self, row: usize, col: usize) -> &Block {
        &self.blocks[row * self.cols + col]
    }
}

pub(crate) fn grid_dims(width: usize, height: usize) -> (usize, usize) {
    (height / BLOCK_SIZE, width / BLOCK_SIZE)
}

pub fn partition_blocks(img: &GrayImage) -> Result<BlockGrid> {
    img.ensure_min(MIN_SIDE, MIN_SIDE)?;
    let (rows, cols) = grid_dims(img.width(), img.height());
    let mut blocks = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let (y, x) = (r * BLOCK_SIZE, c * BLOCK_SIZE);
            blocks.push(Block {
                origin: (y, x),
                pixels: img.window(x + 1, y + 1),
            });
        }
    }
    Ok(BlockGrid { rows, cols, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn origins(g: &BlockGrid) -> Vec<(usize, usize)> {
        g.blocks().iter().map(|b| b.origin).collect()
    }

    #[test]
    fn six_by_six() {
        let g = partition_blocks(&GrayImage::filled(6, 6, 0)).unwrap();
        assert_eq!(origins(&g), vec![(0, 0), (0, 3), (3, 0), (3, 3)]);
    }

    #[test]
    fn seven_by_eight_drops_remainder() {
        let g = partition_blocks(&GrayImage::filled(7, 8, 0)).unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 2));
        assert_eq!(origins(&g), vec![(0, 0), (0, 3), (3, 0), (3, 3)]);
    }

    #[test]
    fn three_by_three() {
        let img = GrayImage::from_fn(3, 3, |x, y| (y * 3 + x) as u8);
        let g = partition_blocks(&img).unwrap();
        assert_eq!(origins(&g), vec![(0, 0)]);
        assert_eq!(g.get(0, 0).pixels, [[0, 1, 2], [3, 4, 5], [6, 7, 8]]);
        assert_eq!(g.get(0, 0).center(), (1, 1));
    }

    #[test]
    fn too_small() {
        assert!(partition_blocks(&GrayImage::filled(2, 5, 0)).is_err());
        assert!(partition_blocks(&GrayImage::filled(5, 2, 0)).is_err());
    }

    proptest! {
        #[test]
        fn coverage(w in 3usize..20, h in 3usize..20) {
            let g = partition_blocks(&GrayImage::filled(w, h, 0)).unwrap();
            let mut seen = vec![0u8; w * h];
            for b in g.blocks() {
                for dy in 0..3 {
                    for dx in 0..3 {
                        seen[(b.origin.0 + dy) * w + b.origin.1 + dx] += 1;
                    }
                }
            }
            prop_assert!(seen.iter().all(|&n| n <= 1));
            let covered = seen.iter().filter(|&&n| n == 1).count();
            prop_assert_eq!(covered, 9 * (h / 3) * (w / 3));
        }
    }
}
