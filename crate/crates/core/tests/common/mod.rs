#![allow(dead_code)]

use std::fs;
use std::path::Path;

use lttp_core::{pnm, GrayImage};
use rand::seq::index::sample;
use rand::Rng;

/// Uniform random image with intensities in `0..=max`.
pub fn random_image<R: Rng>(rng: &mut R, w: usize, h: usize, max: u8) -> GrayImage {
    GrayImage::from_fn(w, h, |_, _| rng.gen_range(0..=max))
}

/// Random lookup table that is strictly increasing on `0..=max`.
pub fn increasing_lut<R: Rng>(rng: &mut R, max: u8) -> [u8; 256] {
    let n = max as usize + 1;
    let mut picks: Vec<usize> = sample(rng, 256, n).into_vec();
    picks.sort_unstable();
    let mut lut = [255u8; 256];
    for (v, &p) in picks.iter().enumerate() {
        lut[v] = p as u8;
    }
    lut
}

/// Independent LTTP oracle for one window, written straight from the tree
/// definition: node letters, edge pairs, and traversal sequences.
pub fn oracle_lttp(w: [[u8; 3]; 3], variant: &str) -> u8 {
    let node = |n: char| -> i32 {
        let (r, c) = match n {
            'A' => (1, 1),
            'B' => (0, 0),
            'C' => (0, 1),
            'D' => (0, 2),
            'E' => (1, 0),
            'F' => (1, 2),
            'G' => (2, 0),
            'H' => (2, 1),
            'I' => (2, 2),
            _ => unreachable!(),
        };
        w[r][c] as i32
    };
    let seq = match variant {
        "ld" => "AB BE AC CF CG CH AD DI",
        "lb" => "AB AC AD BE CF CG CH DI",
        "rd" => "AD DI AC CH CG CF AB BE",
        "rb" => "AD AC AB DI CH CG CF BE",
        _ => unreachable!(),
    };
    let labels: Vec<u32> = seq
        .split(' ')
        .map(|e| {
            let mut ch = e.chars();
            let (p, c) = (ch.next().unwrap(), ch.next().unwrap());
            u32::from(node(p) - node(c) >= 0)
        })
        .collect();
    // first traversal edge carries weight 2^7
    labels
        .iter()
        .enumerate()
        .map(|(i, &b)| b * 2u32.pow(7 - i as u32))
        .sum::<u32>() as u8
}

pub fn write_pgm(path: &Path, img: &GrayImage) {
    fs::write(path, pnm::encode_binary(img)).unwrap();
}
