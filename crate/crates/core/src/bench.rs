//! Descriptor throughput measurement.

use std::time::Instant;

use serde::Serialize;

use crate::descriptor::Descriptor;
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::transform::Mode;

pub const MIN_REPETITIONS: usize = 10;

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub warmup: usize,
    pub repetitions: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            warmup: 3,
            repetitions: 20,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub descriptor: String,
    pub mode: Mode,
    pub width: usize,
    pub height: usize,
    /// Code sites evaluated per image.
    pub sites: usize,
    pub repetitions: usize,
    pub median_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
    /// Input megapixels per second at the median latency.
    pub mpix_per_s: f64,
    pub reference_median_ms: f64,
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn time_ms(reps: usize, mut f: impl FnMut()) -> Vec<f64> {
    let mut times: Vec<f64> = (0..reps)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64() * 1e3
        })
        .collect();
    times.sort_by(f64::total_cmp);
    times
}

/// Times `descriptor` on `img`. Fails without timing anything if the
/// optimized and reference kernels disagree.
pub fn bench_descriptor(
    img: &GrayImage,
    descriptor: Descriptor,
    mode: Mode,
    config: BenchConfig,
) -> Result<BenchRow> {
    if config.repetitions < MIN_REPETITIONS {
        return Err(Error::Invalid(format!(
            "at least {MIN_REPETITIONS} repetitions are required"
        )));
    }
    let fast = descriptor.transform(img, mode)?;
    let slow = descriptor.reference_transform(img, mode)?;
    if fast != slow {
        return Err(Error::OracleMismatch(descriptor.label()));
    }
    let sites = fast.iter().map(|t| t.codes.len()).sum();

    for _ in 0..config.warmup {
        std::hint::black_box(descriptor.transform(img, mode)?);
    }
    let times = time_ms(config.repetitions, || {
        std::hint::black_box(descriptor.transform(img, mode).expect("validated above"));
    });
    let reference = time_ms(config.repetitions.min(MIN_REPETITIONS), || {
        std::hint::black_box(
            descriptor
                .reference_transform(img, mode)
                .expect("validated above"),
        );
    });
    let med = median(&times);
    let mpix = (img.width() * img.height()) as f64 / 1e6;
    Ok(BenchRow {
        descriptor: descriptor.label(),
        mode,
        width: img.width(),
        height: img.height(),
        sites,
        repetitions: config.repetitions,
        median_ms: med,
        min_ms: times[0],
        max_ms: times[times.len() - 1],
        mpix_per_s: if med > 0.0 {
            mpix / (med / 1e3)
        } else {
            f64::INFINITY
        },
        reference_median_ms: median(&reference),
    })
}
