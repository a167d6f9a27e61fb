use std::fs;
use std::path::{Path, PathBuf};

use lttp_core::bench::{bench_descriptor, BenchConfig, BenchRow};
use lttp_core::evaluation::EvalReport;
use lttp_core::split::{load_image_list, split_manifest};
use lttp_core::{
    load_gray_image, load_manifest, pnm, run_all, Dataset, DatasetManifest, Descriptor, GrayImage,
    IdentificationRun, LtpThreshold, Metric, Mode, RankRule, DESCRIPTOR_NAMES,
};

use crate::config::{pick, pick_list, RunConfig};
use crate::error::CliError;
use crate::{Command, DescriptorArgs, RunArgs};

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

struct DescriptorOptions {
    mode: Mode,
    threshold: LtpThreshold,
    histogram: bool,
}

impl DescriptorOptions {
    fn resolve(args: &DescriptorArgs, config: &RunConfig) -> Result<Self, CliError> {
        let mode = match pick(args.mode.clone(), config.mode.clone()) {
            Some(m) => m.parse::<Mode>()?,
            None => Mode::Dense,
        };
        let threshold = pick(args.ltp_threshold, config.ltp_threshold)
            .map(LtpThreshold)
            .unwrap_or_default();
        let histogram = args.lbp_histogram || config.lbp_histogram.unwrap_or(false);
        Ok(DescriptorOptions {
            mode,
            threshold,
            histogram,
        })
    }

    fn descriptor(&self, name: &str) -> Result<Descriptor, CliError> {
        Ok(match Descriptor::parse_with(name, self.threshold)? {
            Descriptor::Lbp { .. } => Descriptor::Lbp {
                histogram: self.histogram,
            },
            d => d,
        })
    }
}

/// Validated inputs for `evaluate` and `compare`.
struct Experiment {
    manifest: DatasetManifest,
    descriptors: Vec<Descriptor>,
    metrics: Vec<Metric>,
    ranks: Vec<usize>,
    rule: RankRule,
    mode: Mode,
}

impl Experiment {
    fn resolve(
        run: &RunArgs,
        descriptor_names: Vec<String>,
        config: &RunConfig,
    ) -> Result<Experiment, CliError> {
        let opts = DescriptorOptions::resolve(&run.opts, config)?;
        if descriptor_names.is_empty() {
            return Err(invalid("no descriptor given"));
        }
        let descriptors = descriptor_names
            .iter()
            .map(|n| opts.descriptor(n))
            .collect::<Result<Vec<_>, _>>()?;
        let metrics = pick_list(run.metrics.clone(), config.metrics.clone())
            .unwrap_or_else(|| vec!["cs".into(), "sad".into()])
            .iter()
            .map(|m| m.parse::<Metric>())
            .collect::<Result<Vec<_>, _>>()?;
        if metrics.is_empty() {
            return Err(invalid("no metric given"));
        }
        let ranks = pick_list(run.ranks.clone(), config.ranks.clone()).unwrap_or_else(|| vec![1]);
        if ranks.is_empty() || ranks.contains(&0) {
            return Err(invalid("ranks must be at least 1"));
        }
        let rule = match pick(run.rank_rule.clone(), config.rank_rule.clone()) {
            Some(r) => r.parse()?,
            None => RankRule::Cumulative,
        };
        let manifest_path = pick(run.manifest.clone(), config.manifest.clone())
            .ok_or_else(|| invalid("--manifest is required"))?;
        let manifest = load_manifest(&manifest_path)?;
        let gallery = manifest.gallery().count();
        if manifest.probes().count() == 0 {
            return Err(lttp_core::Error::EmptyProbeSet.into());
        }
        if gallery == 0 {
            return Err(lttp_core::Error::EmptyGallery.into());
        }
        if let Some(&k) = ranks.iter().find(|&&k| k > gallery) {
            return Err(lttp_core::Error::RankOutOfRange { k, gallery }.into());
        }
        Ok(Experiment {
            manifest,
            descriptors,
            metrics,
            ranks,
            rule,
            mode: opts.mode,
        })
    }

    fn run(&self) -> Result<Vec<IdentificationRun>, CliError> {
        let dataset = Dataset::load(&self.manifest)?;
        Ok(run_all(
            &dataset,
            &self.descriptors,
            &self.metrics,
            self.mode,
        )?)
    }
}

fn scores_csv(runs: &[&IdentificationRun]) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        run.write_scores(&mut buf, i == 0)?;
    }
    Ok(buf)
}

fn emit_report(report: &EvalReport, run: &RunArgs, config: &RunConfig) -> Result<(), CliError> {
    print!("{}", report.to_table());
    if let Some(path) = pick(run.out_json.clone(), config.out_json.clone()) {
        write_file(&path, report.to_json()?)?;
    }
    if let Some(path) = pick(run.out_csv.clone(), config.out_csv.clone()) {
        write_file(&path, report.to_csv()?)?;
    }
    Ok(())
}

fn transform(
    image: &Path,
    name: &str,
    opts: &DescriptorArgs,
    out: &Path,
    config: &RunConfig,
) -> Result<(), CliError> {
    let opts = DescriptorOptions::resolve(opts, config)?;
    let descriptor = opts.descriptor(name)?;
    let img = load_gray_image(image)?;
    let planes = descriptor.transform(&img, opts.mode)?;
    let outputs: Vec<PathBuf> = if planes.len() == 1 {
        vec![out.to_path_buf()]
    } else {
        let stem = out.file_stem().unwrap_or_default().to_string_lossy();
        let ext = out
            .extension()
            .map(|e| e.to_string_lossy().into_owned())
            .unwrap_or_else(|| "pgm".into());
        ["upper", "lower"]
            .iter()
            .map(|plane| out.with_file_name(format!("{stem}.{plane}.{ext}")))
            .collect()
    };
    for (plane, path) in planes.iter().zip(&outputs) {
        pnm::save_pgm(path, &plane.to_image())?;
        println!("{} {}x{}", path.display(), plane.width, plane.height);
    }
    Ok(())
}

fn extract(
    image: Option<PathBuf>,
    manifest: Option<PathBuf>,
    name: Option<String>,
    opts: &DescriptorArgs,
    out: &Path,
    config: &RunConfig,
) -> Result<(), CliError> {
    let opts = DescriptorOptions::resolve(opts, config)?;
    let name = name
        .or_else(|| config.descriptors.as_ref().and_then(|d| d.first().cloned()))
        .ok_or_else(|| invalid("--descriptor is required"))?;
    let descriptor = opts.descriptor(&name)?;
    let rows: Vec<(String, String, String, GrayImage)> =
        match (image, pick(manifest, config.manifest.clone())) {
            (Some(path), _) => {
                let img = load_gray_image(&path)?;
                vec![(
                    path.display().to_string(),
                    String::new(),
                    String::new(),
                    img,
                )]
            }
            (None, Some(path)) => {
                let manifest = load_manifest(&path)?;
                let mut failures = Vec::new();
                let mut rows = Vec::new();
                for e in manifest.entries() {
                    match load_gray_image(manifest.resolve(e)) {
                        Ok(img) => {
                            rows.push((e.path.clone(), e.subject.clone(), e.role.to_string(), img))
                        }
                        Err(err) => failures.push(err),
                    }
                }
                if !failures.is_empty() {
                    return Err(lttp_core::Error::ImagesFailed { failures }.into());
                }
                rows
            }
            (None, None) => return Err(invalid("either --image or --manifest is required")),
        };
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(["path", "subject", "role", "length", "features"])
        .map_err(csv_err)?;
    for (path, subject, role, img) in rows {
        let f = descriptor.extract(&img, opts.mode)?;
        let values: Vec<String> = f.values().iter().map(u32::to_string).collect();
        w.write_record([path, subject, role, f.len().to_string(), values.join(" ")])
            .map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    write_file(out, bytes)
}

fn evaluate(
    run: &RunArgs,
    descriptor: Option<String>,
    cmc_max: Option<usize>,
    config: &RunConfig,
) -> Result<(), CliError> {
    let names = match descriptor {
        Some(d) => vec![d],
        None => config.descriptors.clone().unwrap_or_default(),
    };
    if names.len() > 1 {
        return Err(invalid(
            "evaluate takes one descriptor; use compare for several",
        ));
    }
    let exp = Experiment::resolve(run, names, config)?;
    let cmc_max = pick(cmc_max, config.cmc_max);
    if let Some(k) = cmc_max {
        let gallery = exp.manifest.gallery().count();
        if k == 0 || k > gallery {
            return Err(lttp_core::Error::RankOutOfRange { k, gallery }.into());
        }
    }
    let runs = exp.run()?;
    let mut report = EvalReport::from_runs(&runs, &exp.ranks, exp.rule)?;
    if let Some(k) = cmc_max {
        report = report.with_cmc(&runs, k)?;
    }
    if let Some(path) = pick(run.scores.clone(), config.scores.clone()) {
        write_file(&path, scores_csv(&runs.iter().collect::<Vec<_>>())?)?;
    }
    emit_report(&report, run, config)
}

fn compare(run: &RunArgs, names: Vec<String>, config: &RunConfig) -> Result<(), CliError> {
    let names = pick_list(names, config.descriptors.clone())
        .unwrap_or_else(|| DESCRIPTOR_NAMES.iter().map(|s| s.to_string()).collect());
    let exp = Experiment::resolve(run, names, config)?;
    let runs = exp.run()?;
    let report = EvalReport::from_runs(&runs, &exp.ranks, exp.rule)?;
    if let Some(dir) = pick(run.scores.clone(), config.scores.clone()) {
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for d in &exp.descriptors {
            let mine: Vec<&IdentificationRun> =
                runs.iter().filter(|r| r.descriptor == *d).collect();
            write_file(&dir.join(format!("{}.csv", d.name())), scores_csv(&mine)?)?;
        }
    }
    emit_report(&report, run, config)
}

/// Deterministic pseudo-random texture for benchmarking without an input file.
fn synthetic_texture(size: usize) -> GrayImage {
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    GrayImage::from_fn(size, size, |_, _| {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 56) as u8
    })
}

fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = String::from(
        "descriptor,mode,width,height,sites,repetitions,median_ms,min_ms,max_ms,mpix_per_s,reference_median_ms\n",
    );
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.4},{:.4},{:.4},{:.2},{:.4}\n",
            r.descriptor,
            r.mode,
            r.width,
            r.height,
            r.sites,
            r.repetitions,
            r.median_ms,
            r.min_ms,
            r.max_ms,
            r.mpix_per_s,
            r.reference_median_ms
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn bench(
    image: Option<PathBuf>,
    size: usize,
    descriptors: Vec<String>,
    modes: Vec<String>,
    ltp_threshold: Option<u32>,
    repetitions: Option<usize>,
    warmup: Option<usize>,
    out_csv: Option<PathBuf>,
    config: &RunConfig,
) -> Result<(), CliError> {
    let threshold = LtpThreshold(pick(ltp_threshold, config.ltp_threshold).unwrap_or(5));
    let descriptors = pick_list(descriptors, config.descriptors.clone())
        .unwrap_or_else(|| DESCRIPTOR_NAMES.iter().map(|s| s.to_string()).collect())
        .iter()
        .map(|n| Descriptor::parse_with(n, threshold))
        .collect::<Result<Vec<_>, _>>()?;
    let modes = pick_list(modes, config.mode.clone().map(|m| vec![m]))
        .unwrap_or_else(|| vec!["dense".into()])
        .iter()
        .map(|m| m.parse::<Mode>())
        .collect::<Result<Vec<_>, _>>()?;
    let defaults = BenchConfig::default();
    let cfg = BenchConfig {
        warmup: pick(warmup, config.warmup).unwrap_or(defaults.warmup),
        repetitions: pick(repetitions, config.repetitions).unwrap_or(defaults.repetitions),
    };
    if cfg.repetitions < lttp_core::bench::MIN_REPETITIONS {
        return Err(invalid(format!(
            "at least {} repetitions are required",
            lttp_core::bench::MIN_REPETITIONS
        )));
    }
    let img = match image {
        Some(path) => load_gray_image(path)?,
        None => synthetic_texture(size),
    };
    let mut rows = Vec::new();
    for &d in &descriptors {
        for &m in &modes {
            rows.push(bench_descriptor(&img, d, m, cfg)?);
        }
    }
    let table = bench_table(&rows);
    print!("{table}");
    if let Some(path) = out_csv {
        write_file(&path, table)?;
    }
    Ok(())
}

fn split(
    list: &Path,
    probes_per_subject: Option<usize>,
    seed: Option<u64>,
    out: &Path,
    config: &RunConfig,
) -> Result<(), CliError> {
    let items = load_image_list(list)?;
    let base = list.parent().unwrap_or(Path::new("."));
    let out_dir = out.parent().unwrap_or(Path::new("."));
    if base != out_dir {
        log::warn!(
            "manifest paths are copied verbatim and resolve relative to {}",
            out_dir.display()
        );
    }
    let n = pick(probes_per_subject, config.probes_per_subject).unwrap_or(1);
    let seed = pick(seed, config.seed).unwrap_or(0);
    let manifest = split_manifest(&items, n, seed, base)?;
    write_file(out, manifest.to_csv()?)?;
    println!(
        "{} gallery, {} probe",
        manifest.gallery().count(),
        manifest.probes().count()
    );
    Ok(())
}

pub fn dispatch(command: Command, config: &RunConfig) -> Result<(), CliError> {
    match command {
        Command::Transform {
            image,
            descriptor,
            opts,
            out,
        } => transform(&image, &descriptor, &opts, &out, config),
        Command::Extract {
            image,
            manifest,
            descriptor,
            opts,
            out,
        } => extract(image, manifest, descriptor, &opts, &out, config),
        Command::Evaluate {
            run,
            descriptor,
            cmc_max,
        } => evaluate(&run, descriptor, cmc_max, config),
        Command::Compare { run, descriptors } => compare(&run, descriptors, config),
        Command::Bench {
            image,
            size,
            descriptors,
            modes,
            ltp_threshold,
            repetitions,
            warmup,
            out_csv,
        } => bench(
            image,
            size,
            descriptors,
            modes,
            ltp_threshold,
            repetitions,
            warmup,
            out_csv,
            config,
        ),
        Command::Split {
            list,
            probes_per_subject,
            seed,
            out,
        } => split(&list, probes_per_subject, seed, &out, config),
    }
}
