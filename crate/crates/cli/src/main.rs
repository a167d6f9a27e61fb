//! `lttp`: transform images, extract features, and run identification
//! experiments with LTTP and baseline descriptors.

mod commands;
mod config;
mod error;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "lttp",
    version,
    about = "Local ternary tree pattern descriptors and identification"
)]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// TOML config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct DescriptorArgs {
    /// Operator application: dense or block.
    #[arg(long)]
    pub mode: Option<String>,
    /// LTP dead-zone half-width.
    #[arg(long)]
    pub ltp_threshold: Option<u32>,
    /// Use a 256-bin histogram instead of flattened codes for LBP.
    #[arg(long)]
    pub lbp_histogram: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write the transformed image of one input as a netpbm file.
    Transform {
        #[arg(long)]
        image: PathBuf,
        /// lttp-ld, lttp-lb, lttp-rd, lttp-rb, lbp, ltp, or lgs.
        #[arg(long)]
        descriptor: String,
        #[command(flatten)]
        opts: DescriptorArgs,
        /// Output path; LTP writes `<stem>.upper.pgm` and `<stem>.lower.pgm`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Write feature vectors for one image or every manifest entry as CSV.
    Extract {
        #[arg(long, conflicts_with = "manifest")]
        image: Option<PathBuf>,
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long)]
        descriptor: Option<String>,
        #[command(flatten)]
        opts: DescriptorArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Identification accuracy of one descriptor over a manifest.
    Evaluate {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        descriptor: Option<String>,
        /// Also report the CMC curve up to this rank.
        #[arg(long)]
        cmc_max: Option<usize>,
    },
    /// Accuracy table across several descriptors and metrics.
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',')]
        descriptors: Vec<String>,
    },
    /// Time descriptor kernels after checking them against the reference.
    Bench {
        /// Input image; a synthetic texture is used when omitted.
        #[arg(long)]
        image: Option<PathBuf>,
        /// Side of the synthetic image.
        #[arg(long, default_value_t = 128)]
        size: usize,
        #[arg(long, value_delimiter = ',')]
        descriptors: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        modes: Vec<String>,
        #[arg(long)]
        ltp_threshold: Option<u32>,
        #[arg(long)]
        repetitions: Option<usize>,
        #[arg(long)]
        warmup: Option<usize>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Generate a seeded probe/gallery manifest from a `path,subject` list.
    Split {
        #[arg(long)]
        list: PathBuf,
        #[arg(long)]
        probes_per_subject: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug, Clone, Default)]
pub struct RunArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// cs, sad, or both comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub ranks: Vec<usize>,
    /// cumulative (default) or exact.
    #[arg(long)]
    pub rank_rule: Option<String>,
    #[command(flatten)]
    pub opts: DescriptorArgs,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Raw score matrix CSV (one file; a directory for `compare`).
    #[arg(long)]
    pub scores: Option<PathBuf>,
}

fn init_logging() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format(|buf, record| {
            let prefix = match record.level() {
                log::Level::Error => "error",
                log::Level::Warn => "warning",
                log::Level::Info => "info",
                _ => "debug",
            };
            writeln!(buf, "{prefix}: {}", record.args())
        })
        .init();
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let workers = config::pick(cli.workers, config.workers).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    pool.install(|| commands::dispatch(cli.command, &config))
}

fn main() -> ExitCode {
    init_logging();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!(
                "error: {}",
                e.render().to_string().trim_start_matches("error: ")
            );
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
