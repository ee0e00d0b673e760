//! Pipeline driver: ingest -> overlap -> noise -> stats -> network, plus
//! the Monte Carlo `simulate` command. Every stage writes plain files
//! under the output directory and reads only manifest inputs or the
//! outputs of earlier stages.
//!
//! Exit codes: 0 success, 1 usage error, 2 input-data error, 3
//! numerical-domain error.

mod commands;
mod manifest;

use authornet::network::{GraphFormat, NoiseConvention};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use manifest::Manifest;

#[derive(Debug, Parser)]
#[command(name = "authornet", version, about = "Common-author overlap statistics and relatedness networks")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Session manifest (JSON)
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,

    /// Output directory; overrides the manifest's output_dir
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for stochastic commands; overrides the manifest's seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse every declared input file into a deduplicated author list
    Ingest,
    /// Build the pairwise comparison matrix for one domain
    Overlap {
        /// Domain to compare within
        #[arg(long)]
        domain: String,
    },
    /// Estimate the homonymy noise floor from two unrelated domains
    Noise {
        #[arg(long)]
        domain_a: String,
        #[arg(long)]
        domain_b: String,
        /// Histogram bin count
        #[arg(long, default_value_t = 50)]
        bins: usize,
        /// Histogram range as `lo,hi` (default: 0 to the sample maximum)
        #[arg(long, value_parser = parse_range)]
        hist_range: Option<(f64, f64)>,
    },
    /// Comparative statistics report (medians, means, S/N, S-N, ratio)
    Stats {
        /// Domain to report on; repeat for a two-domain report with ratio
        #[arg(long)]
        domain: Vec<String>,
        /// Noise model JSON written by `noise`
        #[arg(long)]
        noise: Option<PathBuf>,
        /// Pre-computed summary fixture JSON instead of staged samples
        #[arg(long, conflicts_with_all = ["domain", "noise"])]
        fixture: Option<PathBuf>,
    },
    /// Export the noise-corrected relatedness graph for one domain
    Network {
        #[arg(long)]
        domain: String,
        /// Noise model JSON written by `noise`
        #[arg(long)]
        noise: PathBuf,
        /// Minimum link strength for an edge to be included (`inf` allowed)
        #[arg(long, default_value = "0", value_parser = parse_threshold)]
        threshold: f64,
        /// graphml, dot, json or csv-edgelist
        #[arg(long, default_value = "json")]
        format: GraphFormat,
        /// Subtract the noise mean or the noise median
        #[arg(long, default_value = "mean", value_parser = parse_convention)]
        convention: NoiseConvention,
    },
    /// Monte Carlo check of the matching-probability approximation
    Simulate {
        #[arg(long, requires_all = ["m", "p"])]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Grid description JSON for an error-surface sweep
        #[arg(long, conflicts_with_all = ["n", "m", "p", "trials"])]
        grid: Option<PathBuf>,
    },
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected `lo,hi`")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("bad lower edge: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("bad upper edge: {e}"))?;
    Ok((lo, hi))
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
        other => other.parse().map_err(|e| format!("bad threshold: {e}")),
    }
}

fn parse_convention(s: &str) -> Result<NoiseConvention, String> {
    match s {
        "mean" => Ok(NoiseConvention::Mean),
        "median" => Ok(NoiseConvention::Median),
        other => Err(format!("unknown convention {other:?} (expected mean or median)")),
    }
}

/// A semantically bad invocation that clap alone cannot catch.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<authornet::Error>() {
        Some(authornet::Error::Domain(_))
        | Some(authornet::Error::Undefined(_))
        | Some(authornet::Error::Capacity(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(1);
        }
    }

    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<()> {
    let manifest = cli.global.manifest.as_deref().map(Manifest::load).transpose()?;
    let out = cli
        .global
        .out
        .clone()
        .or_else(|| manifest.as_ref().map(|m| m.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    let seed = cli.global.seed.or_else(|| manifest.as_ref().map(|m| m.seed)).unwrap_or(0);
    let need_manifest = || -> anyhow::Result<&Manifest> {
        manifest.as_ref().ok_or_else(|| usage("this command requires --manifest"))
    };

    match cli.command {
        Command::Ingest => commands::ingest::run(need_manifest()?, &out),
        Command::Overlap { domain } => commands::overlap::run(need_manifest()?, &out, &domain),
        Command::Noise { domain_a, domain_b, bins, hist_range } => {
            commands::noise::run(need_manifest()?, &out, &domain_a, &domain_b, bins, hist_range)
        }
        Command::Stats { domain, noise, fixture } => {
            if let Some(fixture) = fixture {
                commands::stats::run_fixture(&out, &fixture)
            } else {
                if domain.is_empty() || domain.len() > 2 {
                    return Err(usage("`stats` takes one or two --domain values (or --fixture)"));
                }
                let noise = noise.ok_or_else(|| usage("`stats` over domains requires --noise"))?;
                commands::stats::run_pipeline(need_manifest()?, &out, &domain, &noise)
            }
        }
        Command::Network { domain, noise, threshold, format, convention } => {
            commands::network::run(need_manifest()?, &out, &domain, &noise, threshold, format, convention)
        }
        Command::Simulate { n, m, p, trials, grid } => {
            if let Some(grid) = grid {
                commands::simulate::run_grid(&out, &grid, seed)
            } else {
                match (n, m, p) {
                    (Some(n), Some(m), Some(p)) => commands::simulate::run_single(&out, n, m, p, trials, seed),
                    _ => Err(usage("`simulate` needs either --grid or all of --n, --m, --p")),
                }
            }
        }
    }
}
