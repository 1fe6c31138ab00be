//! Command-line front end over the library flows: beam design, sampling
//! diagnostics, single-trial estimation, and Monte-Carlo sweeps. Each
//! subcommand reads the same flat key=value experiment file (defaults
//! apply when --config is omitted) and writes CSV or JSON.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sectorcs::config::{load_config, FileConfig};
use sectorcs::eval::{design_base_beams, run_experiment, run_single, Scheme};
use sectorcs::output;
use sectorcs::sampling::{self, pcs_shifts, rcs_shifts, psf_report, ShiftScheme};
use sectorcs::Sector;

#[derive(Parser)]
#[command(
    name = "sectorcs",
    version,
    about = "In-sector channel estimation with shifted constant-envelope beams"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// Flat key=value experiment file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the file's RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the file's sampling scheme (pcs, rcs, greedy, genie).
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<Scheme>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for the Monte-Carlo passes; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_scheme(s: &str) -> Result<Scheme, String> {
    Scheme::from_str(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Design the per-sector base beams and print masks, beams, and PAPR.
    Design(Common),
    /// Point spread function of one shift set, or a coherence CDF over
    /// many draws.
    Psf {
        #[command(flatten)]
        common: Common,
        /// Shift-set draws; 1 prints the full PSF, more prints the
        /// sorted coherence samples.
        #[arg(long, default_value_t = 1)]
        draws: usize,
    },
    /// Rerun one trial of the configured experiment in detail.
    Estimate {
        #[command(flatten)]
        common: Common,
        /// Trial index within the experiment.
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Monte-Carlo sweep over the configured m and snr_db grids.
    Sweep(Common),
}

fn file_config(common: &Common) -> Result<FileConfig, sectorcs::Error> {
    let mut config = match &common.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(scheme) = common.scheme {
        config.scheme = scheme;
    }
    Ok(config)
}

fn emit(common: &Common, text: String) -> std::io::Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn render_json(value: serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(&value).expect("reports serialize");
    text.push('\n');
    text
}

fn run(cli: Cli) -> Result<(), String> {
    let common = match &cli.command {
        Command::Design(c) | Command::Sweep(c) => c,
        Command::Psf { common, .. } | Command::Estimate { common, .. } => common,
    };
    if let Some(threads) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let file = file_config(common).map_err(|e| e.to_string())?;

    let text = match &cli.command {
        Command::Design(common) => {
            let experiment = file.to_experiment_config().map_err(|e| e.to_string())?;
            let bases = design_base_beams(&experiment).map_err(|e| e.to_string())?;
            match common.format {
                Format::Csv => output::design_csv(&bases),
                Format::Json => render_json(output::design_json(&bases)),
            }
        }
        Command::Psf { common, draws } => {
            let experiment = file.to_experiment_config().map_err(|e| e.to_string())?;
            experiment.validate().map_err(|e| e.to_string())?;
            let scheme = match experiment.scheme {
                Scheme::Pcs => ShiftScheme::Pcs,
                Scheme::Rcs => ShiftScheme::Rcs,
                other => {
                    return Err(format!(
                        "psf diagnostics apply to shift schemes, not {other}"
                    ))
                }
            };
            let n_sec = experiment.n_sec();
            let sector = Sector::new(0, n_sec - 1, experiment.n).map_err(|e| e.to_string())?;
            if *draws <= 1 {
                let mut rng = ChaCha8Rng::seed_from_u64(file.seed);
                let shifts = match scheme {
                    ShiftScheme::Pcs => pcs_shifts(experiment.n, n_sec, experiment.m, &mut rng),
                    ShiftScheme::Rcs => rcs_shifts(experiment.n, experiment.m, &mut rng),
                }
                .map_err(|e| e.to_string())?;
                let report = psf_report(&shifts, &sector);
                match common.format {
                    Format::Csv => output::psf_csv(&report),
                    Format::Json => {
                        render_json(output::psf_json(experiment.scheme, &shifts, &report))
                    }
                }
            } else {
                let mu = sampling::coherence_cdf(
                    scheme,
                    experiment.n,
                    n_sec,
                    experiment.m,
                    *draws,
                    file.seed,
                )
                .map_err(|e| e.to_string())?;
                match common.format {
                    Format::Csv => output::coherence_cdf_csv(
                        experiment.scheme,
                        experiment.n,
                        n_sec,
                        experiment.m,
                        &mu,
                    ),
                    Format::Json => render_json(output::coherence_cdf_json(
                        experiment.scheme,
                        experiment.n,
                        n_sec,
                        experiment.m,
                        &mu,
                    )),
                }
            }
        }
        Command::Estimate { common, trial } => {
            let experiment = file.to_experiment_config().map_err(|e| e.to_string())?;
            let out = run_single(&experiment, *trial).map_err(|e| e.to_string())?;
            match common.format {
                Format::Csv => output::estimate_csv(experiment.scheme, &out),
                Format::Json => render_json(output::estimate_json(experiment.scheme, &out)),
            }
        }
        Command::Sweep(common) => {
            let mut summaries = Vec::new();
            for experiment in file.sweep_grid() {
                let (summary, _) = run_experiment(&experiment).map_err(|e| e.to_string())?;
                summaries.push(summary);
            }
            match common.format {
                Format::Csv => output::sweep_csv(&summaries),
                Format::Json => render_json(output::sweep_json(&summaries)),
            }
        }
    };
    emit(common, text).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
