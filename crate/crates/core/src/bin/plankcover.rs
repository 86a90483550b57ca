use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use plankcover::cli::commands::{
    cmd_cover, cmd_export_obj, cmd_gen, cmd_sweep, cmd_verify, GenRequest,
};
use plankcover::cli::CliError;
use plankcover::engine::{EngineConfig, Mode};
use plankcover::instances::{AdversarialParams, DEFAULT_REJECTION_BUDGET};

#[derive(Parser)]
#[command(
    name = "plankcover",
    about = "Non-dissective plank coverings of the unit ball"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        generator: Gen,
    },
    /// Cover the ball with an instance and write the certificate.
    Cover {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "chunked")]
        mode: Mode,
        #[arg(long, default_value_t = 1e-9)]
        tol_support: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol_empty: f64,
        #[arg(long)]
        max_planks: Option<usize>,
        /// Attach Vol K and Vol B(K) estimates to the step records.
        #[arg(long)]
        record_volumes: bool,
        /// Samples per volume estimate.
        #[arg(long, default_value_t = 20_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a certificate structurally and by sampling.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run an exponent sweep from a JSON config and write CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Write 0 in the wall_time_s column.
        #[arg(long)]
        omit_timing: bool,
    },
    /// Export placed slab boundaries as OBJ quads.
    ExportObj {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        certificate: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Gen {
    Random {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    Parallel {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        /// Normal as x,y,z.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.0, 0.0, 1.0])]
        normal: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    Adversarial {
        #[arg(long)]
        eps: f64,
        /// Cap angular radius in radians.
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
        cap: f64,
        /// Separation factor: minimum angle is sep · eps^(2/3).
        #[arg(long, default_value_t = 2.0)]
        sep: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_REJECTION_BUDGET)]
        budget: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { generator } => {
            let (req, out) = match generator {
                Gen::Random { k, eps, seed, out } => (
                    GenRequest::Random {
                        k,
                        epsilon: eps,
                        seed,
                    },
                    out,
                ),
                Gen::Parallel {
                    k,
                    eps,
                    normal,
                    out,
                } => {
                    let normal = [normal[0], normal[1], normal[2]];
                    (
                        GenRequest::Parallel {
                            k,
                            epsilon: eps,
                            normal,
                        },
                        out,
                    )
                }
                Gen::Adversarial {
                    eps,
                    cap,
                    sep,
                    seed,
                    budget,
                    out,
                } => {
                    let mut p = AdversarialParams::new(eps, cap, sep, seed);
                    p.rejection_budget = budget;
                    (GenRequest::Adversarial(p), out)
                }
            };
            let inst = cmd_gen(&req, &out)?;
            println!("wrote {} planks to {}", inst.len(), out.display());
        }
        Command::Cover {
            instance,
            mode,
            tol_support,
            tol_empty,
            max_planks,
            record_volumes,
            samples,
            seed,
            out,
        } => {
            let config = EngineConfig {
                mode,
                tol_support,
                tol_empty,
                max_planks: max_planks.unwrap_or(usize::MAX),
                record_volumes,
                volume_samples: samples,
                volume_seed: seed,
                ..EngineConfig::default()
            };
            let cert = cmd_cover(&instance, &config, &out)?;
            println!("covered {} planks_used {}", cert.covered, cert.planks_used);
        }
        Command::Verify {
            instance,
            certificate,
            samples,
            seed,
        } => {
            cmd_verify(&instance, &certificate, samples, seed)?;
        }
        Command::Sweep {
            config,
            out,
            workers,
            omit_timing,
        } => {
            cmd_sweep(&config, &out, workers, omit_timing)?;
        }
        Command::ExportObj {
            instance,
            certificate,
            out,
        } => {
            cmd_export_obj(&instance, &certificate, &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
