mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use helfrich_core::Error;

use config::RunConfig;

/// Builds sphere and catenoid gluings, evaluates their bending energies and
/// runs the numerical checks.
#[derive(Parser, Debug)]
#[command(name = "helfrich-forge", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a validated spec.json and a watertight mesh.obj.
    Generate {
        #[command(flatten)]
        spec: SpecFlags,
        /// Ring size of the mesh grids.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Energies of a construction or fixture as JSON or CSV.
    Energy {
        #[command(flatten)]
        spec: SpecFlags,
        #[command(flatten)]
        helfrich: HelfrichFlags,
        /// unit-sphere, flattened-sphere, catenoid, tuned or genus (the default).
        #[arg(long)]
        fixture: Option<String>,
        /// Multiplicity of the sphere fixtures.
        #[arg(long)]
        theta: Option<u32>,
        /// json or csv.
        #[arg(long)]
        format: Option<String>,
    },
    /// Run a named check suite and print its report.
    Verify {
        suite: String,
        #[command(flatten)]
        common: CommonFlags,
    },
    /// Energies over a parameter grid as CSV.
    Sweep {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long = "delta", value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long = "R", value_delimiter = ',')]
        neck_lengths: Option<Vec<f64>>,
        #[arg(long = "theta-eta", value_delimiter = ',')]
        theta_etas: Option<Vec<f64>>,
        #[arg(long = "t", value_delimiter = ',')]
        ts: Option<Vec<f64>>,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Search the construction parameters for Willmore excess below eps.
    Minimize {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Hold delta at this value.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Helfrich energy of two nested spheres joined by more and more necks.
    DemoDivergence {
        #[command(flatten)]
        common: CommonFlags,
        #[command(flatten)]
        helfrich: HelfrichFlags,
        #[arg(long, value_delimiter = ',')]
        genus: Option<Vec<u32>>,
    },
    /// Distance of the tuned family from the multiply covered sphere.
    Profile {
        #[command(flatten)]
        common: CommonFlags,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        g: Option<u32>,
        #[arg(long = "delta", value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
}

#[derive(Args, Debug, Default)]
struct CommonFlags {
    /// JSON file of parameters; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug, Default)]
struct SpecFlags {
    #[command(flatten)]
    common: CommonFlags,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    g: Option<u32>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long = "R")]
    neck_length: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Neck scale as a fraction of its upper bound.
    #[arg(long)]
    theta_eta: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct HelfrichFlags {
    #[arg(long = "chiH", allow_hyphen_values = true)]
    chi_h: Option<f64>,
    #[arg(long = "chiK", allow_hyphen_values = true)]
    chi_k: Option<f64>,
    #[arg(long = "H0", allow_hyphen_values = true)]
    h0: Option<f64>,
}

impl CommonFlags {
    fn config(&self) -> RunConfig {
        RunConfig {
            out: self.out.clone(),
            tol: self.tol,
            seed: self.seed,
            ..Default::default()
        }
    }
}

impl SpecFlags {
    fn config(&self) -> RunConfig {
        RunConfig {
            m: self.m,
            g: self.g,
            delta: self.delta,
            neck_length: self.neck_length,
            eta: self.eta,
            theta_eta: self.theta_eta,
            rho: self.rho,
            t: self.t,
            alpha: self.alpha,
            ..self.common.config()
        }
    }
}

impl HelfrichFlags {
    fn apply(&self, c: RunConfig) -> RunConfig {
        RunConfig {
            chi_h: self.chi_h,
            chi_k: self.chi_k,
            h0: self.h0,
            ..c
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Verification(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    /// 0 ok, 1 failed verification, 2 invalid input, 3 numerical failure,
    /// 4 file or stream failure.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidSpec(_)
                | Error::GluingConflict(_)
                | Error::SupportTooLarge(_)
                | Error::InfeasibleProfile(_)
                | Error::InvalidArgument(_) => 2,
                Error::Json(j) if !j.is_io() => 2,
                Error::Io(_) | Error::Json(_) | Error::Csv(_) => 4,
                _ => 3,
            },
        }
    }
}

fn load(flags: RunConfig, path: &Option<PathBuf>) -> Result<RunConfig, CliError> {
    Ok(match path {
        Some(p) => flags.over(RunConfig::load(p)?),
        None => flags,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Generate { spec, resolution } => {
            let c = load(
                RunConfig {
                    resolution,
                    ..spec.config()
                },
                &spec.common.config,
            )?;
            commands::generate(&c)
        }
        Cmd::Energy {
            spec,
            helfrich,
            fixture,
            theta,
            format,
        } => {
            let flags = RunConfig {
                fixture,
                theta,
                format,
                ..helfrich.apply(spec.config())
            };
            commands::energy(&load(flags, &spec.common.config)?)
        }
        Cmd::Verify { suite, common } => {
            commands::verify(&suite, &load(common.config(), &common.config)?)
        }
        Cmd::Sweep {
            common,
            m,
            g,
            deltas,
            neck_lengths,
            theta_etas,
            ts,
            alpha,
        } => {
            let flags = RunConfig {
                m,
                g,
                deltas,
                neck_lengths,
                theta_etas,
                ts,
                alpha,
                ..common.config()
            };
            commands::sweep(&load(flags, &common.config)?)
        }
        Cmd::Minimize {
            common,
            m,
            g,
            eps,
            budget,
            delta,
            alpha,
            restarts,
        } => {
            let flags = RunConfig {
                m,
                g,
                eps,
                budget,
                delta,
                alpha,
                restarts,
                ..common.config()
            };
            commands::minimize(&load(flags, &common.config)?)
        }
        Cmd::DemoDivergence {
            common,
            helfrich,
            genus,
        } => {
            let flags = RunConfig {
                genus,
                ..helfrich.apply(common.config())
            };
            commands::demo_divergence(&load(flags, &common.config)?)
        }
        Cmd::Profile {
            common,
            m,
            g,
            deltas,
        } => {
            let flags = RunConfig {
                m,
                g,
                deltas,
                ..common.config()
            };
            commands::profile(&load(flags, &common.config)?)
        }
    }
}

fn threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("HELFRICH_FORGE_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "HELFRICH_FORGE_THREADS={v:?} is not a positive integer"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match threads().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let CliError::Core(Error::InvalidSpec(list) | Error::GluingConflict(list)) = &e {
                eprintln!(
                    "error: {}",
                    match e {
                        CliError::Core(Error::InvalidSpec(_)) => "invalid spec",
                        _ => "gluing conflict",
                    }
                );
                for c in list {
                    eprintln!("  violated: {c}");
                }
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
