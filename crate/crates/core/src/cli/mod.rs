//! Command-line front end.
//!
//! Exit codes: 0 success, 1 an invariant check failed, 2 usage or
//! configuration error, 3 numerical failure.

pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use self::config::ExperimentConfig;
use self::manifest::RunManifest;
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ptscatter", version, about = "PT-symmetric coupled resonators: spectra, poles and quantum maps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the symmetry invariants on random instances of every class.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Unbalance gain and loss so that the checks must fail.
        #[arg(long)]
        break_symmetry: bool,
    },
    /// Complex fraction of the spectrum against the gain/loss rate.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Eigenvalues of one closed system, classified into reals and pairs.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Poles and zeros of the scattering matrix of one open system.
    Poles {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Spectrum and time evolution of the quantum map.
    Map {
        #[command(flatten)]
        common: CommonArgs,
        /// Where to write the `step,log_norm` trace; defaults to the report
        /// path with a `.trace.csv` extension.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML experiment configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output path, `-` for stdout.
    #[arg(long, default_value = "-")]
    pub out: String,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Realness tolerance in units of the level spacing.
    #[arg(long)]
    pub tol_real: Option<f64>,
    /// Pairing tolerance in units of the level spacing.
    #[arg(long)]
    pub tol_pair: Option<f64>,
    /// Replay the run recorded in this manifest (or in a report holding one).
    #[arg(long, conflicts_with_all = ["config", "seed", "tol_real", "tol_pair"])]
    pub manifest: Option<PathBuf>,
}

/// Why a run did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Invariant(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Invariant(_) => EXIT_INVARIANT,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Invariant(m) | Failure::Numerical(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Dimension(_) | Error::Domain(_) | Error::Contract(_) | Error::TooFewLevels => {
                Failure::Usage(e.to_string())
            }
            Error::NonFinite
            | Error::NoConvergence
            | Error::OnResonance { .. }
            | Error::Singular { .. }
            | Error::NoThreshold { .. } => Failure::Numerical(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &str, text: &str) -> Result<(), Failure> {
    if path == "-" {
        print!("{text}");
        return Ok(());
    }
    std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{path}: {e}")))
}

/// Config file plus flag overrides, or the config recorded in a manifest.
fn resolve(name: &str, common: &CommonArgs, break_symmetry: bool) -> Result<RunManifest, Failure> {
    if let Some(path) = &common.manifest {
        if break_symmetry {
            return Err(Failure::Usage("--break-symmetry cannot be combined with --manifest".into()));
        }
        let m = RunManifest::extract(&read(path)?).map_err(Failure::Usage)?;
        if m.command != name {
            return Err(Failure::Usage(format!(
                "manifest records a `{}` run, not `{name}`",
                m.command
            )));
        }
        m.config.validate().map_err(Failure::Usage)?;
        return Ok(RunManifest::new(name, m.config, Some(m.timestamp)));
    }
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_toml(&read(path)?)
            .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.tol_real {
        cfg.tolerances.eps_real = t;
    }
    if let Some(t) = common.tol_pair {
        cfg.tolerances.delta_pair = t;
    }
    if break_symmetry {
        cfg.verify.break_symmetry = true;
    }
    cfg.validate().map_err(Failure::Usage)?;
    Ok(RunManifest::new(name, cfg, None))
}

fn trace_path(out: &str, explicit: Option<&PathBuf>) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.clone());
    }
    if out == "-" {
        return None;
    }
    Some(Path::new(out).with_extension("trace.csv"))
}

fn execute(command: Command) -> Result<(), Failure> {
    let (name, common, break_symmetry, trace) = match &command {
        Command::Verify { common, break_symmetry } => ("verify", common, *break_symmetry, None),
        Command::Scan { common } => ("scan", common, false, None),
        Command::Spectrum { common } => ("spectrum", common, false, None),
        Command::Poles { common } => ("poles", common, false, None),
        Command::Map { common, trace } => ("map", common, false, trace.as_ref()),
    };
    let mut manifest = resolve(name, common, break_symmetry)?;
    let job = |manifest: &mut RunManifest| match name {
        "verify" => commands::verify(manifest),
        "scan" => commands::scan(manifest),
        "spectrum" => commands::spectrum(manifest),
        "poles" => commands::poles(manifest),
        _ => commands::map(manifest),
    };
    let output = match common.threads {
        None => job(&mut manifest)?,
        Some(0) => return Err(Failure::Usage("--threads must be >= 1".into())),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Failure::Usage(format!("thread pool: {e}")))?
            .install(|| job(&mut manifest))?,
    };
    write(&common.out, &output.report)?;
    if let (Some(text), Some(path)) = (&output.trace, trace_path(&common.out, trace)) {
        write(&path.to_string_lossy(), text)?;
    }
    if !output.failed.is_empty() {
        return Err(Failure::Invariant(format!("failed checks: {}", output.failed.join(", "))));
    }
    Ok(())
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.exit_code()
        }
    }
}
