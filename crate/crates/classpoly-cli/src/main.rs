//! `classpoly`: class polynomials of nonholomorphic modular functions.
//!
//! Exit codes: 0 success, 1 generic/verification failure, 2 bad input,
//! 3 special discriminant, 4 prime pool exhausted, 5 rounding failure,
//! 6 internal per-prime rejection escaped.

mod cache;
mod commands;
mod format;
mod verify;

use cache::Cache;
use clap::{Parser, Subcommand};
use classpoly::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "classpoly",
    version,
    about = "Class polynomials of nonholomorphic modular functions via CRT on isogeny volcanoes"
)]
struct Cli {
    /// Directory for cached results (also: CLASSPOLY_CACHE_DIR)
    #[arg(long, global = true, env = "CLASSPOLY_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Number of worker threads for per-prime parallelism (also: CLASSPOLY_JOBS)
    #[arg(long, global = true, env = "CLASSPOLY_JOBS")]
    jobs: Option<usize>,

    /// Safety factor applied to coefficient height bounds
    #[arg(long, global = true)]
    safety: Option<f64>,

    /// Seed for randomized sanity checks in verify-paper
    #[arg(long, global = true, default_value_t = 0xC1A55)]
    seed: u64,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Hilbert class polynomial H_D(x)
    Hilbert {
        /// Negative discriminant (D ≡ 0 or 1 mod 4)
        d: i64,
    },
    /// Classical modular polynomial Φ_m(X, Y)
    Modpoly {
        /// Level m ≥ 2
        m: u64,
        /// Reduce the result modulo a prime
        #[arg(long = "mod")]
        modp: Option<u64>,
    },
    /// Class polynomial of the γ function (Taylor-coefficient route)
    ClasspolyGamma {
        /// Negative discriminant, D ≠ -3s², D < -4
        d: i64,
    },
    /// Class polynomial of a good modular function described by a spec file
    ClasspolyGood {
        /// Spec file: `A <n>: num=<c0,c1,..> den=<c0,..>` lines plus c1=/c2=
        specfile: PathBuf,
        /// Negative discriminant
        d: i64,
    },
    /// Partition class polynomial H_n^part(x)
    PartitionPoly {
        /// Index n ≥ 1
        n: u64,
    },
    /// Partition number p(n) from the trace of H_n^part(x)
    Pn {
        /// Index n ≥ 1
        n: u64,
        /// Cross-check against the pentagonal-number recurrence
        #[arg(long)]
        check_oracle: bool,
    },
    /// Recompute the published worked example and value tables
    VerifyPaper {
        /// Run only rows whose label contains this substring
        #[arg(long)]
        only: Option<String>,
    },
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::BadInput(_) => 2,
        Error::SpecialDiscriminant(_) => 3,
        Error::PrimePoolExhausted(_) => 4,
        Error::RoundingFailure(_) => 5,
        Error::PrimeRejected(_) => 6,
    }
}

fn run(cli: &Cli) -> Result<Option<String>, Error> {
    let cache = Cache::new(cli.cache_dir.clone())
        .map_err(|e| Error::BadInput(format!("cache dir: {e}")))?;
    match &cli.cmd {
        Cmd::Hilbert { d } => commands::hilbert(*d, &cache).map(Some),
        Cmd::Modpoly { m, modp } => {
            commands::modpoly_cmd(*m, *modp, cli.safety, &cache).map(Some)
        }
        Cmd::ClasspolyGamma { d } => commands::classpoly_gamma(*d, cli.safety).map(Some),
        Cmd::ClasspolyGood { specfile, d } => {
            let text = std::fs::read_to_string(specfile)
                .map_err(|e| Error::BadInput(format!("cannot read {}: {e}", specfile.display())))?;
            commands::classpoly_good(&text, *d, cli.safety).map(Some)
        }
        Cmd::PartitionPoly { n } => commands::partition_poly(*n, cli.safety, &cache).map(Some),
        Cmd::Pn { n, check_oracle } => {
            commands::pn(*n, *check_oracle, cli.safety, &cache).map(Some)
        }
        Cmd::VerifyPaper { only } => {
            let (_, failed) = verify::run(only.as_deref(), cli.seed, cli.safety);
            if failed > 0 {
                Err(Error::RoundingFailure(format!("{failed} verification rows failed")))
            } else {
                Ok(None)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    match run(&cli) {
        Ok(Some(payload)) => {
            print!("{payload}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            if matches!(cli.cmd, Cmd::VerifyPaper { .. }) {
                // row failures were already printed
                ExitCode::from(1)
            } else {
                eprintln!("error: {}: {e}", e.category());
                ExitCode::from(exit_code_for(&e))
            }
        }
    }
}
