use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use super::config::{parse_grid, parse_pair, parse_range, parse_space, Command, NormInput, RunConfig};
use super::run::{emit, exit_code, run};
use crate::error::{Error, Result};
use crate::scalar::parse_rational;

#[derive(Debug, Parser)]
#[command(name = "alphamod", version, about = "Sharp embeddings between alpha-modulation spaces")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Source space, e.g. "p=2,q=inf,s=1/2,alpha=1/2,n=1"
    #[arg(long, global = true)]
    source: Option<String>,
    /// Target space, same syntax as --source
    #[arg(long, global = true)]
    target: Option<String>,
    /// Grid as "N,L": samples per axis and period
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Grid dimension when no space fixes it
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Covering constants "c,C" in units of the window scale
    #[arg(long, global = true)]
    alpha_constants: Option<String>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file (standard output otherwise)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// json, csv or text
    #[arg(long, global = true, default_value = "json")]
    format: String,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Decide whether the source embeds into the target
    Decide,
    /// Index functions A and R with their binding terms and regions
    Index,
    /// Build and verify a partition of unity on a grid
    Covering {
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        k_max: Option<i64>,
        /// Write the sampled partition as a binary dump
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Norm of a grid function in the source space
    Normcalc {
        /// Grid function file (.csv or binary)
        #[arg(long, conflicts_with = "builtin")]
        input: Option<PathBuf>,
        /// gaussian, bump or tone
        #[arg(long)]
        builtin: Option<String>,
    },
    /// Growth rates of localized operator norms against the index function
    VerifyAsymptotics {
        /// Scale range "lo..hi"
        #[arg(long)]
        j_range: Option<String>,
        /// Monte Carlo trials per scale
        #[arg(long, default_value_t = 0)]
        trials: usize,
    },
    /// Measured multiplier growth and dilation scaling against the verdict
    VerifyEmbedding {
        /// Truncation exponents "lo..hi" (K = 2^m)
        #[arg(long)]
        levels: Option<String>,
    },
}

fn config_of(cli: Cli) -> Result<RunConfig> {
    let c = cli.common;
    let command = match &cli.command {
        Sub::Decide => Command::Decide,
        Sub::Index => Command::Index,
        Sub::Covering { .. } => Command::Covering,
        Sub::Normcalc { .. } => Command::Normcalc,
        Sub::VerifyAsymptotics { .. } => Command::VerifyAsymptotics,
        Sub::VerifyEmbedding { .. } => Command::VerifyEmbedding,
    };
    let mut cfg = RunConfig::new(command);
    cfg.source = c.source.as_deref().map(parse_space).transpose()?;
    cfg.target = c.target.as_deref().map(parse_space).transpose()?;
    let n = c.dim.or(cfg.source.map(|s| s.n as usize)).unwrap_or(1);
    cfg.grid.n = n;
    if let Some(g) = &c.grid {
        cfg.grid = parse_grid(g, n)?;
    }
    cfg.alpha_constants = c.alpha_constants.as_deref().map(parse_pair).transpose()?;
    cfg.seed = c.seed;
    cfg.out = c.out;
    cfg.format = c.format.parse()?;
    match cli.command {
        Sub::Decide | Sub::Index => {}
        Sub::Covering { alpha, k_max, dump } => {
            cfg.alpha = alpha.as_deref().map(parse_rational).transpose()?;
            cfg.k_max = k_max;
            cfg.dump = dump;
        }
        Sub::Normcalc { input, builtin } => {
            cfg.input = match (input, builtin) {
                (Some(p), _) => Some(NormInput::File(p)),
                (None, Some(b)) => Some(NormInput::Builtin(b.parse()?)),
                (None, None) => None,
            };
        }
        Sub::VerifyAsymptotics { j_range, trials } => {
            cfg.j_range = j_range.as_deref().map(parse_range).transpose()?;
            cfg.trials = trials;
        }
        Sub::VerifyEmbedding { levels } => {
            cfg.levels = levels.as_deref().map(parse_range).transpose()?;
        }
    }
    Ok(cfg)
}

/// Caps the global thread pool at `ALPHAMOD_THREADS` when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ALPHAMOD_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("ALPHAMOD_THREADS must be a positive integer, got '{v}'")))?;
        // a pool that already exists keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    Ok(())
}

/// Parses arguments, runs and emits; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = config_of(cli).and_then(|cfg| {
        init_threads()?;
        let out = run(&cfg)?;
        emit(&cfg, &out)?;
        Ok(out.check_failure)
    });
    match result {
        Ok(None) => 0,
        Ok(Some(msg)) => {
            eprintln!("alphamod: check failed: {msg}");
            4
        }
        Err(e) => {
            eprintln!("alphamod: {e}");
            exit_code(&e)
        }
    }
}
