mod commands;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use aswtower::verify::Suite;
use aswtower::zeta::DEFAULT_ENUM_CAP;
use clap::{Args, Parser, Subcommand};

use commands::RunConfig;
use error::CliError;
use output::{Emit, Sink};

/// Finite-level invariants of Artin-Schreier-Witt towers over finite fields.
#[derive(Parser)]
#[command(name = "aswtower", version)]
struct Cli {
    /// Worker threads for per-level and per-point parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// More log output on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Directory for output files; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// Tower specification (TOML, or JSON by extension).
    #[arg(long)]
    tower: PathBuf,
    /// Levels as `a..b` (inclusive) or a single level; defaults to 0..depth.
    #[arg(long)]
    levels: Option<String>,
    /// Genus cap for differential and de Rham computations.
    #[arg(long, default_value_t = 40)]
    gmax: u64,
    /// Cap on the field sizes enumerated when counting points.
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: u64,
    #[command(flatten)]
    out: OutArgs,
}

impl Common {
    fn load(&self, levels: Option<String>) -> Result<(RunConfig, Sink), CliError> {
        let levels = levels.or_else(|| self.levels.clone());
        let cfg = RunConfig::load(&self.tower, levels.as_deref(), self.gmax, self.enum_cap)?;
        Ok((cfg, Sink { emit: self.out.emit, out: self.out.out.clone() }))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Per-level degree, breaks, genus, p-rank, a-number and part dimensions.
    Invariants(Common),
    /// Mod-p Dieudonne modules (F, V, Hodge indices, pairing) per level.
    Dieudonne(Common),
    /// Jordan types on the V-bijective differentials and control maps.
    Galois(Common),
    /// Point counts, L-polynomials and class numbers.
    Zeta {
        #[command(flatten)]
        common: Common,
        /// A single level (overrides --levels).
        #[arg(long)]
        level: Option<usize>,
        /// Report N_s for s = 1..max-s.
        #[arg(long)]
        max_s: Option<u32>,
    },
    /// Fit growth laws to a series read from CSV or JSON output.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Column holding e_n; the level column is `level` or `n`.
        #[arg(long)]
        column: Option<String>,
        #[arg(long)]
        p: Option<u32>,
        /// Growth dimension for the power-growth bracket.
        #[arg(long)]
        delta: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Run invariant suites: galois, dieudonne, zeta, asymptotics or all.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

/// Returns whether the output contains a failed check.
fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Invariants(c) => {
            let (cfg, sink) = c.load(None)?;
            commands::invariants(&cfg, &sink)?;
        }
        Command::Dieudonne(c) => {
            let (cfg, sink) = c.load(None)?;
            commands::dieudonne(&cfg, &sink)?;
        }
        Command::Galois(c) => {
            let (cfg, sink) = c.load(None)?;
            commands::galois(&cfg, &sink)?;
        }
        Command::Zeta { common, level, max_s } => {
            let (cfg, sink) = common.load(level.map(|n| n.to_string()))?;
            commands::zeta(&cfg, max_s, &sink)?;
        }
        Command::Fit { input, column, p, delta, out } => {
            let series = commands::read_series(&input, column.as_deref())?;
            let sink = Sink { emit: out.emit, out: out.out };
            return commands::fit(series, p, delta, &sink);
        }
        Command::Verify { suite, common } => {
            let (cfg, sink) = common.load(None)?;
            log::info!("verify {} on {} at levels {:?}", suite.name(), cfg.spec.name, cfg.levels);
            let report = commands::verify_suite(&cfg, suite, &sink)?;
            return Ok(report.failures() > 0);
        }
    }
    Ok(false)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
