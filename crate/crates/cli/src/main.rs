mod config;
mod experiments;
mod matrix_cmds;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use opstrata::matcore::{GaugeNorm, ToleranceConfig};

use config::{CmdResult, ExperimentConfig};
use experiments::{CensusArgs, CensusModel, ContinuityArgs, FamilyKind, FiberArgs, FiberModel, TaylorArgs};

#[derive(Parser, Debug)]
#[command(name = "opstrata", version, about = "Pseudoinverse strata and operator monotone experiments")]
struct Cli {
    /// Seed for the deterministic generator.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Matrix dimension for generated experiments (at most 64).
    #[arg(long, global = true, default_value_t = 4)]
    dim: usize,
    #[arg(long, global = true, default_value_t = 10)]
    trials: usize,
    /// op | s1 | s2 | sp:<p> | kyfan:<k>
    #[arg(long, global = true, default_value = "s1", value_parser = parse_gauge)]
    gauge: GaugeNorm,
    /// Write results here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, default_value_t = ToleranceConfig::default().rank_rel)]
    rank_rel: f64,
    #[arg(long, global = true, default_value_t = ToleranceConfig::default().residual_abs)]
    residual_abs: f64,
    #[command(subcommand)]
    command: Command,
}

fn parse_gauge(s: &str) -> Result<GaugeNorm, String> {
    s.parse().map_err(|e: opstrata::Error| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moore-Penrose inverse of a matrix JSON file.
    Pinv {
        input: PathBuf,
    },
    /// Essential codimension and gap of two projectors.
    Codim {
        p: PathBuf,
        q: PathBuf,
    },
    /// Stratum of B relative to A.
    Stratify {
        a: PathBuf,
        b: PathBuf,
    },
    /// Continuity conditions along generated sequences.
    Continuity {
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 50)]
        terms: usize,
        #[arg(long, default_value_t = 25)]
        n0: usize,
        #[arg(long, value_enum, default_value_t = FamilyKind::Both)]
        family: FamilyKind,
    },
    /// Taylor remainder decay of an operator monotone function.
    Taylor {
        /// sqrt | atomic:<file>
        #[arg(long, default_value = "sqrt")]
        function: String,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        /// ‖Δ‖ as a fraction of the smallest eigenvalue of C.
        #[arg(long, default_value_t = 0.3)]
        ratio: f64,
        /// Spread of the positive noise added to the identity.
        #[arg(long, default_value_t = 0.2)]
        noise: f64,
    },
    /// Classify random perturbations of A by stratum.
    Census {
        /// Reference matrix; generated from --dim and --rank when omitted.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        scale: f64,
        #[arg(long, value_enum, default_value_t = CensusModel::Dense)]
        model: CensusModel,
    },
    /// Round trips through both polar-map trivializations.
    Fiber {
        #[arg(long)]
        rank: Option<usize>,
        /// Perturbation radius as a fraction of the reduced minimum modulus.
        #[arg(long, default_value_t = 0.25)]
        scale: f64,
        #[arg(long, value_enum, default_value_t = FiberModel::Curve)]
        model: FiberModel,
    },
    /// Polar decomposition of a matrix JSON file.
    Polar {
        input: PathBuf,
    },
}

fn run(cli: Cli) -> CmdResult {
    let cfg = ExperimentConfig {
        seed: cli.seed,
        dimension: cli.dim,
        trials: cli.trials,
        gauge: cli.gauge,
        tolerances: ToleranceConfig {
            rank_rel: cli.rank_rel,
            residual_abs: cli.residual_abs,
            ..ToleranceConfig::default()
        },
        output_path: cli.out,
        json: cli.json,
    };
    cfg.validate()?;
    match cli.command {
        Command::Pinv { input } => matrix_cmds::pinv(&cfg, &input),
        Command::Polar { input } => matrix_cmds::polar(&cfg, &input),
        Command::Codim { p, q } => matrix_cmds::codim(&cfg, &p, &q),
        Command::Stratify { a, b } => matrix_cmds::stratify(&cfg, &a, &b),
        Command::Continuity { rank, terms, n0, family } => {
            experiments::continuity(&cfg, &ContinuityArgs { rank, terms, n0, family })
        }
        Command::Taylor { function, m_max, ratio, noise } => {
            experiments::taylor(&cfg, &TaylorArgs { function, m_max, ratio, noise })
        }
        Command::Census { input, rank, scale, model } => {
            experiments::census(&cfg, &CensusArgs { input, rank, scale, model })
        }
        Command::Fiber { rank, scale, model } => experiments::fiber(&cfg, &FiberArgs { rank, scale, model }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
