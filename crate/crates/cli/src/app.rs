use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, CliError, Input, Run};
use crate::fuzz::FuzzMode;
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "crconst",
    version,
    about = "Finite type and constancy certificates for formal CR models"
)]
pub struct Cli {
    /// Override the precision order N of the spec file.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct SpecArg {
    /// Spec file (key = value lines).
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub f: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate the model: normalization, involution and tangency.
    Check(SpecArg),
    /// Bracket span at the origin, depth by depth.
    FiniteType {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Full constancy pipeline for the pair (f, g).
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// The restricted reality defect of (f, g); g defaults to 1.
    Defect {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        pair: PairArgs,
    },
    /// The pipeline with g = 1: is f real on the manifold?
    Real {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, allow_hyphen_values = true)]
        f: Option<String>,
        #[arg(long)]
        max_depth: Option<usize>,
    },
    /// Compare symbolic results with pointwise numeric evaluation.
    EvalOracle {
        #[command(flatten)]
        spec: SpecArg,
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random pairs against the pipeline.
    Fuzz {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, value_enum, default_value = "generic")]
        mode: FuzzMode,
        #[arg(long)]
        max_depth: Option<usize>,
    },
}

impl Command {
    pub fn spec_path(&self) -> &PathBuf {
        match self {
            Command::Check(s) => &s.spec,
            Command::FiniteType { spec, .. }
            | Command::Verify { spec, .. }
            | Command::Defect { spec, .. }
            | Command::Real { spec, .. }
            | Command::EvalOracle { spec, .. }
            | Command::Fuzz { spec, .. } => &spec.spec,
        }
    }
}

/// Runs a parsed command line on the given spec text.
pub fn execute(cli: &Cli, spec_text: &str) -> Result<Run, CliError> {
    let input = Input::load(spec_text, cli.order)?;
    match &cli.command {
        Command::Check(_) => Ok(commands::cmd_check(&input)),
        Command::FiniteType { max_depth, .. } => commands::cmd_finite_type(&input, *max_depth),
        Command::Verify {
            pair, max_depth, ..
        } => commands::cmd_verify(&input, pair.f.as_deref(), pair.g.as_deref(), *max_depth),
        Command::Defect { pair, .. } => {
            commands::cmd_defect(&input, pair.f.as_deref(), pair.g.as_deref())
        }
        Command::Real { f, max_depth, .. } => commands::cmd_real(&input, f.as_deref(), *max_depth),
        Command::EvalOracle {
            pair, points, seed, ..
        } => {
            commands::cmd_eval_oracle(&input, pair.f.as_deref(), pair.g.as_deref(), *points, *seed)
        }
        Command::Fuzz {
            trials,
            seed,
            degree,
            mode,
            max_depth,
            ..
        } => commands::cmd_fuzz(&input, *trials, *seed, *degree, *mode, *max_depth),
    }
}
