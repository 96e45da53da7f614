use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coarse_core::Error;
use serde::Serialize;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "coarse", version, about = "Coarse groups of finite permutation groups")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
struct GlobalOpts {
    /// Largest group whose subgroup lattice is enumerated
    #[arg(long, global = true, default_value_t = coarse_core::Bounds::DEFAULT_MAX_SUBGROUP_ORDER)]
    max_group_order: usize,

    /// Longest tuple tried by the Roelcke checker (default: largest |LC(V)|)
    #[arg(long, global = true)]
    roelcke_n: Option<usize>,

    /// Arity bound for orbit structures
    #[arg(long, global = true, default_value_t = 3)]
    arity: usize,

    /// Truncation depth for trees, fingerprints and tuple lengths
    #[arg(long, global = true)]
    depth: Option<usize>,

    /// Seed for randomized runs
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write to this file instead of stdout
    #[arg(long, short, global = true)]
    #[serde(skip)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the coarse exchange file of a group or tower file
    Build { input: PathBuf },
    /// Run axiom checkers on a coarse, group or tower file
    Check {
        input: PathBuf,
        /// Checker id; repeat to select several (default: all)
        #[arg(long = "checker")]
        checkers: Vec<String>,
        /// *subgroup for delta, formally_oligomorphic and strong_continuity
        #[arg(long)]
        subgroup: Option<usize>,
        /// Largest tuple length for formally_oligomorphic
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
    /// Rebuild a group from its filter group, or a tower from its inverse limit
    Reconstruct { input: PathBuf },
    /// Decide isomorphism of two coarse structures (group and tower files are built first)
    Iso { left: PathBuf, right: PathBuf },
    /// Compare group isomorphism with isomorphism of the coarse groups
    Kns { left: PathBuf, right: PathBuf },
    /// Search for a conjugating permutation and compare with orbit structures
    Conjugacy { left: PathBuf, right: PathBuf },
    /// Tree / Boolean algebra round trip for a tree file or seeded random trees
    Stone {
        input: Option<PathBuf>,
        /// Number of random trees when no file is given
        #[arg(long, default_value_t = 1)]
        random: usize,
    },
    /// Order-preserving partial maps on a finite set of rationals
    Oligo {
        /// Comma-separated rationals, e.g. "0,1/2,1"
        #[arg(long, default_value = "")]
        support: String,
        /// Largest tuple length for the oligomorphic certificate
        #[arg(long, default_value_t = 2)]
        k_max: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Build { .. } => "build",
            Command::Check { .. } => "check",
            Command::Reconstruct { .. } => "reconstruct",
            Command::Iso { .. } => "iso",
            Command::Kns { .. } => "kns",
            Command::Conjugacy { .. } => "conjugacy",
            Command::Stone { .. } => "stone",
            Command::Oligo { .. } => "oligo",
        }
    }
}

/// What a command produced: a payload for every format and whether its checks passed.
pub struct Outcome {
    pub json: serde_json::Value,
    pub text: String,
    pub dot: Option<String>,
    pub passed: bool,
    /// Exchange files are written bare; reports get the config envelope.
    pub bare: bool,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::BoundExceeded { .. } => 3,
        e if e.is_input_error() => 2,
        _ => 1,
    }
}

fn emit(opts: &GlobalOpts, body: &str) -> Result<(), Error> {
    match &opts.output {
        Some(path) => std::fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())?;
            Ok(())
        }
    }
}

fn render(cli: &Cli, outcome: &Outcome) -> Result<String, Error> {
    match cli.opts.format {
        Format::Json if outcome.bare => coarse_core::formats::to_sorted_json(&outcome.json),
        Format::Json => coarse_core::formats::to_sorted_json(&serde_json::json!({
            "command": cli.command.name(),
            "config": cli.opts,
            "passed": outcome.passed,
            "result": outcome.json,
        })),
        Format::Text => Ok(format!(
            "{}seed: {}\n{}\n",
            outcome.text,
            cli.opts.seed,
            if outcome.passed { "ok" } else { "FAILED" }
        )),
        Format::Dot => outcome
            .dot
            .clone()
            .ok_or_else(|| Error::Invalid(format!("dot output is not available for {}", cli.command.name()))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli.command, &cli.opts).and_then(|outcome| {
        let body = render(&cli, &outcome)?;
        emit(&cli.opts, &body)?;
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
