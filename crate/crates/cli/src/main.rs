use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use framekit_cli::{run, Command, ExperimentConfig, GenerateKind, RuleKind};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CommandArg {
    Bounds,
    Analyze,
    Reconstruct,
    ToPovm,
    ValidatePovm,
    Decompose,
    ToOvf,
    VerifyUniqueness,
    Roundtrip,
    Generate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Trace,
    Dyadic,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Frame,
    Povm,
}

/// Frames, POVMs and their decompositions from JSON files.
///
/// Exit status: 0 all checks passed, 1 some check failed, 2 bad command line,
/// 3 unreadable or malformed input, 4 the library rejected the input.
#[derive(Debug, Parser)]
#[command(name = "framekit", version)]
struct Args {
    command: CommandArg,
    /// Input file; repeat for commands taking several.
    #[arg(long = "in", value_name = "FILE")]
    inputs: Vec<PathBuf>,
    /// Run report (JSON); printed to stdout when omitted. For `generate`, the generated file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the object a command produces (POVM, decomposition, OVF, coefficients, signal).
    #[arg(long, value_name = "FILE")]
    emit: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "trace")]
    rule: RuleArg,
    #[arg(long, value_name = "X")]
    target_error: Option<f64>,
    #[arg(long, value_name = "N")]
    max_iters: Option<usize>,
    /// Frame bounds for the frame algorithm instead of the exact ones.
    #[arg(long, value_name = "A,B", value_parser = parse_bounds)]
    bounds: Option<(f64, f64)>,
    /// Replace the tolerance of a named check; repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol)]
    tolerances: Vec<(String, f64)>,
    /// What `generate` produces.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    atoms: Option<usize>,
}

fn parse_bounds(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected A,B")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v = value.parse::<f64>().map_err(|e| format!("`{value}`: {e}"))?;
    if !v.is_finite() {
        return Err(format!("tolerance for `{name}` must be finite"));
    }
    Ok((name.to_string(), v))
}

impl From<Args> for ExperimentConfig {
    fn from(a: Args) -> Self {
        let command = match a.command {
            CommandArg::Bounds => Command::Bounds,
            CommandArg::Analyze => Command::Analyze,
            CommandArg::Reconstruct => Command::Reconstruct,
            CommandArg::ToPovm => Command::ToPovm,
            CommandArg::ValidatePovm => Command::ValidatePovm,
            CommandArg::Decompose => Command::Decompose,
            CommandArg::ToOvf => Command::ToOvf,
            CommandArg::VerifyUniqueness => Command::VerifyUniqueness,
            CommandArg::Roundtrip => Command::Roundtrip,
            CommandArg::Generate => Command::Generate,
        };
        ExperimentConfig {
            command,
            inputs: a.inputs,
            output: a.out,
            emit: a.emit,
            seed: a.seed,
            rule: match a.rule {
                RuleArg::Trace => RuleKind::Trace,
                RuleArg::Dyadic => RuleKind::Dyadic,
            },
            target_error: a.target_error,
            max_iters: a.max_iters,
            bounds_override: a.bounds,
            tolerance_overrides: a.tolerances.into_iter().collect::<BTreeMap<_, _>>(),
            generate_kind: a.kind.map(|k| match k {
                KindArg::Frame => GenerateKind::Frame,
                KindArg::Povm => GenerateKind::Povm,
            }),
            dim: a.dim,
            atoms: a.atoms,
        }
    }
}

fn main() -> ExitCode {
    let cfg = ExperimentConfig::from(Args::parse());
    match run(&cfg) {
        Ok(report) => {
            if cfg.output.is_none() || cfg.command == Command::Generate {
                print!("{}", report.to_json());
            }
            for c in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("check failed: {} = {:e} (tolerance {:e})", c.name, c.value, c.tolerance);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
