//! `framekit` command runner.
//!
//! Every command reads JSON inputs, runs one pipeline from the core crate and
//! produces a [`RunReport`]: the checks it made, numeric summaries and the
//! SHA-256 of each input. The process exit status is 0 exactly when every
//! check passed.

mod commands;
mod files;
pub mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use thiserror::Error;

pub use files::{load, write_atomic, Loaded};
pub use report::{Check, InputRecord, Relation, RunReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
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

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Bounds,
        Command::Analyze,
        Command::Reconstruct,
        Command::ToPovm,
        Command::ValidatePovm,
        Command::Decompose,
        Command::ToOvf,
        Command::VerifyUniqueness,
        Command::Roundtrip,
        Command::Generate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Bounds => "bounds",
            Command::Analyze => "analyze",
            Command::Reconstruct => "reconstruct",
            Command::ToPovm => "to-povm",
            Command::ValidatePovm => "validate-povm",
            Command::Decompose => "decompose",
            Command::ToOvf => "to-ovf",
            Command::VerifyUniqueness => "verify-uniqueness",
            Command::Roundtrip => "roundtrip",
            Command::Generate => "generate",
        }
    }

    /// Allowed number of `--in` files.
    pub fn arity(self) -> (usize, usize) {
        match self {
            Command::Bounds | Command::ToPovm | Command::ValidatePovm | Command::ToOvf => (1, 1),
            Command::Analyze => (2, 2),
            Command::Reconstruct => (2, 3),
            Command::Decompose | Command::Roundtrip => (1, 2),
            Command::VerifyUniqueness => (2, 2),
            Command::Generate => (0, 0),
        }
    }
}

impl std::str::FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Command(format!("unknown command `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleKind {
    #[default]
    Trace,
    Dyadic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenerateKind {
    Frame,
    Povm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub inputs: Vec<PathBuf>,
    /// Report destination; stdout when absent. For `generate`, the generated file.
    pub output: Option<PathBuf>,
    /// Where produced objects (POVM, decomposition, OVF, coefficients, signal) go.
    pub emit: Option<PathBuf>,
    pub seed: Option<u64>,
    pub rule: RuleKind,
    pub target_error: Option<f64>,
    pub max_iters: Option<usize>,
    /// `(A, B)` for the frame algorithm instead of the exact bounds.
    pub bounds_override: Option<(f64, f64)>,
    /// Check name → tolerance.
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub generate_kind: Option<GenerateKind>,
    pub dim: Option<usize>,
    pub atoms: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            inputs: Vec::new(),
            output: None,
            emit: None,
            seed: None,
            rule: RuleKind::Trace,
            target_error: None,
            max_iters: None,
            bounds_override: None,
            tolerance_overrides: BTreeMap::new(),
            generate_kind: None,
            dim: None,
            atoms: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: framekit::io::ParseError,
    },
    #[error("CommandError: {0}")]
    Command(String),
    /// Input that parsed but was refused by the library, e.g. a family that is not a frame.
    #[error("{path}: field `{field}`: {source}")]
    Rejected {
        path: PathBuf,
        field: String,
        source: framekit::Error,
    },
    #[error("{0}")]
    Module(#[from] framekit::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub(crate) fn from_parse(path: &std::path::Path, err: framekit::io::ParseError) -> Self {
        match err {
            framekit::io::ParseError::Invalid { field, source } => CliError::Rejected {
                path: path.to_path_buf(),
                field,
                source,
            },
            other => CliError::Parse {
                path: path.to_path_buf(),
                source: other,
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Command(_) => 2,
            CliError::Parse { .. } | CliError::Io { .. } => 3,
            CliError::Module(_) | CliError::Rejected { .. } => 4,
        }
    }
}

/// Run one command and write its outputs.
///
/// Returns the report; the caller prints it when no `--out` was given.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let (lo, hi) = cfg.command.arity();
    let n = cfg.inputs.len();
    if n < lo || n > hi {
        let expected = if lo == hi { lo.to_string() } else { format!("{lo} to {hi}") };
        return Err(CliError::Command(format!(
            "`{}` takes {expected} --in file(s), got {n}",
            cfg.command.name()
        )));
    }
    let loaded = cfg.inputs.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
    let outcome = commands::dispatch(cfg, &loaded)?;

    let mut checks = outcome.checks;
    for (name, tol) in &cfg.tolerance_overrides {
        let mut hit = false;
        for c in checks.iter_mut().filter(|c| &c.name == name) {
            c.override_tolerance(*tol);
            hit = true;
        }
        if !hit {
            let known: Vec<&str> = checks.iter().map(|c| c.name.as_str()).collect();
            return Err(CliError::Command(format!(
                "no check named `{name}` in `{}` (checks: {})",
                cfg.command.name(),
                known.join(", ")
            )));
        }
    }

    let mut artifacts = Vec::new();
    for (path, text) in &outcome.artifacts {
        write_atomic(path, text.as_bytes())?;
        artifacts.push(path.display().to_string());
    }
    let report = RunReport {
        command: cfg.command.name().to_string(),
        inputs: loaded.iter().map(|l| l.record.clone()).collect(),
        seed: cfg.seed,
        tolerance_overrides: cfg.tolerance_overrides.clone(),
        passed: checks.iter().all(|c| c.passed),
        checks,
        summary: outcome.summary,
        artifacts,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    if cfg.command != Command::Generate {
        if let Some(out) = &cfg.output {
            write_atomic(out, report.to_json().as_bytes())?;
        }
    }
    Ok(report)
}
