use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use framekit::correspondence::{
    decompose, decomposition_to_ovf, ovf_to_povm, verify_ovf_equivalence, verify_reintegration,
    verify_uniqueness, Decomposition, ReferenceMeasureRule,
};
use framekit::frames::{tol_frame, CoefficientField, FrameBounds, OperatorValuedFrame};
use framekit::io::{
    to_json_string, CoefficientsJson, DecompositionJson, Document, OvfJson, ParseError, PovmJson, VectorFrameJson,
    VectorJson,
};
use framekit::linalg::{hermitian_eigen, ComplexMatrix, ComplexVector, TOL_HERM};
use framekit::povm::{validate_measure, Povm, VALIDATION_SEED};
use framekit::random::{generate_frame, generate_povm};
use framekit::reconstruction::{
    frame_algorithm, reconstruct_direct, ReconstructionConfig, StopReason, DEFAULT_MAX_ITERS, DEFAULT_TARGET_ERROR,
};

use crate::files::Loaded;
use crate::report::Check;
use crate::{CliError, Command, ExperimentConfig, GenerateKind, RuleKind};

/// Relative agreement demanded between objects that should coincide exactly.
const AGREEMENT_RTOL: f64 = 1e-10;
const BOUNDS_RTOL: f64 = 1e-9;

pub(crate) struct Outcome {
    pub checks: Vec<Check>,
    pub summary: Value,
    pub artifacts: Vec<(PathBuf, String)>,
}

pub(crate) fn dispatch(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Bounds => bounds(inputs),
        Command::Analyze => analyze(cfg, inputs),
        Command::Reconstruct => reconstruct(cfg, inputs),
        Command::ToPovm => to_povm(cfg, inputs),
        Command::ValidatePovm => validate_povm(cfg, inputs),
        Command::Decompose => decompose_cmd(cfg, inputs),
        Command::ToOvf => to_ovf(cfg, inputs),
        Command::VerifyUniqueness => uniqueness(inputs),
        Command::Roundtrip => roundtrip(cfg, inputs),
        Command::Generate => generate(cfg),
    }
}

fn built<T>(input: &Loaded, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::from_parse(&input.path, e))
}

fn wrong_kind(input: &Loaded, expected: &str) -> CliError {
    CliError::Command(format!(
        "{}: expected {expected}, found a {} document",
        input.path.display(),
        input.document.kind()
    ))
}

fn frame_of(input: &Loaded) -> Result<OperatorValuedFrame, CliError> {
    match &input.document {
        Document::Ovf(j) => built(input, j.build()),
        Document::VectorFrame(j) => Ok(OperatorValuedFrame::from_vector_frame(&built(input, j.build())?)?),
        _ => Err(wrong_kind(input, "a frame (ovf or vector-frame)")),
    }
}

fn povm_of(input: &Loaded) -> Result<Povm, CliError> {
    match &input.document {
        Document::Povm(j) => built(input, j.build()),
        _ => Err(wrong_kind(input, "a povm")),
    }
}

fn decomposition_of(input: &Loaded) -> Result<Decomposition, CliError> {
    match &input.document {
        Document::Decomposition(j) => built(input, j.build()),
        _ => Err(wrong_kind(input, "a decomposition")),
    }
}

fn vector_of(input: &Loaded) -> Result<ComplexVector, CliError> {
    match &input.document {
        Document::Vector(j) => built(input, j.build()),
        _ => Err(wrong_kind(input, "a vector")),
    }
}

fn coefficients_of(input: &Loaded) -> Result<CoefficientField, CliError> {
    match &input.document {
        Document::Coefficients(j) => built(input, j.build()),
        _ => Err(wrong_kind(input, "coefficients")),
    }
}

fn rule_of(cfg: &ExperimentConfig, dim: usize, sequence: Option<&Loaded>) -> Result<ReferenceMeasureRule, CliError> {
    match (cfg.rule, sequence) {
        (RuleKind::Trace, None) => Ok(ReferenceMeasureRule::Trace),
        (RuleKind::Trace, Some(s)) => Err(CliError::Command(format!(
            "{}: a reference sequence is only used with --rule dyadic",
            s.path.display()
        ))),
        (RuleKind::Dyadic, None) => Ok(ReferenceMeasureRule::dyadic_standard_basis(dim)),
        (RuleKind::Dyadic, Some(s)) => match &s.document {
            Document::VectorFrame(j) => Ok(ReferenceMeasureRule::DyadicSequence(built(s, j.vectors())?)),
            _ => Err(wrong_kind(s, "a reference sequence (vector-frame)")),
        },
    }
}

fn emit<T: serde::Serialize>(cfg: &ExperimentConfig, value: &T) -> Vec<(PathBuf, String)> {
    cfg.emit
        .iter()
        .map(|p| (p.clone(), to_json_string(value)))
        .collect()
}

fn relative(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE)
}

fn bounds_json(b: FrameBounds) -> Value {
    json!({ "lower": b.lower, "upper": b.upper, "convergence_ratio": b.convergence_ratio() })
}

fn frame_checks(ovf: &OperatorValuedFrame) -> Vec<Check> {
    let b = ovf.frame_bounds();
    vec![
        Check::above("frame_lower_bound", b.lower, tol_frame(b.upper)),
        Check::at_most("frame_operator_hermitian", ovf.frame_operator().hermiticity_residual(), TOL_HERM),
    ]
}

fn bounds(inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let ovf = frame_of(&inputs[0])?;
    let b = ovf.frame_bounds();
    Ok(Outcome {
        checks: frame_checks(&ovf),
        summary: json!({
            "dim_h": ovf.dim_h(),
            "atoms": ovf.space().len(),
            "lower": b.lower,
            "upper": b.upper,
            "convergence_ratio": b.convergence_ratio(),
            "tight": b.lower == b.upper,
        }),
        artifacts: Vec::new(),
    })
}

fn analyze(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let ovf = frame_of(&inputs[0])?;
    let x = vector_of(&inputs[1])?;
    let c = ovf.analysis(&x)?;
    let b = ovf.frame_bounds();
    let energy = c.weighted_norm_sqr();
    let norm_sqr = x.norm_sqr();
    let s_form = ovf.frame_operator().mul_vec(&x)?.inner(&x).re;
    let slack = AGREEMENT_RTOL * b.upper * norm_sqr;
    Ok(Outcome {
        checks: vec![
            Check::at_most("lower_frame_inequality", (b.lower * norm_sqr - energy).max(0.0), slack),
            Check::at_most("upper_frame_inequality", (energy - b.upper * norm_sqr).max(0.0), slack),
            Check::at_most(
                "energy_matches_frame_operator",
                (energy - s_form).abs(),
                AGREEMENT_RTOL * (1.0 + energy),
            ),
        ],
        summary: json!({
            "coefficient_energy": energy,
            "signal_norm_sqr": norm_sqr,
            "bounds": bounds_json(b),
        }),
        artifacts: emit(cfg, &CoefficientsJson::from(&c)),
    })
}

fn trace_path(cfg: &ExperimentConfig) -> PathBuf {
    let base = cfg.output.as_ref().or(cfg.emit.as_ref());
    match base {
        Some(p) => {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            p.with_file_name(format!("{stem}.trace.csv"))
        }
        None => Path::new("trace.csv").to_path_buf(),
    }
}

fn reconstruct(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let ovf = frame_of(&inputs[0])?;
    let c = coefficients_of(&inputs[1])?;
    let truth = inputs.get(2).map(vector_of).transpose()?;
    let run_cfg = ReconstructionConfig {
        max_iters: cfg.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
        target_error: cfg.target_error.unwrap_or(DEFAULT_TARGET_ERROR),
        bounds_override: cfg
            .bounds_override
            .map(|(lower, upper)| FrameBounds::new(lower, upper))
            .transpose()?,
    };
    let mut trace = frame_algorithm(&ovf, &c, &run_cfg)?;
    if let Some(x) = &truth {
        trace.attach_truth(x)?;
    }
    let direct = reconstruct_direct(&ovf, &c)?;
    let result = trace.final_iterate().clone();
    let final_bound = *trace.certified_bounds.last().expect("trace holds x0");
    let target = run_cfg.target_error;

    let mut checks = vec![
        Check::at_most("certified_bound", final_bound, target),
        Check::at_most(
            "agrees_with_direct",
            (&result - &direct).norm(),
            target + AGREEMENT_RTOL * (1.0 + direct.norm()),
        ),
    ];
    if let Some(x) = &truth {
        checks.push(Check::at_most("actual_error", (x - &result).norm(), target));
    }
    let mut artifacts = vec![(trace_path(cfg), trace.to_csv())];
    artifacts.extend(emit(cfg, &VectorJson::from(&result)));
    Ok(Outcome {
        checks,
        summary: json!({
            "iterations": trace.iterations(),
            "stop_reason": trace.stop_reason,
            "reached_target": trace.stop_reason == StopReason::TargetReached,
            "certified": trace.certified,
            "bounds_used": bounds_json(trace.bounds_used),
            "final_certified_bound": final_bound,
            "final_posterior_bound": trace.posterior_bounds.last(),
            "final_actual_error": trace.actual_errors.as_ref().and_then(|e| e.last()),
            "target_error": target,
        }),
        artifacts,
    })
}

fn validation_checks(povm: &Povm, seed: u64) -> (Vec<Check>, Value) {
    let r = validate_measure(povm, seed);
    let herm = r.hermiticity_residuals.iter().copied().fold(0.0, f64::max);
    // λ_min / (1 + ‖M_t‖_F), so the threshold is the relative tol_psd
    let min_scaled = r
        .min_eigenvalues
        .iter()
        .zip(povm.elements())
        .map(|(l, m)| l / (1.0 + m.frobenius_norm()))
        .fold(f64::INFINITY, f64::min);
    let checks = vec![
        Check::at_most("hermiticity", herm, TOL_HERM),
        Check::at_most("negative_eigenvalue", (-min_scaled).max(0.0), 1e-10),
        Check::at_most("empty_set", r.empty_set_residual, r.additivity_tolerance),
        Check::at_most("additivity", r.additivity_residual, r.additivity_tolerance),
    ];
    (checks, serde_json::to_value(&r).expect("report serialises"))
}

fn framedness(povm: &Povm) -> (Check, Value) {
    let fr = povm.is_framed();
    (
        Check::above("framed", fr.lower, tol_frame(fr.upper)),
        serde_json::to_value(fr).expect("plain struct"),
    )
}

fn to_povm(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let ovf = frame_of(&inputs[0])?;
    let povm = ovf_to_povm(&ovf);
    let (mut checks, validation) = validation_checks(&povm, cfg.seed.unwrap_or(VALIDATION_SEED));
    let (framed, fr) = framedness(&povm);
    checks.push(framed);
    checks.push(Check::at_most(
        "total_matches_frame_operator",
        relative(&povm.total(), ovf.frame_operator()),
        1e-12,
    ));
    Ok(Outcome {
        checks,
        summary: json!({ "atoms": povm.len(), "dim_h": povm.dim_h(), "framedness": fr, "validation": validation }),
        artifacts: emit(cfg, &PovmJson::from(&povm)),
    })
}

fn validate_povm(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let povm = povm_of(&inputs[0])?;
    let (checks, validation) = validation_checks(&povm, cfg.seed.unwrap_or(VALIDATION_SEED));
    let fr = povm.is_framed();
    Ok(Outcome {
        checks,
        summary: json!({ "atoms": povm.len(), "dim_h": povm.dim_h(), "framedness": fr, "validation": validation }),
        artifacts: Vec::new(),
    })
}

fn decompose_cmd(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let povm = povm_of(&inputs[0])?;
    let rule = rule_of(cfg, povm.dim_h(), inputs.get(1))?;
    let d = decompose(&povm, &rule)?;
    let rep = verify_reintegration(&povm, &d)?;
    let dropped: Vec<&String> = povm
        .atoms()
        .iter()
        .filter(|a| d.measure().index_of(a).is_none())
        .collect();
    Ok(Outcome {
        checks: vec![Check::at_most("reintegration", rep.max_residual, rep.tolerance)],
        summary: json!({
            "rule": rule.name(),
            "atoms_retained": d.measure().len(),
            "atoms_dropped": dropped,
            "weights": d.measure().weights(),
            "reintegration": rep,
        }),
        artifacts: emit(cfg, &DecompositionJson::from(&d)),
    })
}

fn to_ovf(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let d = decomposition_of(&inputs[0])?;
    let ovf = decomposition_to_ovf(&d)?;
    let total = d.total();
    let source = d.to_povm();
    let rebuilt = ovf_to_povm(&ovf);
    let povm_dev = source
        .elements()
        .iter()
        .zip(rebuilt.elements())
        .map(|(a, b)| (a - b).frobenius_norm())
        .fold(0.0, f64::max);
    let mut checks = frame_checks(&ovf);
    checks.push(Check::at_most(
        "frame_operator_matches_total",
        relative(ovf.frame_operator(), &total),
        AGREEMENT_RTOL,
    ));
    checks.push(Check::at_most(
        "povm_reproduced",
        povm_dev,
        AGREEMENT_RTOL * (1.0 + total.frobenius_norm()),
    ));
    Ok(Outcome {
        checks,
        summary: json!({ "atoms": ovf.space().len(), "dim_h": ovf.dim_h(), "bounds": bounds_json(ovf.frame_bounds()) }),
        artifacts: emit(cfg, &OvfJson::from(&ovf)),
    })
}

fn uniqueness(inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let (a, b) = (&inputs[0], &inputs[1]);
    let report = match (&a.document, &b.document) {
        (Document::Decomposition(_), Document::Decomposition(_)) => {
            verify_uniqueness(&decomposition_of(a)?, &decomposition_of(b)?)?
        }
        (Document::Ovf(_) | Document::VectorFrame(_), Document::Ovf(_) | Document::VectorFrame(_)) => {
            verify_ovf_equivalence(&frame_of(a)?, &frame_of(b)?)?
        }
        _ => {
            return Err(CliError::Command(format!(
                "verify-uniqueness compares two decompositions or two frames, got {} and {}",
                a.document.kind(),
                b.document.kind()
            )))
        }
    };
    Ok(Outcome {
        checks: vec![Check::at_most("uniqueness", report.max_residual, report.tolerance)],
        summary: serde_json::to_value(&report).expect("report serialises"),
        artifacts: Vec::new(),
    })
}

fn roundtrip(cfg: &ExperimentConfig, inputs: &[Loaded]) -> Result<Outcome, CliError> {
    let f1 = frame_of(&inputs[0])?;
    let povm = ovf_to_povm(&f1);
    let rule = rule_of(cfg, f1.dim_h(), inputs.get(1))?;
    let d = decompose(&povm, &rule)?;
    let f2 = decomposition_to_ovf(&d)?;
    let reint = verify_reintegration(&povm, &d)?;
    let equiv = verify_ovf_equivalence(&f1, &f2)?;
    let (b1, b2) = (f1.frame_bounds(), f2.frame_bounds());
    let bound_dev = ((b1.lower - b2.lower).abs() / b1.lower).max((b1.upper - b2.upper).abs() / b1.upper);

    let (mut checks, _) = validation_checks(&povm, cfg.seed.unwrap_or(VALIDATION_SEED));
    checks.push(Check::at_most("reintegration", reint.max_residual, reint.tolerance));
    checks.push(Check::at_most(
        "frame_operator",
        relative(f2.frame_operator(), f1.frame_operator()),
        AGREEMENT_RTOL,
    ));
    checks.push(Check::at_most("frame_bounds", bound_dev, BOUNDS_RTOL));
    checks.push(Check::at_most("ovf_equivalence", equiv.max_residual, equiv.tolerance));
    Ok(Outcome {
        checks,
        summary: json!({
            "rule": rule.name(),
            "original_bounds": bounds_json(b1),
            "recovered_bounds": bounds_json(b2),
            "max_residual": equiv.max_residual,
            "reintegration": reint,
            "equivalence": equiv,
        }),
        artifacts: emit(cfg, &OvfJson::from(&f2)),
    })
}

fn generate(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let need = |what: &str| CliError::Command(format!("generate needs --{what}"));
    let kind = cfg.generate_kind.ok_or_else(|| need("kind"))?;
    let dim = cfg.dim.ok_or_else(|| need("dim"))?;
    let atoms = cfg.atoms.ok_or_else(|| need("atoms"))?;
    let out = cfg.output.clone().ok_or_else(|| need("out"))?;
    let seed = cfg.seed.unwrap_or(0);
    let (checks, text, kind_name) = match kind {
        GenerateKind::Frame => {
            let frame = generate_frame(dim, atoms, seed)?;
            let ovf = OperatorValuedFrame::from_vector_frame(&frame)?;
            (frame_checks(&ovf), to_json_string(&VectorFrameJson::from(&frame)), "frame")
        }
        GenerateKind::Povm => {
            let povm = generate_povm(dim, atoms, seed)?;
            let (mut checks, _) = validation_checks(&povm, VALIDATION_SEED);
            checks.push(framedness(&povm).0);
            let top = hermitian_eigen(&povm.total())?.max();
            checks.push(Check::at_most("normalised", (top - 1.0).abs(), 1e-12));
            (checks, to_json_string(&PovmJson::from(&povm)), "povm")
        }
    };
    Ok(Outcome {
        checks,
        summary: json!({ "kind": kind_name, "dim_h": dim, "atoms": atoms, "seed": seed }),
        artifacts: vec![(out, text)],
    })
}
