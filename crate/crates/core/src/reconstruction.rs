//! Recovering `x` from its analysis coefficients `Tx`.
//!
//! Two routes: the direct one, `S⁻¹ T* (Tx)`, and the frame algorithm
//! `x⁽ⁿ⁾ = x⁽ⁿ⁻¹⁾ + 2/(A+B) · (T*c − S x⁽ⁿ⁻¹⁾)`, `x⁽⁰⁾ = 0`, whose error
//! contracts by `(B − A)/(B + A)` per step.

use std::fmt::Write as _;
use std::io;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{CoefficientField, FrameBounds, OperatorValuedFrame};
use crate::linalg::{invert, ComplexVector};

pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const DEFAULT_TARGET_ERROR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionConfig {
    pub max_iters: usize,
    pub target_error: f64,
    /// Use these `(A, B)` instead of the exact extreme eigenvalues of `S`.
    pub bounds_override: Option<FrameBounds>,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            target_error: DEFAULT_TARGET_ERROR,
            bounds_override: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    TargetReached,
    MaxIters,
}

/// Iterates and error certificates of one frame-algorithm run.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    /// `x⁽⁰⁾, x⁽¹⁾, …`
    pub iterates: Vec<ComplexVector>,
    /// A priori bound `ratioⁿ · ‖T*c‖/A`; `‖T*c‖/A ≥ ‖x‖` stands in for the unknown `‖x‖`.
    pub certified_bounds: Vec<f64>,
    /// A posteriori bound `‖T*c − S x⁽ⁿ⁾‖ / A`.
    pub posterior_bounds: Vec<f64>,
    /// `‖x − x⁽ⁿ⁾‖`, only when the true `x` was supplied via [`IterationTrace::attach_truth`].
    pub actual_errors: Option<Vec<f64>>,
    /// Nanoseconds since the start of the run at which each iterate was ready.
    pub elapsed_ns: Vec<u128>,
    pub bounds_used: FrameBounds,
    /// False when overridden bounds do not bracket the spectrum of `S`;
    /// the certificates are then not guaranteed.
    pub certified: bool,
    pub stop_reason: StopReason,
}

impl IterationTrace {
    pub fn iterations(&self) -> usize {
        self.iterates.len() - 1
    }

    pub fn final_iterate(&self) -> &ComplexVector {
        self.iterates.last().expect("trace always holds x⁽⁰⁾")
    }

    pub fn convergence_ratio(&self) -> f64 {
        self.bounds_used.convergence_ratio()
    }

    /// Fill `actual_errors` against the true signal.
    pub fn attach_truth(&mut self, x: &ComplexVector) -> Result<()> {
        if x.dim() != self.final_iterate().dim() {
            return Err(Error::DimensionMismatch {
                context: "true signal length",
                expected: self.final_iterate().dim(),
                found: x.dim(),
            });
        }
        self.actual_errors = Some(self.iterates.iter().map(|it| (x - it).norm()).collect());
        Ok(())
    }

    /// CSV with columns `iter,certified_bound,actual_error,elapsed_ns`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,certified_bound,actual_error,elapsed_ns\n");
        for n in 0..self.iterates.len() {
            let actual = self
                .actual_errors
                .as_ref()
                .map(|e| format!("{:.16e}", e[n]))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{n},{:.16e},{actual},{}",
                self.certified_bounds[n], self.elapsed_ns[n]
            );
        }
        out
    }

    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        w.write_all(self.to_csv().as_bytes())
    }
}

/// `S⁻¹ T* c`.
pub fn reconstruct_direct(ovf: &OperatorValuedFrame, c: &CoefficientField) -> Result<ComplexVector> {
    let synthesized = ovf.synthesis(c)?;
    let s_inv = invert(ovf.frame_operator())?;
    s_inv.mul_vec(&synthesized)
}

/// Run the frame algorithm on coefficients `c = Tx` without access to `x`.
///
/// Stops as soon as the a priori bound reaches `cfg.target_error`, or after
/// `cfg.max_iters` steps.
pub fn frame_algorithm(
    ovf: &OperatorValuedFrame,
    c: &CoefficientField,
    cfg: &ReconstructionConfig,
) -> Result<IterationTrace> {
    let start = Instant::now();
    let exact = ovf.frame_bounds();
    let (bounds, certified) = match cfg.bounds_override {
        Some(b) => {
            let b = FrameBounds::new(b.lower, b.upper)?;
            let brackets = b.lower <= exact.lower && exact.upper <= b.upper;
            (b, brackets)
        }
        None => (exact, true),
    };
    if !(cfg.target_error > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "target_error must be positive, got {}",
            cfg.target_error
        )));
    }

    let s = ovf.frame_operator();
    let rhs = ovf.synthesis(c)?;
    let ratio = bounds.convergence_ratio();
    let relax = bounds.relaxation();
    let initial_bound = rhs.norm() / bounds.lower;

    let mut x = ComplexVector::zeros(ovf.dim_h());
    let mut iterates = vec![x.clone()];
    let mut certified_bounds = vec![initial_bound];
    let mut posterior_bounds = vec![initial_bound];
    let mut elapsed_ns = vec![start.elapsed().as_nanos()];
    let mut stop_reason = StopReason::MaxIters;

    if initial_bound <= cfg.target_error {
        stop_reason = StopReason::TargetReached;
    } else {
        for n in 1..=cfg.max_iters {
            let residual = &rhs - &s.mul_vec(&x)?;
            x.axpy(relax.into(), &residual);
            let bound = ratio.powi(n as i32) * initial_bound;
            let posterior = (&rhs - &s.mul_vec(&x)?).norm() / bounds.lower;
            iterates.push(x.clone());
            certified_bounds.push(bound);
            posterior_bounds.push(posterior);
            elapsed_ns.push(start.elapsed().as_nanos());
            if bound <= cfg.target_error {
                stop_reason = StopReason::TargetReached;
                break;
            }
        }
    }

    Ok(IterationTrace {
        iterates,
        certified_bounds,
        posterior_bounds,
        actual_errors: None,
        elapsed_ns,
        bounds_used: bounds,
        certified,
        stop_reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frames::VectorFrame;

    fn e1_e1_e2() -> OperatorValuedFrame {
        let vs = [[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]]
            .iter()
            .map(|v| ComplexVector::from_real(v))
            .collect();
        OperatorValuedFrame::from_vector_frame(&VectorFrame::new(2, vs).unwrap()).unwrap()
    }

    #[test]
    fn direct_on_redundant_frame() {
        let f = e1_e1_e2();
        let x = ComplexVector::from_real(&[1.0, 2.0]);
        let c = f.analysis(&x).unwrap();
        // T*c = (2, 2), S = diag(2, 1)
        assert_eq!(f.synthesis(&c).unwrap(), ComplexVector::from_real(&[2.0, 2.0]));
        let r = reconstruct_direct(&f, &c).unwrap();
        assert!((&r - &x).norm() < 1e-15);
    }

    #[test]
    fn one_third_rate_on_e2_component() {
        let f = e1_e1_e2();
        let x = ComplexVector::from_real(&[0.0, 1.0]);
        let c = f.analysis(&x).unwrap();
        let cfg = ReconstructionConfig {
            max_iters: 20,
            target_error: 1e-300,
            bounds_override: None,
        };
        let mut trace = frame_algorithm(&f, &c, &cfg).unwrap();
        trace.attach_truth(&x).unwrap();
        assert_eq!(trace.iterations(), 20);
        assert_eq!(trace.stop_reason, StopReason::MaxIters);
        for (n, it) in trace.iterates.iter().enumerate() {
            let err = (1.0 - it[1].re).abs();
            assert!((err - (1.0f64 / 3.0).powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_coefficients_stop_immediately() {
        let f = e1_e1_e2();
        let c = f.analysis(&ComplexVector::zeros(2)).unwrap();
        let trace = frame_algorithm(&f, &c, &ReconstructionConfig::default()).unwrap();
        assert_eq!(trace.iterations(), 0);
        assert_eq!(trace.stop_reason, StopReason::TargetReached);
    }

    #[test]
    fn override_flags_uncertified() {
        let f = e1_e1_e2();
        let c = f.analysis(&ComplexVector::from_real(&[1.0, 1.0])).unwrap();
        let cfg = ReconstructionConfig {
            bounds_override: Some(FrameBounds { lower: 1.5, upper: 2.0 }),
            ..Default::default()
        };
        assert!(!frame_algorithm(&f, &c, &cfg).unwrap().certified);
        let cfg = ReconstructionConfig {
            bounds_override: Some(FrameBounds { lower: 0.5, upper: 3.0 }),
            ..Default::default()
        };
        assert!(frame_algorithm(&f, &c, &cfg).unwrap().certified);
        let cfg = ReconstructionConfig {
            bounds_override: Some(FrameBounds { lower: 3.0, upper: 2.0 }),
            ..Default::default()
        };
        assert!(matches!(
            frame_algorithm(&f, &c, &cfg),
            Err(Error::InvalidBounds { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let f = e1_e1_e2();
        let x = ComplexVector::from_real(&[0.0, 1.0]);
        let c = f.analysis(&x).unwrap();
        let cfg = ReconstructionConfig {
            max_iters: 2,
            ..Default::default()
        };
        let mut trace = frame_algorithm(&f, &c, &cfg).unwrap();
        let csv = trace.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "iter,certified_bound,actual_error,elapsed_ns");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,") && lines[1].contains(",,"));
        trace.attach_truth(&x).unwrap();
        let csv = trace.to_csv();
        assert!(!csv.lines().nth(1).unwrap().contains(",,"));
    }
}
