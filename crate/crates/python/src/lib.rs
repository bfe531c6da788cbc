//! Python bindings: `import pyframekit`.
//!
//! Matrices cross the boundary as lists of rows of Python `complex` (anything
//! convertible, so floats and numpy scalars work), vectors as flat lists.
//! Library errors surface as `pyframekit.FramekitError`, whose message starts
//! with the error's name, e.g. `NotAFrame: ...`.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};
use serde_json::Value;

use framekit::correspondence::{self, Decomposition, ReferenceMeasureRule};
use framekit::frames::{AtomicMeasureSpace, CoefficientField, OperatorValuedFrame, VectorFrame};
use framekit::io::{self, DecompositionJson, Document, OvfJson, PovmJson};
use framekit::linalg::{self, ComplexMatrix, ComplexScalar, ComplexVector};
use framekit::povm::{Event, Povm};
use framekit::random;
use framekit::reconstruction::{self, ReconstructionConfig, DEFAULT_MAX_ITERS, DEFAULT_TARGET_ERROR};

create_exception!(pyframekit, FramekitError, PyValueError, "Raised when the library rejects an input.");

type Rows = Vec<Vec<ComplexScalar>>;

fn lib_err(e: framekit::Error) -> PyErr {
    FramekitError::new_err(e.to_string())
}

fn parse_err(e: io::ParseError) -> PyErr {
    FramekitError::new_err(e.to_string())
}

pub fn matrix_from_rows(rows: Rows) -> Result<ComplexMatrix, framekit::Error> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|row| row.len() != c) {
        return Err(framekit::Error::DimensionMismatch {
            context: "ragged matrix rows",
            expected: c,
            found: bad.len(),
        });
    }
    ComplexMatrix::new(r, c, rows.into_iter().flatten().collect())
}

pub fn matrix_to_rows(m: &ComplexMatrix) -> Rows {
    m.data().chunks(m.cols()).map(<[_]>::to_vec).collect()
}

fn matrix(rows: Rows) -> PyResult<ComplexMatrix> {
    matrix_from_rows(rows).map_err(lib_err)
}

fn vector(entries: Vec<ComplexScalar>) -> PyResult<ComplexVector> {
    ComplexVector::new(entries).map_err(lib_err)
}

fn labels_or_default(atoms: Option<Vec<String>>, n: usize) -> Vec<String> {
    atoms.unwrap_or_else(|| (1..=n).map(|i| i.to_string()).collect())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let converted = items.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, converted)?.into_any()
        }
        Value::Object(map) => {
            let d = PyDict::new(py);
            for (k, x) in map {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn serde_to_py<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| FramekitError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// Operator-valued frame on a finite atomic measure space.
#[pyclass(name = "Frame", module = "pyframekit", frozen)]
pub struct PyFrame {
    inner: OperatorValuedFrame,
}

#[pymethods]
impl PyFrame {
    /// Blocks `T(t)`, each `k_t × n`; weights default to 1, labels to "1".."N".
    #[new]
    #[pyo3(signature = (blocks, weights=None, atoms=None))]
    fn new(blocks: Vec<Rows>, weights: Option<Vec<f64>>, atoms: Option<Vec<String>>) -> PyResult<Self> {
        let blocks = blocks.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        let n = blocks.len();
        let dim_h = blocks.first().map_or(0, ComplexMatrix::cols);
        let space = AtomicMeasureSpace::new(labels_or_default(atoms, n), weights.unwrap_or_else(|| vec![1.0; n]))
            .map_err(lib_err)?;
        let inner = OperatorValuedFrame::new(space, dim_h, blocks).map_err(lib_err)?;
        Ok(Self { inner })
    }

    /// Vector frame `{f_t}`, optionally weighted (a sampled continuous frame).
    #[staticmethod]
    #[pyo3(signature = (vectors, weights=None))]
    fn from_vectors(vectors: Vec<Vec<ComplexScalar>>, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let vs = vectors.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?;
        let inner = match weights {
            Some(w) => OperatorValuedFrame::discretize_continuous(&vs, &w),
            None => {
                let dim = vs.first().map_or(0, ComplexVector::dim);
                VectorFrame::new(dim, vs).and_then(|f| OperatorValuedFrame::from_vector_frame(&f))
            }
        }
        .map_err(lib_err)?;
        Ok(Self { inner })
    }

    /// Accepts both the OVF and the vector-frame JSON layouts.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = match io::parse_document(text).map_err(parse_err)? {
            Document::Ovf(j) => j.build().map_err(parse_err)?,
            Document::VectorFrame(j) => {
                OperatorValuedFrame::from_vector_frame(&j.build().map_err(parse_err)?).map_err(lib_err)?
            }
            other => return Err(FramekitError::new_err(format!("expected a frame, got {}", other.kind()))),
        };
        Ok(Self { inner })
    }

    fn to_json(&self) -> String {
        io::to_json_string(&OvfJson::from(&self.inner))
    }

    #[getter]
    fn dim_h(&self) -> usize {
        self.inner.dim_h()
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.inner.space().atoms().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.space().weights().to_vec()
    }

    fn blocks(&self) -> Vec<Rows> {
        self.inner.blocks().iter().map(matrix_to_rows).collect()
    }

    /// `(A, B)`: the extreme eigenvalues of the frame operator.
    fn bounds(&self) -> (f64, f64) {
        let b = self.inner.frame_bounds();
        (b.lower, b.upper)
    }

    fn frame_operator(&self) -> Rows {
        matrix_to_rows(self.inner.frame_operator())
    }

    /// `Tx`, one segment per atom.
    fn analysis(&self, x: Vec<ComplexScalar>) -> PyResult<Vec<Vec<ComplexScalar>>> {
        let c = self.inner.analysis(&vector(x)?).map_err(lib_err)?;
        Ok(c.segments().iter().map(|s| s.entries().to_vec()).collect())
    }

    /// `T*c`.
    fn synthesis(&self, coefficients: Vec<Vec<ComplexScalar>>) -> PyResult<Vec<ComplexScalar>> {
        let c = self.coefficients(coefficients)?;
        Ok(self.inner.synthesis(&c).map_err(lib_err)?.into_entries())
    }

    fn reconstruct_direct(&self, coefficients: Vec<Vec<ComplexScalar>>) -> PyResult<Vec<ComplexScalar>> {
        let c = self.coefficients(coefficients)?;
        Ok(reconstruction::reconstruct_direct(&self.inner, &c)
            .map_err(lib_err)?
            .into_entries())
    }

    /// Frame algorithm; returns a dict with the iterate `x`, the error
    /// certificates per iteration and, given `truth`, the actual errors.
    #[pyo3(signature = (coefficients, target_error=DEFAULT_TARGET_ERROR, max_iters=DEFAULT_MAX_ITERS, truth=None))]
    fn reconstruct<'py>(
        &self,
        py: Python<'py>,
        coefficients: Vec<Vec<ComplexScalar>>,
        target_error: f64,
        max_iters: usize,
        truth: Option<Vec<ComplexScalar>>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let c = self.coefficients(coefficients)?;
        let cfg = ReconstructionConfig {
            max_iters,
            target_error,
            bounds_override: None,
        };
        let mut trace = reconstruction::frame_algorithm(&self.inner, &c, &cfg).map_err(lib_err)?;
        if let Some(x) = truth {
            trace.attach_truth(&vector(x)?).map_err(lib_err)?;
        }
        let d = PyDict::new(py);
        d.set_item("x", trace.final_iterate().entries().to_vec())?;
        d.set_item("iterations", trace.iterations())?;
        d.set_item("certified_bounds", trace.certified_bounds.clone())?;
        d.set_item("posterior_bounds", trace.posterior_bounds.clone())?;
        d.set_item("actual_errors", trace.actual_errors.clone())?;
        d.set_item("convergence_ratio", trace.convergence_ratio())?;
        d.set_item("stop_reason", serde_to_py(py, &trace.stop_reason)?)?;
        d.set_item("csv", trace.to_csv())?;
        Ok(d)
    }

    /// The POVM `t ↦ μ({t}) T(t)* T(t)`.
    fn to_povm(&self) -> PyPovm {
        PyPovm {
            inner: correspondence::ovf_to_povm(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.bounds();
        format!(
            "Frame(dim_h={}, atoms={}, bounds=({a:.6}, {b:.6}))",
            self.inner.dim_h(),
            self.inner.space().len()
        )
    }
}

impl PyFrame {
    fn coefficients(&self, segments: Vec<Vec<ComplexScalar>>) -> PyResult<CoefficientField> {
        let segs = segments.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?;
        CoefficientField::new(self.inner.space().clone(), segs).map_err(lib_err)
    }
}

#[pyclass(name = "Povm", module = "pyframekit", frozen)]
pub struct PyPovm {
    inner: Povm,
}

#[pymethods]
impl PyPovm {
    #[new]
    #[pyo3(signature = (elements, atoms=None))]
    fn new(elements: Vec<Rows>, atoms: Option<Vec<String>>) -> PyResult<Self> {
        let elements = elements.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        let dim_h = elements.first().map_or(0, ComplexMatrix::rows);
        let atoms = labels_or_default(atoms, elements.len());
        let inner = Povm::new(atoms, dim_h, elements).map_err(lib_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match io::parse_document(text).map_err(parse_err)? {
            Document::Povm(j) => Ok(Self {
                inner: j.build().map_err(parse_err)?,
            }),
            other => Err(FramekitError::new_err(format!("expected a povm, got {}", other.kind()))),
        }
    }

    fn to_json(&self) -> String {
        io::to_json_string(&PovmJson::from(&self.inner))
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.inner.atoms().to_vec()
    }

    #[getter]
    fn dim_h(&self) -> usize {
        self.inner.dim_h()
    }

    fn elements(&self) -> Vec<Rows> {
        self.inner.elements().iter().map(matrix_to_rows).collect()
    }

    /// `M(E)` for a list of atom labels.
    fn evaluate(&self, event: Vec<String>) -> PyResult<Rows> {
        let m = self.inner.evaluate(&Event::new(event)).map_err(lib_err)?;
        Ok(matrix_to_rows(&m))
    }

    fn total(&self) -> Rows {
        matrix_to_rows(&self.inner.total())
    }

    /// Validation report as a dict; `report["passed"]` is the verdict.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &self.inner.validate())
    }

    fn is_framed<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        serde_to_py(py, &self.inner.is_framed())
    }

    fn probabilities(&self, x: Vec<ComplexScalar>) -> PyResult<Vec<f64>> {
        self.inner.measure_probabilities(&vector(x)?).map_err(lib_err)
    }

    fn normalized(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.normalized().map_err(lib_err)?,
        })
    }

    /// `rule` is "trace" or "dyadic"; the dyadic rule uses `sequence` or the standard basis.
    #[pyo3(signature = (rule="trace", sequence=None))]
    fn decompose(&self, rule: &str, sequence: Option<Vec<Vec<ComplexScalar>>>) -> PyResult<PyDecomposition> {
        let rule = match (rule, sequence) {
            ("trace", None) => ReferenceMeasureRule::Trace,
            ("dyadic", None) => ReferenceMeasureRule::dyadic_standard_basis(self.inner.dim_h()),
            ("dyadic", Some(seq)) => {
                ReferenceMeasureRule::DyadicSequence(seq.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?)
            }
            ("trace", Some(_)) => return Err(PyValueError::new_err("a sequence is only used by the dyadic rule")),
            (other, _) => return Err(PyValueError::new_err(format!("unknown rule `{other}`"))),
        };
        Ok(PyDecomposition {
            inner: correspondence::decompose(&self.inner, &rule).map_err(lib_err)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("Povm(dim_h={}, atoms={})", self.inner.dim_h(), self.inner.len())
    }
}

/// Atomic weights `μ` with densities `Q(t)`, `M({t}) = μ({t}) Q(t)`.
#[pyclass(name = "Decomposition", module = "pyframekit", frozen)]
pub struct PyDecomposition {
    inner: Decomposition,
}

#[pymethods]
impl PyDecomposition {
    #[new]
    #[pyo3(signature = (weights, densities, atoms=None))]
    fn new(weights: Vec<f64>, densities: Vec<Rows>, atoms: Option<Vec<String>>) -> PyResult<Self> {
        let densities = densities.into_iter().map(matrix).collect::<PyResult<Vec<_>>>()?;
        let dim_h = densities.first().map_or(0, ComplexMatrix::rows);
        let space = AtomicMeasureSpace::new(labels_or_default(atoms, densities.len()), weights).map_err(lib_err)?;
        Ok(Self {
            inner: Decomposition::new(space, dim_h, densities).map_err(lib_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        match io::parse_document(text).map_err(parse_err)? {
            Document::Decomposition(j) => Ok(Self {
                inner: j.build().map_err(parse_err)?,
            }),
            other => Err(FramekitError::new_err(format!("expected a decomposition, got {}", other.kind()))),
        }
    }

    fn to_json(&self) -> String {
        io::to_json_string(&DecompositionJson::from(&self.inner))
    }

    #[getter]
    fn atoms(&self) -> Vec<String> {
        self.inner.measure().atoms().to_vec()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.measure().weights().to_vec()
    }

    fn densities(&self) -> Vec<Rows> {
        self.inner.densities().iter().map(matrix_to_rows).collect()
    }

    /// `Σ_{t∈E} μ({t}) Q(t)`.
    fn reintegrate(&self, event: Vec<String>) -> Rows {
        matrix_to_rows(&self.inner.reintegrate(&event))
    }

    fn to_povm(&self) -> PyPovm {
        PyPovm {
            inner: self.inner.to_povm(),
        }
    }

    /// OVF with blocks `Q(t)^{1/2}`.
    fn to_ovf(&self) -> PyResult<PyFrame> {
        Ok(PyFrame {
            inner: correspondence::decomposition_to_ovf(&self.inner).map_err(lib_err)?,
        })
    }

    fn verify_reintegration<'py>(&self, py: Python<'py>, povm: &PyPovm) -> PyResult<Bound<'py, PyAny>> {
        let r = correspondence::verify_reintegration(&povm.inner, &self.inner).map_err(lib_err)?;
        serde_to_py(py, &r)
    }

    fn __repr__(&self) -> String {
        format!(
            "Decomposition(dim_h={}, atoms={})",
            self.inner.dim_h(),
            self.inner.measure().len()
        )
    }
}

#[pyfunction]
fn verify_uniqueness<'py>(py: Python<'py>, d1: &PyDecomposition, d2: &PyDecomposition) -> PyResult<Bound<'py, PyAny>> {
    let r = correspondence::verify_uniqueness(&d1.inner, &d2.inner).map_err(lib_err)?;
    serde_to_py(py, &r)
}

#[pyfunction]
fn verify_ovf_equivalence<'py>(py: Python<'py>, f1: &PyFrame, f2: &PyFrame) -> PyResult<Bound<'py, PyAny>> {
    let r = correspondence::verify_ovf_equivalence(&f1.inner, &f2.inner).map_err(lib_err)?;
    serde_to_py(py, &r)
}

/// `(eigenvalues ascending, eigenvector matrix with eigenvectors as columns)`.
#[pyfunction]
fn hermitian_eigen(a: Rows) -> PyResult<(Vec<f64>, Rows)> {
    let e = linalg::hermitian_eigen(&matrix(a)?).map_err(lib_err)?;
    Ok((e.eigenvalues.clone(), matrix_to_rows(&e.eigenvectors)))
}

#[pyfunction]
fn psd_sqrt(a: Rows) -> PyResult<Rows> {
    Ok(matrix_to_rows(&linalg::psd_sqrt(&matrix(a)?).map_err(lib_err)?))
}

#[pyfunction]
#[pyo3(signature = (dim, atoms, seed=0))]
fn generate_frame(dim: usize, atoms: usize, seed: u64) -> PyResult<PyFrame> {
    let f = random::generate_frame(dim, atoms, seed).map_err(lib_err)?;
    Ok(PyFrame {
        inner: OperatorValuedFrame::from_vector_frame(&f).map_err(lib_err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (dim, atoms, seed=0))]
fn generate_povm(dim: usize, atoms: usize, seed: u64) -> PyResult<PyPovm> {
    Ok(PyPovm {
        inner: random::generate_povm(dim, atoms, seed).map_err(lib_err)?,
    })
}

#[pymodule]
fn pyframekit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FramekitError", m.py().get_type::<FramekitError>())?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PyPovm>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(verify_uniqueness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_ovf_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(hermitian_eigen, m)?)?;
    m.add_function(wrap_pyfunction!(psd_sqrt, m)?)?;
    m.add_function(wrap_pyfunction!(generate_frame, m)?)?;
    m.add_function(wrap_pyfunction!(generate_povm, m)?)?;
    Ok(())
}
