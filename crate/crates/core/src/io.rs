//! JSON file formats.
//!
//! Matrices are `{"rows": n, "cols": m, "data": [[re, im], ...]}` in
//! row-major order. Every float is written with 17 significant digits so a
//! write/read cycle reproduces the `f64` bit pattern.

use std::io;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use thiserror::Error;

use crate::correspondence::Decomposition;
use crate::error::Error;
use crate::frames::{AtomicMeasureSpace, CoefficientField, OperatorValuedFrame, VectorFrame};
use crate::linalg::{ComplexMatrix, ComplexScalar, ComplexVector};
use crate::povm::Povm;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("ParseError: line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    /// Well-formed JSON whose contents the library rejects.
    #[error("field `{field}`: {source}")]
    Invalid {
        field: String,
        #[source]
        source: Error,
    },
    #[error("ParseError: cannot tell which schema this document follows (keys: {0})")]
    UnknownSchema(String),
}

impl ParseError {
    fn invalid(field: &str, source: Error) -> Self {
        Self::Invalid {
            field: field.to_string(),
            source,
        }
    }
}

type Pair = [f64; 2];

fn to_pairs(z: &[ComplexScalar]) -> Vec<Pair> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn from_pairs(p: &[Pair]) -> Vec<ComplexScalar> {
    p.iter().map(|&[re, im]| ComplexScalar::new(re, im)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Pair>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: to_pairs(m.data()),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix, ParseError> {
        ComplexMatrix::new(self.rows, self.cols, from_pairs(&self.data))
            .map_err(|e| ParseError::invalid(field, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OvfJson {
    pub atoms: Vec<String>,
    pub weights: Vec<f64>,
    pub dim_h: usize,
    pub blocks: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFrameJson {
    pub dim_h: usize,
    pub vectors: Vec<Vec<Pair>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmJson {
    pub atoms: Vec<String>,
    pub dim_h: usize,
    pub elements: Vec<MatrixJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub atoms: Vec<String>,
    pub weights: Vec<f64>,
    pub dim_h: usize,
    pub densities: Vec<MatrixJson>,
}

/// Analysis coefficients: one segment per atom.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsJson {
    pub atoms: Vec<String>,
    pub weights: Vec<f64>,
    pub segments: Vec<Vec<Pair>>,
}

/// A single vector of `C^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorJson {
    pub entries: Vec<Pair>,
}

impl From<&OperatorValuedFrame> for OvfJson {
    fn from(f: &OperatorValuedFrame) -> Self {
        Self {
            atoms: f.space().atoms().to_vec(),
            weights: f.space().weights().to_vec(),
            dim_h: f.dim_h(),
            blocks: f.blocks().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl OvfJson {
    pub fn build(&self) -> Result<OperatorValuedFrame, ParseError> {
        let space = AtomicMeasureSpace::new(self.atoms.clone(), self.weights.clone())
            .map_err(|e| ParseError::invalid("weights", e))?;
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| b.to_matrix(&format!("blocks[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        OperatorValuedFrame::new(space, self.dim_h, blocks).map_err(|e| ParseError::invalid("blocks", e))
    }
}

impl From<&VectorFrame> for VectorFrameJson {
    fn from(f: &VectorFrame) -> Self {
        Self {
            dim_h: f.dim_h(),
            vectors: f.vectors().iter().map(|v| to_pairs(v.entries())).collect(),
        }
    }
}

impl VectorFrameJson {
    pub fn vectors(&self) -> Result<Vec<ComplexVector>, ParseError> {
        self.vectors
            .iter()
            .enumerate()
            .map(|(i, v)| {
                ComplexVector::new(from_pairs(v)).map_err(|e| ParseError::invalid(&format!("vectors[{i}]"), e))
            })
            .collect()
    }

    pub fn build(&self) -> Result<VectorFrame, ParseError> {
        VectorFrame::new(self.dim_h, self.vectors()?).map_err(|e| ParseError::invalid("vectors", e))
    }
}

impl From<&Povm> for PovmJson {
    fn from(m: &Povm) -> Self {
        Self {
            atoms: m.atoms().to_vec(),
            dim_h: m.dim_h(),
            elements: m.elements().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl PovmJson {
    pub fn build(&self) -> Result<Povm, ParseError> {
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, b)| b.to_matrix(&format!("elements[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Povm::new(self.atoms.clone(), self.dim_h, elements).map_err(|e| ParseError::invalid("elements", e))
    }
}

impl From<&Decomposition> for DecompositionJson {
    fn from(d: &Decomposition) -> Self {
        Self {
            atoms: d.measure().atoms().to_vec(),
            weights: d.measure().weights().to_vec(),
            dim_h: d.dim_h(),
            densities: d.densities().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl DecompositionJson {
    pub fn build(&self) -> Result<Decomposition, ParseError> {
        let space = AtomicMeasureSpace::new(self.atoms.clone(), self.weights.clone())
            .map_err(|e| ParseError::invalid("weights", e))?;
        let densities = self
            .densities
            .iter()
            .enumerate()
            .map(|(i, b)| b.to_matrix(&format!("densities[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Decomposition::new(space, self.dim_h, densities).map_err(|e| ParseError::invalid("densities", e))
    }
}

impl From<&CoefficientField> for CoefficientsJson {
    fn from(c: &CoefficientField) -> Self {
        Self {
            atoms: c.space().atoms().to_vec(),
            weights: c.space().weights().to_vec(),
            segments: c.segments().iter().map(|s| to_pairs(s.entries())).collect(),
        }
    }
}

impl CoefficientsJson {
    pub fn build(&self) -> Result<CoefficientField, ParseError> {
        let space = AtomicMeasureSpace::new(self.atoms.clone(), self.weights.clone())
            .map_err(|e| ParseError::invalid("weights", e))?;
        let segments = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, s)| {
                ComplexVector::new(from_pairs(s)).map_err(|e| ParseError::invalid(&format!("segments[{i}]"), e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        CoefficientField::new(space, segments).map_err(|e| ParseError::invalid("segments", e))
    }
}

impl From<&ComplexVector> for VectorJson {
    fn from(v: &ComplexVector) -> Self {
        Self {
            entries: to_pairs(v.entries()),
        }
    }
}

impl VectorJson {
    pub fn build(&self) -> Result<ComplexVector, ParseError> {
        ComplexVector::new(from_pairs(&self.entries)).map_err(|e| ParseError::invalid("entries", e))
    }
}

/// Any of the documents above, recognised by its distinguishing key.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Ovf(OvfJson),
    VectorFrame(VectorFrameJson),
    Povm(PovmJson),
    Decomposition(DecompositionJson),
    Coefficients(CoefficientsJson),
    Vector(VectorJson),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Ovf(_) => "ovf",
            Document::VectorFrame(_) => "vector-frame",
            Document::Povm(_) => "povm",
            Document::Decomposition(_) => "decomposition",
            Document::Coefficients(_) => "coefficients",
            Document::Vector(_) => "vector",
        }
    }
}

fn typed<T: DeserializeOwned>(text: &str) -> Result<T, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// Parse a JSON document, dispatching on its keys.
pub fn parse_document(text: &str) -> Result<Document, ParseError> {
    let value: serde_json::Value = typed(text)?;
    let obj = value.as_object().ok_or_else(|| ParseError::UnknownSchema("not an object".into()))?;
    let has = |k: &str| obj.contains_key(k);
    Ok(if has("densities") {
        Document::Decomposition(typed(text)?)
    } else if has("elements") {
        Document::Povm(typed(text)?)
    } else if has("blocks") {
        Document::Ovf(typed(text)?)
    } else if has("vectors") {
        Document::VectorFrame(typed(text)?)
    } else if has("segments") {
        Document::Coefficients(typed(text)?)
    } else if has("entries") {
        Document::Vector(typed(text)?)
    } else {
        let keys: Vec<&str> = obj.keys().map(String::as_str).collect();
        return Err(ParseError::UnknownSchema(keys.join(", ")));
    })
}

/// Compact JSON with every float printed as `d.dddddddddddddddde±x`.
struct SeventeenDigits;

impl Formatter for SeventeenDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }
}

pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SeventeenDigits);
    value.serialize(&mut ser).expect("in-memory serialisation cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
