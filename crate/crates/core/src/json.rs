//! JSON file formats.
//!
//! A complex entry is `[re, im]` and a matrix is a row-major nested array of
//! entries. Standalone operators are wrapped in `{"dim", "kind", "matrix"}`.
//! Floats are written in shortest round-trip form and parsed with correct
//! rounding, so values survive a round trip bit for bit.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::frame::{FrameFunction, HemisphereRule, Representation};
use crate::measurement::Pvm;
use crate::operator::{ComplexMatrix, DensityMatrix, Projector, C64};
use crate::tolerance::Tolerances;

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| [self[(r, c)].re, self[(r, c)].im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(deserializer)?;
        matrix_from_rows(&rows).map_err(D::Error::custom)
    }
}

fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<ComplexMatrix> {
    let cols = rows.first().map_or(0, Vec::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
        return Err(Error::Parse(format!("ragged matrix: row of length {} in a {cols}-column matrix", bad.len())));
    }
    let entries = rows.iter().flatten().map(|&[re, im]| C64::new(re, im)).collect();
    ComplexMatrix::new(rows.len(), cols, entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    Projector,
    Density,
    Unitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorDoc {
    pub dim: usize,
    pub kind: OperatorKind,
    pub matrix: ComplexMatrix,
}

impl OperatorDoc {
    pub fn new(kind: OperatorKind, matrix: ComplexMatrix) -> Self {
        Self { dim: matrix.rows(), kind, matrix }
    }

    fn checked_matrix(self) -> Result<ComplexMatrix> {
        if self.matrix.rows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: self.matrix.rows() });
        }
        Ok(self.matrix)
    }
}

/// Accepts either a bare matrix or an operator object where a matrix is
/// expected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Bare(ComplexMatrix),
    Operator(OperatorDoc),
}

impl MatrixInput {
    pub fn into_matrix(self) -> Result<ComplexMatrix> {
        match self {
            Self::Bare(m) => Ok(m),
            Self::Operator(doc) => doc.checked_matrix(),
        }
    }
}

impl Serialize for MatrixInput {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Bare(m) => m.serialize(serializer),
            Self::Operator(doc) => doc.serialize(serializer),
        }
    }
}

pub fn projector_doc(p: &Projector) -> OperatorDoc {
    OperatorDoc::new(OperatorKind::Projector, p.matrix().clone())
}

pub fn density_doc(rho: &DensityMatrix) -> OperatorDoc {
    OperatorDoc::new(OperatorKind::Density, rho.matrix().clone())
}

pub fn parse_projector(s: &str, tol: &Tolerances) -> Result<Projector> {
    let m: MatrixInput = serde_json::from_str(s)?;
    Projector::new(m.into_matrix()?, tol)
}

pub fn parse_density(s: &str, tol: &Tolerances) -> Result<DensityMatrix> {
    let m: MatrixInput = serde_json::from_str(s)?;
    DensityMatrix::new(m.into_matrix()?, tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvmDoc {
    pub dim: usize,
    pub elements: Vec<MatrixInput>,
    pub labels: Vec<String>,
}

impl From<&Pvm> for PvmDoc {
    fn from(m: &Pvm) -> Self {
        Self {
            dim: m.dim(),
            elements: m.elements().iter().map(|p| MatrixInput::Bare(p.matrix().clone())).collect(),
            labels: m.labels().to_vec(),
        }
    }
}

impl PvmDoc {
    pub fn into_pvm(self, tol: &Tolerances) -> Result<Pvm> {
        let elements = self
            .elements
            .into_iter()
            .map(|m| Projector::new(m.into_matrix()?, tol))
            .collect::<Result<Vec<_>>>()?;
        let pvm = Pvm::with_labels(elements, self.labels, tol)?;
        if pvm.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: pvm.dim() });
        }
        Ok(pvm)
    }
}

pub fn pvm_to_string(m: &Pvm) -> String {
    serde_json::to_string_pretty(&PvmDoc::from(m)).expect("PVM serializes")
}

pub fn parse_pvm(s: &str, tol: &Tolerances) -> Result<Pvm> {
    serde_json::from_str::<PvmDoc>(s)?.into_pvm(tol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntryDoc {
    pub projector: MatrixInput,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameDoc {
    pub dim: usize,
    pub repr: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<MatrixInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<TableEntryDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<Box<FrameDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_b: Option<usize>,
}

impl FrameDoc {
    fn bare(dim: usize, repr: &str) -> Self {
        Self { dim, repr: repr.into(), rho: None, rule: None, entries: None, parent: None, dim_b: None }
    }

    pub fn into_frame(self, tol: &Tolerances) -> Result<FrameFunction> {
        let missing = |field: &str| Error::Parse(format!("repr `{}` requires field `{field}`", self.repr));
        let f = match self.repr.as_str() {
            "born" => {
                let rho = self.rho.clone().ok_or_else(|| missing("rho"))?;
                FrameFunction::born_backed(DensityMatrix::new(rho.into_matrix()?, tol)?, tol)
            }
            "deterministic" => {
                let rule = match self.rule.as_deref() {
                    None => HemisphereRule::default(),
                    Some(name) => HemisphereRule::from_name(name)
                        .ok_or_else(|| Error::Parse(format!("unknown hemisphere rule `{name}`")))?,
                };
                FrameFunction::deterministic_qubit(rule, tol)
            }
            "table" => {
                let entries = self.entries.clone().ok_or_else(|| missing("entries"))?;
                let entries = entries
                    .into_iter()
                    .map(|e| Ok((Projector::new(e.projector.into_matrix()?, tol)?, e.value)))
                    .collect::<Result<Vec<_>>>()?;
                FrameFunction::tabulated(entries, tol)?
            }
            "induced" => {
                let parent = self.parent.clone().ok_or_else(|| missing("parent"))?;
                let dim_b = self.dim_b.ok_or_else(|| missing("dim_b"))?;
                FrameFunction::induce(parent.into_frame(tol)?, self.dim, dim_b)?
            }
            other => return Err(Error::Parse(format!("unknown frame repr `{other}`"))),
        };
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: f.dim() });
        }
        Ok(f)
    }
}

impl From<&FrameFunction> for FrameDoc {
    fn from(f: &FrameFunction) -> Self {
        match f.representation() {
            Representation::BornBacked(rho) => Self {
                rho: Some(MatrixInput::Bare(rho.matrix().clone())),
                ..Self::bare(f.dim(), "born")
            },
            Representation::DeterministicHemisphere(rule) => Self {
                rule: Some(rule.name().into()),
                ..Self::bare(f.dim(), "deterministic")
            },
            Representation::Tabulated(table) => Self {
                entries: Some(
                    table
                        .entries()
                        .map(|(p, v)| TableEntryDoc { projector: MatrixInput::Bare(p.matrix().clone()), value: v })
                        .collect(),
                ),
                ..Self::bare(f.dim(), "table")
            },
            Representation::Induced { parent, dim_b } => Self {
                parent: Some(Box::new(FrameDoc::from(parent.as_ref()))),
                dim_b: Some(*dim_b),
                ..Self::bare(f.dim(), "induced")
            },
        }
    }
}

pub fn frame_to_string(f: &FrameFunction) -> String {
    serde_json::to_string_pretty(&FrameDoc::from(f)).expect("frame function serializes")
}

pub fn parse_frame(s: &str, tol: &Tolerances) -> Result<FrameFunction> {
    serde_json::from_str::<FrameDoc>(s)?.into_frame(tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{projector_key, pvm_from_unitary};
    use crate::operator::{haar_unitary, random_density, rng_from_seed};
    use proptest::prelude::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn matrix_layout() {
        let m = ComplexMatrix::new(2, 2, vec![C64::new(1.0, 0.0), C64::new(0.5, -0.25), C64::new(0.5, 0.25), C64::new(0.0, 0.0)])
            .unwrap();
        let s = serde_json::to_string(&OperatorDoc::new(OperatorKind::Density, m)).unwrap();
        assert_eq!(s, r#"{"dim":2,"kind":"density","matrix":[[[1.0,0.0],[0.5,-0.25]],[[0.5,0.25],[0.0,0.0]]]}"#);
    }

    #[test]
    fn rejects_ragged_and_mismatched_input() {
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[1,0],[0,0]]]").is_err());
        assert!(serde_json::from_str::<ComplexMatrix>("[]").is_err());
        let doc = r#"{"dim":3,"kind":"projector","matrix":[[[1,0],[0,0]],[[0,0],[0,0]]]}"#;
        assert!(matches!(parse_projector(doc, &tol()), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(parse_projector("[[[1,0],[0,0]],[[0,0],[0,0]]]", &tol()), Ok(p) if p.rank() == 1));
    }

    #[test]
    fn pvm_round_trip_preserves_keys() {
        let mut rng = rng_from_seed(12);
        let m = pvm_from_unitary(&haar_unitary(3, &mut rng), &[1, 2], &tol()).unwrap();
        let back = parse_pvm(&pvm_to_string(&m), &tol()).unwrap();
        assert_eq!(back, m);
        for (a, b) in m.elements().iter().zip(back.elements()) {
            assert_eq!(projector_key(a, 1e-8), projector_key(b, 1e-8));
        }
    }

    #[test]
    fn frame_round_trip() {
        let mut rng = rng_from_seed(13);
        let born = FrameFunction::born_backed(random_density(2, &mut rng), &tol());
        assert_eq!(parse_frame(&frame_to_string(&born), &tol()).unwrap(), born);
        let det = FrameFunction::deterministic_qubit(HemisphereRule::XzDefinite, &tol());
        assert_eq!(parse_frame(&frame_to_string(&det), &tol()).unwrap(), det);
        let induced = FrameFunction::induce(
            FrameFunction::born_backed(random_density(4, &mut rng), &tol()),
            2,
            2,
        )
        .unwrap();
        assert_eq!(parse_frame(&frame_to_string(&induced), &tol()).unwrap(), induced);
    }

    #[test]
    fn frame_parse_errors() {
        assert!(parse_frame(r#"{"dim":2,"repr":"born"}"#, &tol()).is_err());
        assert!(parse_frame(r#"{"dim":2,"repr":"psychic"}"#, &tol()).is_err());
        assert!(parse_frame(r#"{"dim":2,"repr":"deterministic","rule":"nope"}"#, &tol()).is_err());
        assert!(matches!(
            parse_frame(r#"{"dim":3,"repr":"deterministic"}"#, &tol()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn matrices_round_trip_exactly(entries in proptest::collection::vec(-1e6f64..1e6, 18)) {
            let cs: Vec<C64> = entries.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
            let m = ComplexMatrix::new(3, 3, cs).unwrap();
            let back: ComplexMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
