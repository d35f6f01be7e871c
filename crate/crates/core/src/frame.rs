//! Frame functions: probability assignments to projectors that sum to one
//! over every PVM on which they are defined.
//!
//! Four representations exist. `BornBacked` evaluates `Tr(P ρ)`.
//! `DeterministicHemisphere` assigns definite qubit outcomes by an
//! antipodal-exclusive rule on Bloch vectors, which is a valid qubit frame
//! function with no density matrix behind it. `Tabulated` stores finitely
//! many values keyed by [`projector_key`]. `Induced` restricts a composite
//! function to the range of `P ↦ P ⊗ I`.

use indexmap::IndexMap;

use crate::error::{Error, Result};
use crate::measurement::{embed, projector_key, ProjectorKey, Pvm};
use crate::operator::{born_probability, BlochVector, DensityMatrix, Projector};
use crate::tolerance::Tolerances;

/// Bloch components with magnitude at or below this band count as zero in
/// the hemisphere tests.
pub const AXIS_BAND: f64 = 1e-12;

/// Antipodal-exclusive choice of one Bloch vector from each pair `{n, −n}`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub enum HemisphereRule {
    /// Accept `n` iff `z > 0`, or `z = 0 ∧ x > 0`, or `z = x = 0 ∧ y > 0`.
    #[default]
    LexZxy,
    /// Same as `LexZxy` except on the `±y` axis, where both outcomes get
    /// 1/2. Outcomes of σ_x and σ_z are definite (`+x` and `+z` certain).
    XzDefinite,
}

impl HemisphereRule {
    pub fn name(&self) -> &'static str {
        match self {
            Self::LexZxy => "lex-zxy",
            Self::XzDefinite => "xz-definite",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "lex-zxy" => Some(Self::LexZxy),
            "xz-definite" => Some(Self::XzDefinite),
            _ => None,
        }
    }

    pub fn accepts(&self, n: &BlochVector) -> bool {
        let zero = |c: f64| c.abs() <= AXIS_BAND;
        if !zero(n.z) {
            n.z > 0.0
        } else if !zero(n.x) {
            n.x > 0.0
        } else {
            n.y > AXIS_BAND
        }
    }

    /// Value assigned to the rank-1 projector with Bloch vector `n`.
    pub fn value(&self, n: &BlochVector) -> f64 {
        if *self == Self::XzDefinite && n.z.abs() <= AXIS_BAND && n.x.abs() <= AXIS_BAND {
            return 0.5;
        }
        if self.accepts(n) {
            1.0
        } else {
            0.0
        }
    }
}

/// Finite, non-contextual table of projector values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    entries: IndexMap<ProjectorKey, (Projector, f64)>,
    merged_near_duplicates: usize,
}

impl Table {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Projector, f64)> {
        self.entries.values().map(|(p, v)| (p, *v))
    }

    /// Count of inputs that were merged into an existing entry despite a
    /// nonzero matrix difference.
    pub fn merged_near_duplicates(&self) -> usize {
        self.merged_near_duplicates
    }

    pub fn get(&self, key: &ProjectorKey) -> Option<f64> {
        self.entries.get(key).map(|(_, v)| *v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation {
    BornBacked(DensityMatrix),
    DeterministicHemisphere(HemisphereRule),
    Tabulated(Table),
    Induced { parent: Box<FrameFunction>, dim_b: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFunction {
    dim: usize,
    repr: Representation,
    tol: Tolerances,
}

impl FrameFunction {
    pub fn born_backed(rho: DensityMatrix, tol: &Tolerances) -> Self {
        Self { dim: rho.dim(), repr: Representation::BornBacked(rho), tol: *tol }
    }

    pub fn deterministic_qubit(rule: HemisphereRule, tol: &Tolerances) -> Self {
        Self { dim: 2, repr: Representation::DeterministicHemisphere(rule), tol: *tol }
    }

    pub fn tabulated(entries: Vec<(Projector, f64)>, tol: &Tolerances) -> Result<Self> {
        let dim = entries.first().ok_or(Error::EmptySet)?.0.dim();
        let mut table = Table { entries: IndexMap::new(), merged_near_duplicates: 0 };
        for (p, value) in entries {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
            if !(-tol.prob..=1.0 + tol.prob).contains(&value) {
                return Err(Error::ValueOutOfRange(value));
            }
            let value = value.clamp(0.0, 1.0);
            let key = projector_key(&p, tol.key);
            match table.entries.get(&key) {
                Some((existing, first)) => {
                    if (first - value).abs() > tol.prob {
                        return Err(Error::ContextualConflict { key: key.to_string(), first: *first, second: value });
                    }
                    if existing.matrix() != p.matrix() {
                        table.merged_near_duplicates += 1;
                    }
                }
                None => {
                    table.entries.insert(key, (p, value));
                }
            }
        }
        Ok(Self { dim, repr: Representation::Tabulated(table), tol: *tol })
    }

    /// `P ↦ F(P ⊗ I_{d_b})` for a composite function `F` on `d_a·d_b`.
    pub fn induce(composite: FrameFunction, d_a: usize, d_b: usize) -> Result<Self> {
        let n = d_a * d_b;
        if composite.dim != n {
            return Err(Error::DimensionMismatch { expected: n, got: composite.dim });
        }
        if d_a < 2 || d_b < 2 {
            return Err(Error::UnsupportedDimension(d_a.min(d_b)));
        }
        let tol = composite.tol;
        Ok(Self { dim: d_a, repr: Representation::Induced { parent: Box::new(composite), dim_b: d_b }, tol })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Near-duplicate merges performed while building a table (0 otherwise).
    pub fn merged_near_duplicates(&self) -> usize {
        match &self.repr {
            Representation::Tabulated(t) => t.merged_near_duplicates(),
            Representation::Induced { parent, .. } => parent.merged_near_duplicates(),
            _ => 0,
        }
    }

    pub fn evaluate(&self, p: &Projector) -> Result<f64> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        match &self.repr {
            Representation::BornBacked(rho) => born_probability(p, rho, &self.tol),
            Representation::DeterministicHemisphere(rule) => match p.rank() {
                0 => Ok(0.0),
                2 => Ok(1.0),
                1 => Ok(rule.value(&BlochVector::from_matrix(p.matrix())?)),
                r => Err(Error::UnsupportedRank(r)),
            },
            Representation::Tabulated(table) => {
                let key = projector_key(p, self.tol.key);
                table.get(&key).ok_or_else(|| Error::UndefinedProjector { key: key.to_string() })
            }
            Representation::Induced { parent, dim_b } => parent.evaluate(&embed(p, *dim_b, &self.tol)?),
        }
    }
}

pub fn born_backed(rho: DensityMatrix, tol: &Tolerances) -> FrameFunction {
    FrameFunction::born_backed(rho, tol)
}

pub fn deterministic_qubit(rule: HemisphereRule, tol: &Tolerances) -> FrameFunction {
    FrameFunction::deterministic_qubit(rule, tol)
}

pub fn tabulated(entries: Vec<(Projector, f64)>, tol: &Tolerances) -> Result<FrameFunction> {
    FrameFunction::tabulated(entries, tol)
}

pub fn induce(composite: FrameFunction, d_a: usize, d_b: usize) -> Result<FrameFunction> {
    FrameFunction::induce(composite, d_a, d_b)
}

/// `|Σ_x f(P_x) − 1|` over the outcomes of `m`.
pub fn check_normalization(f: &FrameFunction, m: &Pvm) -> Result<f64> {
    let mut total = 0.0;
    for p in m.elements() {
        total += f.evaluate(p)?;
    }
    Ok((total - 1.0).abs())
}

/// Rank-1 projector onto the Bloch direction `n` (unit vector).
pub fn axis_projector(n: BlochVector, tol: &Tolerances) -> Result<Projector> {
    Projector::new(n.to_matrix(), tol)
}

/// The six Pauli-axis projectors in the order `+x, −x, +y, −y, +z, −z`.
pub fn pauli_axis_projectors(tol: &Tolerances) -> Vec<Projector> {
    [
        BlochVector::new(1.0, 0.0, 0.0),
        BlochVector::new(-1.0, 0.0, 0.0),
        BlochVector::new(0.0, 1.0, 0.0),
        BlochVector::new(0.0, -1.0, 0.0),
        BlochVector::new(0.0, 0.0, 1.0),
        BlochVector::new(0.0, 0.0, -1.0),
    ]
    .into_iter()
    .map(|n| axis_projector(n, tol).expect("axis projectors are exact"))
    .collect()
}

/// Table on the six axis projectors with `f(+axis) = values[axis]` and
/// `f(−axis) = 1 − values[axis]`, axes ordered x, y, z.
pub fn axis_table(values: [f64; 3], tol: &Tolerances) -> Result<FrameFunction> {
    let axes = pauli_axis_projectors(tol);
    let mut entries = Vec::with_capacity(6);
    for (i, pair) in axes.chunks(2).enumerate() {
        entries.push((pair[0].clone(), values[i]));
        entries.push((pair[1].clone(), 1.0 - values[i]));
    }
    FrameFunction::tabulated(entries, tol)
}
