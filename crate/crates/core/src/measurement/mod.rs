//! Projection-valued measures, the intertwined family `M_ψ` on two qubits,
//! the subsystem embedding `P ↦ P ⊗ I`, and intertwine-graph analysis.

mod graph;

pub use graph::{intertwine_graph, projector_key, GraphNode, GraphSummary, IntertwineGraph, ProjectorKey};

use crate::error::{Error, Result};
use crate::operator::{tensor_capped, ComplexMatrix, Projector, C64, ZERO};
use crate::tolerance::Tolerances;

/// A validated projection-valued measure. Element order is preserved.
#[derive(Debug, Clone, PartialEq)]
pub struct Pvm {
    dim: usize,
    elements: Vec<Projector>,
    labels: Vec<String>,
}

impl Pvm {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Projector] {
        &self.elements
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.elements.iter().map(Projector::rank).collect()
    }

    /// Validates projectors with labels `"0"`, `"1"`, ….
    pub fn new(projectors: Vec<Projector>, tol: &Tolerances) -> Result<Self> {
        let labels = (0..projectors.len()).map(|i| i.to_string()).collect();
        Self::with_labels(projectors, labels, tol)
    }

    pub fn with_labels(projectors: Vec<Projector>, labels: Vec<String>, tol: &Tolerances) -> Result<Self> {
        let first = projectors.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        if labels.len() != projectors.len() {
            return Err(Error::LabelMismatch { labels: labels.len(), elements: projectors.len() });
        }
        if let Some(p) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let residuals = residuals(&projectors, dim);
        if let Some((x, y, residual)) = residuals.worst_pair {
            if residual > tol.pvm {
                return Err(Error::NotOrthogonal { x, y, residual });
            }
        }
        if residuals.completeness > tol.pvm {
            return Err(Error::Incomplete { residual: residuals.completeness });
        }
        if projectors.iter().map(Projector::rank).sum::<usize>() != dim {
            return Err(Error::Incomplete { residual: residuals.completeness });
        }
        Ok(Self { dim, elements: projectors, labels })
    }

    pub fn residuals(&self) -> PvmResiduals {
        residuals(&self.elements, self.dim)
    }

    /// The single-outcome measurement `{I_d}`.
    pub fn trivial(dim: usize) -> Self {
        Self { dim, elements: vec![Projector::identity(dim)], labels: vec!["I".into()] }
    }
}

/// Orthogonality and completeness residuals of a list of projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvmResiduals {
    /// Largest `‖P_x P_y‖_F` over `x < y`, with its indices.
    pub worst_pair: Option<(usize, usize, f64)>,
    /// `‖Σ P_x − I‖_F`.
    pub completeness: f64,
}

impl PvmResiduals {
    pub fn orthogonality(&self) -> f64 {
        self.worst_pair.map_or(0.0, |(_, _, r)| r)
    }
}

fn residuals(projectors: &[Projector], dim: usize) -> PvmResiduals {
    let mut worst_pair: Option<(usize, usize, f64)> = None;
    for x in 0..projectors.len() {
        for y in x + 1..projectors.len() {
            let r = projectors[x].matrix().matmul(projectors[y].matrix()).frobenius_norm();
            if worst_pair.is_none_or(|(_, _, w)| r > w) {
                worst_pair = Some((x, y, r));
            }
        }
    }
    let sum = projectors
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, p| acc.add(p.matrix()));
    PvmResiduals { worst_pair, completeness: sum.distance(&ComplexMatrix::identity(dim)) }
}

pub fn validate_pvm(projectors: Vec<Projector>, tol: &Tolerances) -> Result<Pvm> {
    Pvm::new(projectors, tol)
}

/// Groups consecutive columns of `u` into blocks of the given ranks.
pub fn pvm_from_unitary(u: &ComplexMatrix, rank_partition: &[usize], tol: &Tolerances) -> Result<Pvm> {
    if !u.is_square() {
        return Err(Error::NotSquare { rows: u.rows(), cols: u.cols() });
    }
    let dim = u.rows();
    if rank_partition.iter().sum::<usize>() != dim || rank_partition.contains(&0) {
        return Err(Error::PartitionMismatch { partition: rank_partition.to_vec(), dim });
    }
    let mut start = 0;
    let mut projectors = Vec::with_capacity(rank_partition.len());
    for &k in rank_partition {
        let cols: Vec<Vec<C64>> = (start..start + k).map(|c| u.column(c).iter().copied().collect()).collect();
        projectors.push(Projector::onto(&cols, dim, tol)?);
        start += k;
    }
    Pvm::new(projectors, tol)
}

/// `ψ⊥ = (−ψ̄₁, ψ̄₀)` rotated so its first nonzero component is real-positive.
pub fn orthogonal_complement(psi: [C64; 2]) -> [C64; 2] {
    let perp = [-psi[1].conj(), psi[0].conj()];
    let lead = perp.iter().find(|z| z.norm() > f64::EPSILON).copied().unwrap_or(C64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    [perp[0] * phase, perp[1] * phase]
}

/// `{ |0⟩⟨0| ⊗ I, |1⟩⟨1| ⊗ |ψ⟩⟨ψ|, |1⟩⟨1| ⊗ |ψ⊥⟩⟨ψ⊥| }`; the first element
/// is always the shared projector Π.
pub fn measurement_family_mpsi(psi: [C64; 2], tol: &Tolerances) -> Result<Pvm> {
    let norm = (psi[0].norm_sqr() + psi[1].norm_sqr()).sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let perp = orthogonal_complement(psi);
    let ket0 = ComplexMatrix::diagonal(&[1.0, 0.0]);
    let ket1 = ComplexMatrix::diagonal(&[0.0, 1.0]);
    let shared = tensor_capped(&ket0, &ComplexMatrix::identity(2), tol.max_dim)?;
    let along = tensor_capped(&ket1, &ComplexMatrix::outer(&psi), tol.max_dim)?;
    let across = tensor_capped(&ket1, &ComplexMatrix::outer(&perp), tol.max_dim)?;
    Pvm::with_labels(
        vec![Projector::new(shared, tol)?, Projector::new(along, tol)?, Projector::new(across, tol)?],
        vec!["0xI".into(), "1xpsi".into(), "1xpsi_perp".into()],
        tol,
    )
}

/// `Φ(P) = P ⊗ I_{d_b}`.
pub fn embed(p: &Projector, d_b: usize, tol: &Tolerances) -> Result<Projector> {
    if d_b < 2 {
        return Err(Error::UnsupportedDimension(d_b));
    }
    // Entries of P ⊗ I are entries of P or exact zeros, so the result has
    // the same residuals as P.
    let m = tensor_capped(p.matrix(), &ComplexMatrix::identity(d_b), tol.max_dim)?;
    Ok(Projector::from_parts(m, p.rank() * d_b))
}

/// Element-wise [`embed`]; labels and outcome count are unchanged.
pub fn embed_pvm(m: &Pvm, d_b: usize, tol: &Tolerances) -> Result<Pvm> {
    let elements = m.elements().iter().map(|p| embed(p, d_b, tol)).collect::<Result<Vec<_>>>()?;
    Pvm::with_labels(elements, m.labels().to_vec(), tol)
}

/// Computational basis ket `|i⟩` in dimension `dim`.
pub fn basis_ket(dim: usize, i: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[i] = C64::new(1.0, 0.0);
    v
}
