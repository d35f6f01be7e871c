//! Marginality certification.
//!
//! A frame function is marginal when it arises as `P ↦ F(P ⊗ I)` from some
//! frame function `F` of a composite system. Every composite frame function
//! in dimension ≥ 3 is Born-backed, so marginality is equivalent to
//! representability by a density matrix. The certifier checks exactly that
//! on finite data:
//!
//! 1. evaluate `f` on an informationally complete set of projectors and fit
//!    the unit-trace Hermitian `ρ̂` minimizing `Σ (f(P_i) − Tr(P_i ρ̂))²`;
//! 2. accept if the fit is exact (max-norm residual ≤ `lin`) and `ρ̂ ⪰ 0`
//!    (smallest eigenvalue ≥ −`psd`); reject if the residual exceeds `lin`
//!    or the smallest eigenvalue is below −`margin`; otherwise
//!    inconclusive.
//!
//! For accepted functions [`extend_to_composite`] builds the composite
//! state `ρ̂ ⊗ σ_B` whose induced function reproduces `f`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{pauli_axis_projectors, FrameFunction};
use crate::measurement::{basis_ket, projector_key, ProjectorKey};
use crate::operator::{
    min_eigenpair, partial_trace_b_matrix, tensor_capped, trace_product, BlochVector, ComplexMatrix, DensityMatrix,
    Projector, C64, ZERO,
};
use crate::tolerance::Tolerances;

/// Largest dimension served by [`spanning_projectors`].
pub const MAX_SPANNING_DIM: usize = 8;

/// Witness-system dimension used when none is given.
pub const DEFAULT_EXTENSION_DIM: usize = 2;

/// Largest accepted witness-system dimension.
pub const MAX_EXTENSION_DIM: usize = 4;

const REDUCTION: &str = "informationally complete linear reconstruction plus positivity of the reconstruction";

/// Traceless Hermitian basis of generalized Gell-Mann matrices, normalized
/// so that `Tr(G_k G_l) = 2 δ_kl`. For `d = 2` this is `(σ_x, σ_y, σ_z)`.
pub fn traceless_basis(dim: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(dim * dim - 1);
    for j in 0..dim {
        for k in j + 1..dim {
            let mut sym = DMatrix::from_element(dim, dim, ZERO);
            sym[(j, k)] = C64::new(1.0, 0.0);
            sym[(k, j)] = C64::new(1.0, 0.0);
            basis.push(ComplexMatrix::from_dmatrix(sym).expect("finite"));
            let mut anti = DMatrix::from_element(dim, dim, ZERO);
            anti[(j, k)] = C64::new(0.0, -1.0);
            anti[(k, j)] = C64::new(0.0, 1.0);
            basis.push(ComplexMatrix::from_dmatrix(anti).expect("finite"));
        }
    }
    for l in 1..dim {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..dim)
            .map(|i| match i.cmp(&l) {
                std::cmp::Ordering::Less => scale,
                std::cmp::Ordering::Equal => -(l as f64) * scale,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        basis.push(ComplexMatrix::diagonal(&diag));
    }
    basis
}

/// Real coordinates of a Hermitian matrix in an orthonormal basis of the
/// `d²`-dimensional real space of Hermitian matrices.
fn hermitian_coordinates(h: &ComplexMatrix) -> Vec<f64> {
    let d = h.rows();
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        out.push(h[(i, i)].re);
    }
    for i in 0..d {
        for j in i + 1..d {
            out.push(std::f64::consts::SQRT_2 * h[(i, j)].re);
            out.push(std::f64::consts::SQRT_2 * h[(i, j)].im);
        }
    }
    out
}

fn singular_values(m: DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Projectors whose real span is the full space of `d × d` Hermitian
/// matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningSet {
    dim: usize,
    id: String,
    projectors: Vec<Projector>,
    design_rank: usize,
    condition_number: f64,
    /// `Tr(P_i G_k)` for the traceless basis; rows follow `projectors`.
    design: DMatrix<f64>,
}

impl SpanningSet {
    /// Wraps a projector list, verifying that it spans.
    pub fn new(id: impl Into<String>, projectors: Vec<Projector>) -> Result<Self> {
        let dim = projectors.first().ok_or(Error::EmptySet)?.dim();
        if let Some(p) = projectors.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let n = projectors.len();
        let full = DMatrix::from_fn(n, dim * dim, {
            let coords: Vec<Vec<f64>> = projectors.iter().map(|p| hermitian_coordinates(p.matrix())).collect();
            move |i, k| coords[i][k]
        });
        let sv = singular_values(full);
        let cutoff = sv.first().copied().unwrap_or(0.0) * 1e-10;
        let design_rank = sv.iter().filter(|&&s| s > cutoff).count();

        let basis = traceless_basis(dim);
        let design = DMatrix::from_fn(n, basis.len(), |i, k| trace_product(projectors[i].matrix(), &basis[k]).re);
        let sv = singular_values(design.clone());
        let condition_number = if n < basis.len() || sv[basis.len() - 1] <= 0.0 {
            f64::INFINITY
        } else {
            sv[0] / sv[basis.len() - 1]
        };
        Ok(Self { dim, id: id.into(), projectors, design_rank, condition_number, design })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    /// Rank of the vectorized design matrix; `d²` for a spanning set.
    pub fn design_rank(&self) -> usize {
        self.design_rank
    }

    /// Condition number of the traceless design matrix.
    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    pub fn is_spanning(&self) -> bool {
        self.design_rank == self.dim * self.dim
    }
}

/// Built-in informationally complete set: the six Pauli-axis projectors for
/// `d = 2`; for `d ≥ 3` the basis projectors `|e_i⟩⟨e_i|` plus the rank-1
/// projectors onto `(e_i ± e_j)/√2` and `(e_i ± i e_j)/√2` for `i < j`.
pub fn spanning_projectors(dim: usize, tol: &Tolerances) -> Result<SpanningSet> {
    if !(2..=MAX_SPANNING_DIM).contains(&dim) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if dim == 2 {
        return SpanningSet::new("pauli-axes-2", pauli_axis_projectors(tol));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut projectors = Vec::with_capacity(2 * dim * dim - dim);
    for i in 0..dim {
        projectors.push(Projector::onto(&[basis_ket(dim, i)], dim, tol)?);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            for phase in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
                let mut v = vec![ZERO; dim];
                v[i] = C64::new(s, 0.0);
                v[j] = phase * s;
                projectors.push(Projector::onto(&[v], dim, tol)?);
            }
        }
    }
    SpanningSet::new(format!("basis-pairs-{dim}"), projectors)
}

/// Least-squares fit of a unit-trace Hermitian matrix to frame-function
/// values on a spanning set.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub rho_hat: ComplexMatrix,
    /// `max_i |f(P_i) − Tr(P_i ρ̂)|`.
    pub linear_residual: f64,
    /// Index into the spanning set attaining the residual.
    pub worst_index: usize,
    pub values: Vec<f64>,
}

pub fn reconstruct_density(f: &FrameFunction, s: &SpanningSet, tol: &Tolerances) -> Result<Reconstruction> {
    if f.dim() != s.dim {
        return Err(Error::DimensionMismatch { expected: s.dim, got: f.dim() });
    }
    // NaN condition numbers are rejected too.
    if s.condition_number.is_nan() || s.condition_number > tol.cond {
        return Err(Error::IllConditioned { condition: s.condition_number, limit: tol.cond });
    }
    let values = s.projectors.iter().map(|p| f.evaluate(p)).collect::<Result<Vec<f64>>>()?;

    // X = I/d + Σ c_k G_k has unit trace for any c, so only c is fitted.
    let d = s.dim as f64;
    let rhs = DVector::from_iterator(
        values.len(),
        values.iter().zip(&s.projectors).map(|(v, p)| v - p.rank() as f64 / d),
    );
    let coeffs = s
        .design
        .clone()
        .svd(true, true)
        .solve(&rhs, 0.0)
        .map_err(|e| Error::Parse(format!("least-squares solve failed: {e}")))?;

    let basis = traceless_basis(s.dim);
    let mut rho_hat = ComplexMatrix::identity(s.dim).scale(1.0 / d);
    for (c, g) in coeffs.iter().zip(&basis) {
        rho_hat = rho_hat.add(&g.scale(*c));
    }
    let rho_hat = rho_hat.hermitize();

    let (mut worst_index, mut linear_residual) = (0, 0.0);
    for (i, (v, p)) in values.iter().zip(&s.projectors).enumerate() {
        let r = (v - trace_product(p.matrix(), &rho_hat).re).abs();
        if r > linear_residual {
            worst_index = i;
            linear_residual = r;
        }
    }
    Ok(Reconstruction { rho_hat, linear_residual, worst_index, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Marginal,
    NonMarginal,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Marginal => "marginal",
            Self::NonMarginal => "non_marginal",
            Self::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    /// Qubit case: Bloch vector of `ρ̂` and its norm.
    Bloch { bloch: [f64; 3], norm: f64 },
    /// Negative eigenvalue of `ρ̂` with its eigenvector.
    Eigen { min_eig: f64, eigenvector: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstProjector {
    pub index: usize,
    pub key: ProjectorKey,
    pub residual: f64,
}

/// Composite state exhibited for a marginal function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionCheck {
    pub dim_b: usize,
    /// `‖Tr_B(ρ̂ ⊗ I/d_b) − ρ̂‖_F`.
    pub partial_trace_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalityCertificate {
    pub verdict: Verdict,
    pub dim: usize,
    pub rho_hat: ComplexMatrix,
    pub linear_residual: f64,
    pub min_eig: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub worst_projector: WorstProjector,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionCheck>,
    pub merged_near_duplicates: usize,
    pub reduction: String,
    pub tolerances: Tolerances,
    pub spanning_set_id: String,
}

impl MarginalityCertificate {
    pub fn bloch(&self) -> Option<BlochVector> {
        match &self.witness {
            Some(Witness::Bloch { bloch, .. }) => Some(BlochVector::new(bloch[0], bloch[1], bloch[2])),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

pub fn certify_marginal(f: &FrameFunction, s: &SpanningSet, tol: &Tolerances) -> Result<MarginalityCertificate> {
    certify_marginal_with(f, s, tol, DEFAULT_EXTENSION_DIM)
}

/// Like [`certify_marginal`], exhibiting the extension on a witness system
/// of dimension `dim_b ∈ [2, 4]`.
pub fn certify_marginal_with(
    f: &FrameFunction,
    s: &SpanningSet,
    tol: &Tolerances,
    dim_b: usize,
) -> Result<MarginalityCertificate> {
    if !(2..=MAX_EXTENSION_DIM).contains(&dim_b) {
        return Err(Error::UnsupportedDimension(dim_b));
    }
    let rec = reconstruct_density(f, s, tol)?;
    let (min_eig, eigenvector) = min_eigenpair(&rec.rho_hat);

    let verdict = if rec.linear_residual <= tol.lin && min_eig >= -tol.psd {
        Verdict::Marginal
    } else if rec.linear_residual > tol.lin || min_eig < -tol.margin {
        Verdict::NonMarginal
    } else {
        Verdict::Inconclusive
    };

    let witness = if s.dim == 2 {
        let b = BlochVector::from_matrix(&rec.rho_hat)?;
        Some(Witness::Bloch { bloch: b.as_array(), norm: b.norm() })
    } else if min_eig < -tol.psd {
        Some(Witness::Eigen { min_eig, eigenvector: eigenvector.iter().map(|z| [z.re, z.im]).collect() })
    } else {
        None
    };

    let extension = if verdict == Verdict::Marginal {
        let rho_f = DensityMatrix::new(rec.rho_hat.clone(), tol)?;
        let rho_ab = extend_to_composite(&rho_f, &DensityMatrix::maximally_mixed(dim_b), tol)?;
        let reduced = partial_trace_b_matrix(rho_ab.matrix(), s.dim, dim_b)?;
        Some(ExtensionCheck { dim_b, partial_trace_error: reduced.distance(rho_f.matrix()) })
    } else {
        None
    };

    let worst = &s.projectors[rec.worst_index];
    Ok(MarginalityCertificate {
        verdict,
        dim: s.dim,
        rho_hat: rec.rho_hat,
        linear_residual: rec.linear_residual,
        min_eig,
        witness,
        worst_projector: WorstProjector {
            index: rec.worst_index,
            key: projector_key(worst, tol.key),
            residual: rec.linear_residual,
        },
        extension,
        merged_near_duplicates: f.merged_near_duplicates(),
        reduction: REDUCTION.into(),
        tolerances: *tol,
        spanning_set_id: s.id.clone(),
    })
}

/// `ρ_f ⊗ σ_B`, whose partial trace over B is `ρ_f`.
pub fn extend_to_composite(rho_f: &DensityMatrix, sigma_b: &DensityMatrix, tol: &Tolerances) -> Result<DensityMatrix> {
    let m = tensor_capped(rho_f.matrix(), sigma_b.matrix(), tol.max_dim)?;
    // Trace and positivity are inherited factor-wise; tensoring multiplies
    // the per-factor slack, so validate at the product's scale.
    let mut relaxed = *tol;
    relaxed.tr = tol.tr * 2.0 + f64::EPSILON * (m.rows() as f64);
    relaxed.herm = tol.herm * 2.0;
    DensityMatrix::new(m, &relaxed)
}

#[derive(Debug, Clone, PartialEq)]
pub enum WitnessDescriptor {
    Bloch { bloch: BlochVector, norm: f64, excess: f64 },
    NegativeEigenvalue { value: f64, eigenvector: Vec<C64> },
    WorstResidual { index: usize, key: ProjectorKey, residual: f64 },
}

impl fmt::Display for WitnessDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bloch { norm, excess, .. } => write!(f, "Bloch norm {norm:.4}, excess {excess:.4}"),
            Self::NegativeEigenvalue { value, .. } => write!(f, "negative eigenvalue {value:.4e}"),
            Self::WorstResidual { index, key, residual } => {
                write!(f, "projector #{index} ({key}) residual {residual:.4e}")
            }
        }
    }
}

/// Human-readable reason a certificate rejected its function.
pub fn marginality_witness(cert: &MarginalityCertificate) -> Result<WitnessDescriptor> {
    if cert.verdict != Verdict::NonMarginal {
        return Err(Error::NotApplicable { verdict: cert.verdict.to_string() });
    }
    if cert.linear_residual > cert.tolerances.lin {
        return Ok(WitnessDescriptor::WorstResidual {
            index: cert.worst_projector.index,
            key: cert.worst_projector.key.clone(),
            residual: cert.worst_projector.residual,
        });
    }
    if cert.dim == 2 {
        let b = BlochVector::from_matrix(&cert.rho_hat)?;
        let norm = b.norm();
        return Ok(WitnessDescriptor::Bloch { bloch: b, norm, excess: norm - 1.0 });
    }
    let (value, eigenvector) = min_eigenpair(&cert.rho_hat);
    Ok(WitnessDescriptor::NegativeEigenvalue { value, eigenvector })
}
