use std::fmt;
use std::ops::Deref;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::EntryCount { rows, cols, got: entries.len() });
        }
        Self::from_dmatrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.ncols() == 0 {
            return Err(Error::EntryCount { rows: m.nrows(), cols: m.ncols(), got: 0 });
        }
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                let z = m[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self(m))
    }

    /// Real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        Self(DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        }))
    }

    /// Outer product `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        let d = v.len();
        Self(DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj()))
    }

    pub fn inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|z| z * s))
    }

    pub fn trace(&self) -> C64 {
        self.0.diagonal().iter().sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F`. Panics on shape mismatch.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape(), "shape mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖A − A†‖_F`; infinite for non-square input.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.distance(&self.dagger())
    }

    /// `(A + A†)/2`.
    pub fn hermitize(&self) -> Self {
        Self((&self.0 + self.0.adjoint()).map(|z| z * 0.5))
    }

    /// Row-major copy of the entries.
    pub fn row_major(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows())
        } else {
            Err(Error::NotSquare { rows: self.rows(), cols: self.cols() })
        }
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;

    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{}) [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            f.write_str(if r == 0 { "[" } else { ", [" })?;
            for c in 0..self.cols() {
                let z = self.0[(r, c)];
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}{:+}i", z.re, z.im)?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Ascending eigenvalues and matching eigenvectors (columns) of the
/// Hermitian part of `h`.
pub(crate) fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, DMatrix<C64>) {
    let eig = SymmetricEigen::new(h.hermitize().into_inner());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(h.rows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Orthogonal projector on a Hilbert space of dimension `dim ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projector {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let dim = matrix.require_square()?;
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let herm = matrix.hermitian_residual();
        if herm > tol.herm {
            return Err(Error::NotHermitian { residual: herm });
        }
        let idem = matrix.matmul(&matrix).distance(&matrix);
        if idem > tol.proj {
            return Err(Error::NotIdempotent { residual: idem });
        }
        let (values, _) = hermitian_eigen(&matrix);
        let mut rank = 0;
        for &lambda in &values {
            if (lambda - 1.0).abs() <= tol.eig {
                rank += 1;
            } else if lambda.abs() > tol.eig {
                return Err(Error::NotIdempotent { residual: idem });
            }
        }
        Ok(Self { dim, matrix, rank })
    }

    /// Projector onto the span of orthonormal `columns` (not re-checked
    /// beyond the usual projector validation).
    pub fn onto(columns: &[Vec<C64>], dim: usize, tol: &Tolerances) -> Result<Self> {
        let mut m = ComplexMatrix::zeros(dim, dim);
        for v in columns {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
            }
            m = m.add(&ComplexMatrix::outer(v));
        }
        Self::new(m, tol)
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim), rank: dim }
    }

    /// Skips validation; for constructions that are projectors by algebra.
    pub(crate) fn from_parts(matrix: ComplexMatrix, rank: usize) -> Self {
        Self { dim: matrix.rows(), matrix, rank }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        Self {
            dim: self.dim,
            matrix: ComplexMatrix::identity(self.dim).sub(&self.matrix),
            rank: self.dim - self.rank,
        }
    }
}

/// Non-negative unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let dim = matrix.require_square()?;
        if dim < 2 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let herm = matrix.hermitian_residual();
        if herm > tol.herm {
            return Err(Error::NotHermitian { residual: herm });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > tol.tr {
            return Err(Error::NotUnitTrace { trace });
        }
        let (values, _) = hermitian_eigen(&matrix);
        let min_eig = values[0];
        if min_eig < -tol.psd {
            return Err(Error::NotPositive { min_eig });
        }
        Ok(Self { dim, matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn pure(psi: &[C64], tol: &Tolerances) -> Result<Self> {
        Self::new(ComplexMatrix::outer(psi), tol)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }
}
