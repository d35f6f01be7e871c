use nalgebra::DMatrix;

use super::matrix::{hermitian_eigen, ComplexMatrix, DensityMatrix, Projector, C64, ZERO};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Default cap on the side length of a tensor product.
pub const MAX_PRODUCT_DIM: usize = 64;

/// Kronecker product `a ⊗ b` with subsystem `a` major: row `(i_a, i_b)`
/// lands at `i_a * rows(b) + i_b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    tensor_capped(a, b, MAX_PRODUCT_DIM)
}

pub fn tensor_capped(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let rows = ra.saturating_mul(rb);
    let cols = ca.saturating_mul(cb);
    let dim = rows.max(cols);
    if dim > max_dim {
        return Err(Error::DimensionOverflow { dim, max: max_dim });
    }
    let mut out = DMatrix::from_element(rows, cols, ZERO);
    for ia in 0..ra {
        for ja in 0..ca {
            let s = a[(ia, ja)];
            if s == ZERO {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out[(ia * rb + ib, ja * cb + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    ComplexMatrix::from_dmatrix(out)
}

/// `(Tr_B X)_{ij} = Σ_k X_{(i,k),(j,k)}` for any square `X` on `dim_a·dim_b`.
pub fn partial_trace_b_matrix(x: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    let n = dim_a * dim_b;
    if !x.is_square() {
        return Err(Error::NotSquare { rows: x.rows(), cols: x.cols() });
    }
    if x.rows() != n || dim_a == 0 || dim_b == 0 {
        return Err(Error::DimensionMismatch { expected: n, got: x.rows() });
    }
    let out = DMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b).map(|k| x[(i * dim_b + k, j * dim_b + k)]).sum::<C64>()
    });
    ComplexMatrix::from_dmatrix(out)
}

/// Reduced state of subsystem A.
pub fn partial_trace_b(
    rho_ab: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    tol: &Tolerances,
) -> Result<DensityMatrix> {
    let reduced = partial_trace_b_matrix(rho_ab.matrix(), dim_a, dim_b)?;
    DensityMatrix::new(reduced, tol)
}

/// `Tr(A B)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert!(a.rows() == b.cols() && a.cols() == b.rows(), "shape mismatch");
    let mut acc = ZERO;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Born rule `Tr(P ρ)`, rounded into `[0, 1]`.
pub fn born_probability(p: &Projector, rho: &DensityMatrix, tol: &Tolerances) -> Result<f64> {
    if p.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: rho.dim() });
    }
    let t = trace_product(p.matrix(), rho.matrix());
    if t.im.abs() > tol.herm {
        return Err(Error::NotHermitian { residual: t.im.abs() });
    }
    if t.re < -tol.prob || t.re > 1.0 + tol.prob {
        return Err(Error::ValueOutOfRange(t.re));
    }
    Ok(t.re.clamp(0.0, 1.0))
}

/// Smallest eigenvalue of a Hermitian matrix (computed on its Hermitian part).
pub fn min_eigenvalue(h: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    if !h.is_square() {
        return Err(Error::NotSquare { rows: h.rows(), cols: h.cols() });
    }
    let residual = h.hermitian_residual();
    if residual > tol.herm {
        return Err(Error::NotHermitian { residual });
    }
    Ok(hermitian_eigen(h).0[0])
}

/// Smallest eigenpair of the Hermitian part of `h`.
pub fn min_eigenpair(h: &ComplexMatrix) -> (f64, Vec<C64>) {
    let (values, vectors) = hermitian_eigen(h);
    (values[0], vectors.column(0).iter().copied().collect())
}
