//! Complex matrix algebra: projectors, density matrices, tensor products,
//! partial trace, Bloch coordinates and seeded random unitaries.

pub mod bloch;
pub mod linalg;
pub mod matrix;
pub mod random;

pub use bloch::{bloch_to_density, density_to_bloch, sigma_x, sigma_y, sigma_z, BlochVector};
pub use linalg::{
    born_probability, min_eigenpair, min_eigenvalue, partial_trace_b, partial_trace_b_matrix, tensor,
    tensor_capped, trace_product, MAX_PRODUCT_DIM,
};
pub use matrix::{ComplexMatrix, DensityMatrix, Projector, C64};
pub use random::{haar_unitary, random_density, random_ket, random_matrix, random_projector, random_unitary, rng_from_seed};

#[cfg(test)]
pub(crate) use matrix::ONE;
pub(crate) use matrix::ZERO;

use crate::error::Result;
use crate::tolerance::Tolerances;

/// Validates `matrix` as a projector.
pub fn make_projector(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Projector> {
    Projector::new(matrix, tol)
}
