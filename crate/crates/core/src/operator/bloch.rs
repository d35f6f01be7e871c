//! Qubit Bloch-ball coordinates.
//!
//! σ_y uses the standard Pauli convention `[[0, −i], [i, 0]]`, so that
//! `ρ = (I + x σ_x + y σ_y + z σ_z)/2` has `ρ₀₁ = (x − i y)/2`.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn is_physical(&self, eps: f64) -> bool {
        self.norm() <= 1.0 + eps
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn neg(&self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }

    /// `(I + r·σ)/2` without any physicality check.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let entries = vec![
            C64::new((1.0 + self.z) / 2.0, 0.0),
            C64::new(self.x / 2.0, -self.y / 2.0),
            C64::new(self.x / 2.0, self.y / 2.0),
            C64::new((1.0 - self.z) / 2.0, 0.0),
        ];
        ComplexMatrix::new(2, 2, entries).expect("2x2 entries")
    }

    /// Coordinates `(Tr ρσ_x, Tr ρσ_y, Tr ρσ_z)` of any 2×2 matrix.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if m.rows() != 2 || m.cols() != 2 {
            return Err(Error::UnsupportedDimension(m.rows()));
        }
        let off = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        Ok(Self::new(2.0 * off.re, -2.0 * off.im, (m[(0, 0)] - m[(1, 1)]).re))
    }
}

pub fn bloch_to_density(r: BlochVector, tol: &Tolerances) -> Result<DensityMatrix> {
    if !(r.x.is_finite() && r.y.is_finite() && r.z.is_finite()) || !r.is_physical(tol.bloch) {
        return Err(Error::NonPhysicalBloch { norm: r.norm() });
    }
    // Slightly super-unit vectors inside the slack may dip below zero by
    // up to ε_bloch/2, so positivity is checked at that scale.
    let mut relaxed = *tol;
    relaxed.psd = relaxed.psd.max(tol.bloch);
    DensityMatrix::new(r.to_matrix(), &relaxed)
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    BlochVector::from_matrix(rho.matrix())
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::new(
        2,
        2,
        vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    )
    .expect("2x2")
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[1.0, -1.0])
}
