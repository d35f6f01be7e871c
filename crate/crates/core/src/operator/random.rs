//! Seeded sampling of unitaries, states and projectors.
//!
//! Every sampler takes its generator explicitly; [`rng_from_seed`] gives the
//! ChaCha8 stream used throughout, which is reproducible on every platform.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, DensityMatrix, Projector, C64, ONE};
use crate::tolerance::Tolerances;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let entries: Vec<C64> = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, entries).expect("finite gaussian entries")
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the diagonal of
/// `R` rotated to be real-positive.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let g = random_matrix(dim, dim, rng).into_inner();
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases: Vec<C64> = (0..dim)
        .map(|i| {
            let d = r[(i, i)];
            let n = d.norm();
            if n > 0.0 {
                d / n
            } else {
                ONE
            }
        })
        .collect();
    let u = DMatrix::from_fn(dim, dim, |i, j| q[(i, j)] * phases[j]);
    ComplexMatrix::from_dmatrix(u).expect("finite unitary")
}

pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    haar_unitary(dim, &mut rng_from_seed(seed))
}

/// Haar-random unit vector.
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Hilbert–Schmidt random state `G G† / Tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = random_matrix(dim, dim, rng);
    let w = g.matmul(&g.dagger());
    let tr = w.trace().re;
    DensityMatrix::new(w.scale(1.0 / tr).hermitize(), &Tolerances::default()).expect("positive by construction")
}

/// Projector onto the first `rank` columns of a Haar unitary.
pub fn random_projector<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Projector {
    assert!(rank <= dim);
    let u = haar_unitary(dim, rng);
    let cols: Vec<Vec<C64>> = (0..rank).map(|c| u.column(c).iter().copied().collect()).collect();
    Projector::onto(&cols, dim, &Tolerances::default()).expect("orthonormal columns")
}
