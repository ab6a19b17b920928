//! Deterministic seeding and random matrix ensembles.
//!
//! Every randomised routine in this crate takes an explicit 64-bit seed and
//! derives per-trial seeds through [`derive_seed`], a pure function. Parallel
//! trials therefore produce the same stream regardless of scheduling, and any
//! single trial can be replayed in isolation from its reported seed.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::ComplexMatrix;

/// The stream cipher RNG used everywhere; platform-independent output.
pub type SeededRng = ChaCha8Rng;

/// Build the RNG for a given seed.
pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of sub-stream `index` from a master seed.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(index ^ 0xA076_1D64_78BD_642F))
}

/// One standard complex Gaussian draw: independent N(0, 1) real and
/// imaginary parts, real part drawn first.
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Square Ginibre matrix: iid standard complex Gaussian entries, filled
/// row-major so the draw order is part of the determinism contract.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            m[(i, j)] = standard_complex(rng);
        }
    }
    m
}

/// Random matrix with no symmetry (plain Ginibre sample).
pub fn random_general<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_dmatrix(ginibre(dim, rng)).expect("Gaussian entries are finite")
}

/// Random Hermitian matrix (G + G†)/2.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let h = (&g + g.adjoint()).scale(0.5);
    ComplexMatrix::from_dmatrix(h).expect("Gaussian entries are finite")
}

/// Random positive semidefinite matrix G G†; full rank with probability 1.
pub fn random_psd<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let p = &g * g.adjoint();
    ComplexMatrix::from_dmatrix(p).expect("Gaussian entries are finite")
}

/// Haar-random unitary: QR of a Ginibre sample with the column phases fixed
/// by the sign of the corresponding diagonal entry of R.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    ComplexMatrix::from_dmatrix(q).expect("Gaussian entries are finite")
}

/// Random full-rank density matrix G G† / tr(G G†).
pub fn random_density<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, rng);
    let p = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| p[(i, i)].re).sum();
    ComplexMatrix::from_dmatrix(p.unscale(tr)).expect("Gaussian entries are finite")
}

/// Random unit vector with complex Gaussian components.
pub fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<Complex64> {
    let mut v = DVector::from_fn(dim, |_, _| standard_complex(rng));
    let n = v.norm();
    v.unscale_mut(n);
    v
}
