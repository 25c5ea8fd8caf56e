//! Seeded random streams.
//!
//! Every random draw in the workbench comes from ChaCha8 (`rand_chacha`)
//! seeded through `SeedableRng::seed_from_u64`. Complex Gaussian draws use the
//! standard normal distribution of `rand_distr` for the real part followed by
//! the imaginary part.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type WorkbenchRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> WorkbenchRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| complex_gaussian(rng))
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<Complex64> {
    // column-major fill keeps the draw order independent of nalgebra internals
    let mut m = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        for r in 0..dim {
            m[(r, c)] = complex_gaussian(rng);
        }
    }
    m
}

/// Uniform phase angle in `[0, 2π)`.
pub fn angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * std::f64::consts::TAU
}
