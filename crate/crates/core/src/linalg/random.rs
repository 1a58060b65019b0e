use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::operator::Operator;
use crate::error::{Error, Result};

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Seeded complex Gaussian matrix (entries of unit variance).
pub fn random_gaussian(rows: usize, cols: usize, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Operator::from_matrix_unchecked(gaussian_matrix(&mut rng, rows, cols))
}

/// Random isometry `C^cols -> C^rows` from a seed.
pub fn random_isometry(rows: usize, cols: usize, seed: u64) -> Result<Operator> {
    random_isometry_with(&mut ChaCha8Rng::seed_from_u64(seed), rows, cols)
}

/// Orthonormal-column factor of a complex Gaussian matrix.
///
/// The `R` factor of the QR decomposition is normalized to a positive
/// diagonal, which makes the distribution invariant under left multiplication
/// by unitaries. `rows == cols` gives a random unitary.
pub fn random_isometry_with<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
) -> Result<Operator> {
    if rows < cols {
        return Err(Error::Shape {
            context: "random_isometry (no isometry into a smaller space)",
            left: (rows, cols),
            right: (cols, cols),
        });
    }
    if cols == 0 {
        return Ok(Operator::zeros(rows, 0));
    }
    let g = gaussian_matrix(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    Ok(Operator::from_matrix_unchecked(q))
}

pub fn random_unitary(n: usize, seed: u64) -> Operator {
    random_isometry(n, n, seed).expect("square")
}

pub fn random_unitary_with<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    random_isometry_with(rng, n, n).expect("square")
}
