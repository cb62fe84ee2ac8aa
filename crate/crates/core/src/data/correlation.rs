//! Random correlation matrices by the onion construction.
//!
//! The matrix is grown one row and column at a time. Starting from a 2×2
//! matrix whose off-diagonal is `2u - 1` with `u ~ Beta(β, β)`, each step draws
//! a squared radius `y ~ Beta(k/2, β)` (β shrinking by one half per step) and a
//! uniform direction `u` on the unit sphere in `R^k`, and appends the column
//! `L·√y·u` where `L` is the Cholesky factor of the current matrix. With the
//! shape parameter η = 1 (β starting at `η + (d-2)/2`) the result is uniformly
//! distributed over all `d×d` correlation matrices.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Beta, Distribution, StandardNormal};

use crate::error::{QfsError, Result};
use crate::rng::{stream_rng, Stream};

const ETA: f64 = 1.0;

/// A `dim × dim` correlation matrix drawn from the seed's correlation stream.
pub fn gen_correlation_matrix(dim: usize, seed: u64) -> Result<DMatrix<f64>> {
    let mut rng = stream_rng(seed, Stream::Correlation);
    onion(dim, &mut rng)
}

pub(crate) fn onion<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(QfsError::InvalidArgument(
            "correlation matrix dimension must be at least 1".into(),
        ));
    }
    let mut corr = DMatrix::<f64>::identity(dim, dim);
    if dim == 1 {
        return Ok(corr);
    }
    let mut beta = ETA + (dim as f64 - 2.0) / 2.0;
    let r12 = 2.0 * sample_beta(beta, beta, rng) - 1.0;
    corr[(0, 1)] = r12;
    corr[(1, 0)] = r12;

    for k in 2..dim {
        beta -= 0.5;
        let y = sample_beta(k as f64 / 2.0, beta, rng);
        let mut direction: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
        let radius = y.sqrt();
        for d in &mut direction {
            *d *= radius / norm;
        }
        let leading = corr.view((0, 0), (k, k)).clone_owned();
        let chol = leading
            .cholesky()
            .ok_or(QfsError::NotPositiveDefinite("onion step"))?;
        let l = chol.l();
        for i in 0..k {
            let z: f64 = (0..=i).map(|j| l[(i, j)] * direction[j]).sum();
            corr[(i, k)] = z;
            corr[(k, i)] = z;
        }
    }
    Ok(corr)
}

fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> f64 {
    Beta::new(a, b)
        .expect("beta parameters are positive for η = 1")
        .sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
        m.clone().symmetric_eigen().eigenvalues.min()
    }

    #[test]
    fn dim_one_is_unit() {
        let m = gen_correlation_matrix(1, 3).unwrap();
        assert_eq!(m, DMatrix::from_element(1, 1, 1.0));
    }

    #[test]
    fn valid_correlation_matrix() {
        for dim in [2, 3, 4, 6, 10, 25] {
            for seed in 0..10 {
                let m = gen_correlation_matrix(dim, seed).unwrap();
                for i in 0..dim {
                    assert_eq!(m[(i, i)], 1.0);
                    for j in 0..dim {
                        assert_eq!(m[(i, j)], m[(j, i)]);
                        assert!(m[(i, j)].abs() <= 1.0);
                    }
                }
                assert!(min_eigenvalue(&m) >= -1e-9, "dim {dim} seed {seed}");
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(
            gen_correlation_matrix(5, 42).unwrap(),
            gen_correlation_matrix(5, 42).unwrap()
        );
        assert_ne!(
            gen_correlation_matrix(5, 42).unwrap(),
            gen_correlation_matrix(5, 43).unwrap()
        );
    }

    #[test]
    fn off_diagonal_marginal_is_centered() {
        // Under the uniform law each off-diagonal entry is Beta(d/2, d/2) on
        // (-1, 1): mean 0, variance 1/(d+1).
        let trials = 4000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for seed in 0..trials {
            let m = gen_correlation_matrix(3, seed).unwrap();
            sum += m[(0, 2)];
            sq += m[(0, 2)] * m[(0, 2)];
        }
        let mean = sum / trials as f64;
        let var = sq / trials as f64 - mean * mean;
        assert!(mean.abs() < 0.04, "mean {mean}");
        assert!((var - 0.25).abs() < 0.03, "var {var}");
    }
}
