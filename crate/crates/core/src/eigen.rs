//! Dense symmetric eigensolvers.
//!
//! Small matrices go through cyclic Jacobi, which is simple and
//! reproducible; larger ones through Householder tridiagonalization with
//! implicit QR, which is roughly an order of magnitude faster at the sizes
//! the level-6 and level-4 Schreier graphs reach.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Off-diagonal threshold for Jacobi, relative to the Frobenius norm.
pub const JACOBI_THRESHOLD: f64 = 1e-13;
pub const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest dimension handed to Jacobi by [`symmetric_eigenvalues`].
pub const JACOBI_MAX_DIM: usize = 256;
/// Largest dense dimension accepted at all.
pub const DENSE_CAP: usize = 4096;

/// Eigenvalues of a dense row-major symmetric matrix by cyclic Jacobi,
/// sorted ascending.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, dim: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), dim * dim);
    let norm = libm::sqrt(a.iter().map(|x| x * x).sum::<f64>());
    let target = JACOBI_THRESHOLD * norm.max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..dim)
            .flat_map(|i| (0..dim).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * dim + j] * a[i * dim + j])
            .sum();
        if libm::sqrt(off) <= target {
            let mut eig: Vec<f64> = (0..dim).map(|i| a[i * dim + i]).collect();
            eig.sort_by(f64::total_cmp);
            return Ok(eig);
        }
        for p in 0..dim {
            for q in p + 1..dim {
                let apq = a[p * dim + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * dim + q] - a[p * dim + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..dim {
                    let akp = a[k * dim + p];
                    let akq = a[k * dim + q];
                    a[k * dim + p] = c * akp - s * akq;
                    a[k * dim + q] = s * akp + c * akq;
                }
                for k in 0..dim {
                    let apk = a[p * dim + k];
                    let aqk = a[q * dim + k];
                    a[p * dim + k] = c * apk - s * aqk;
                    a[q * dim + k] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::NoConvergence { sweeps: JACOBI_MAX_SWEEPS })
}

/// Eigenvalues by tridiagonalization and implicit QR, sorted ascending.
pub fn tridiagonal_eigenvalues(a: Vec<f64>, dim: usize) -> Result<Vec<f64>> {
    assert_eq!(a.len(), dim * dim);
    let m = DMatrix::from_row_slice(dim, dim, &a);
    let mut eig: Vec<f64> = m
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or(Error::NoConvergence { sweeps: 0 })?
        .eigenvalues
        .iter()
        .copied()
        .collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Picks Jacobi up to [`JACOBI_MAX_DIM`], QR beyond, rejecting anything above
/// [`DENSE_CAP`].
pub fn symmetric_eigenvalues(a: Vec<f64>, dim: usize) -> Result<Vec<f64>> {
    if dim > DENSE_CAP {
        return Err(Error::DimensionTooLarge { dim, cap: DENSE_CAP });
    }
    if dim <= JACOBI_MAX_DIM {
        jacobi_eigenvalues(a, dim)
    } else {
        tridiagonal_eigenvalues(a, dim)
    }
}

/// Groups sorted values whose consecutive gaps are at most `tol`; each
/// cluster is reported by its mean.
pub fn cluster(sorted: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=sorted.len() {
        if i == sorted.len() || sorted[i] - sorted[i - 1] > tol {
            if i > start {
                let block = &sorted[start..i];
                out.push((block.iter().sum::<f64>() / block.len() as f64, block.len()));
            }
            start = i;
        }
    }
    out
}

/// Determinant by LU with partial pivoting.
pub fn determinant(mut a: Vec<f64>, dim: usize) -> f64 {
    assert_eq!(a.len(), dim * dim);
    let mut det = 1.0;
    for col in 0..dim {
        let pivot = (col..dim)
            .max_by(|&i, &j| a[i * dim + col].abs().total_cmp(&a[j * dim + col].abs()))
            .expect("non-empty range");
        if a[pivot * dim + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(pivot * dim + k, col * dim + k);
            }
            det = -det;
        }
        let d = a[col * dim + col];
        det *= d;
        for r in col + 1..dim {
            let f = a[r * dim + col] / d;
            if f != 0.0 {
                for k in col..dim {
                    a[r * dim + k] -= f * a[col * dim + k];
                }
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(dim: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let x: f64 = rng.gen_range(-1.0..1.0);
                a[i * dim + j] = x;
                a[j * dim + i] = x;
            }
        }
        a
    }

    #[test]
    fn two_by_two() {
        let e = jacobi_eigenvalues(vec![0.5, 0.5, 0.5, 0.5], 2).unwrap();
        assert!(e[0].abs() < 1e-15 && (e[1] - 1.0).abs() < 1e-15);
        assert_eq!(jacobi_eigenvalues(vec![1.0], 1).unwrap(), vec![1.0]);
    }

    #[test]
    fn solvers_agree() {
        for (dim, seed) in [(5, 1), (40, 2), (90, 3)] {
            let a = random_symmetric(dim, seed);
            let j = jacobi_eigenvalues(a.clone(), dim).unwrap();
            let q = tridiagonal_eigenvalues(a.clone(), dim).unwrap();
            for (x, y) in j.iter().zip(&q) {
                assert!((x - y).abs() < 1e-10, "{x} vs {y}");
            }
            let trace: f64 = (0..dim).map(|i| a[i * dim + i]).sum();
            assert!((j.iter().sum::<f64>() - trace).abs() < 1e-9);
        }
    }

    #[test]
    fn clustering() {
        let c = cluster(&[-1.0, 0.0, 1e-12, 1.0, 1.0 + 1e-12, 1.0 + 2e-12], 1e-8);
        assert_eq!(c.iter().map(|x| x.1).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert!(cluster(&[], 1e-8).is_empty());
    }

    #[test]
    fn lu_determinant() {
        assert_eq!(determinant(vec![2.0, 2.0, 2.0, 2.0], 2), 0.0);
        let d = determinant(vec![0.0, 1.0, 1.0, 0.0], 2);
        assert_eq!(d, -1.0);
        let d = determinant(vec![4.0, 3.0, 0.0, 6.0, 3.0, 1.0, 1.0, 2.0, 5.0], 3);
        // 4(15-2) - 3(30-1) + 0
        assert!((d - (52.0 - 87.0)).abs() < 1e-12);
    }

    #[test]
    fn oversized_is_rejected() {
        assert!(matches!(
            symmetric_eigenvalues(Vec::new(), DENSE_CAP + 1),
            Err(Error::DimensionTooLarge { .. })
        ));
    }
}
