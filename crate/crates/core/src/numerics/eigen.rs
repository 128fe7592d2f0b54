//! Cyclic Jacobi eigendecomposition for small symmetric matrices.
//!
//! The ambient dimension in this domain is small (m ≲ 20), where Jacobi is
//! simple, foolproof and accurate.

use super::frame::Frame;
use crate::{Error, Result, JACOBI_MAX_SWEEPS, JACOBI_THRESHOLD, SYMMETRY_TOL};

/// Eigen-decompose a symmetric `m×m` matrix (row-major).
///
/// Returns eigenvalues sorted descending and the matching orthonormal
/// eigenvectors as frame rows, satisfying `S v = λ v` within `1e-8 ‖S‖`.
pub fn jacobi_eigen(m: usize, s: &[f64]) -> Result<(Vec<f64>, Frame)> {
    if s.len() != m * m {
        return Err(Error::Shape {
            context: "jacobi_eigen entry count",
            expected: m * m,
            got: s.len(),
        });
    }
    let mut max_dev: f64 = 0.0;
    for i in 0..m {
        for j in (i + 1)..m {
            max_dev = max_dev.max((s[i * m + j] - s[j * m + i]).abs());
        }
    }
    if max_dev > SYMMETRY_TOL {
        return Err(Error::Symmetry {
            max_dev,
            tol: SYMMETRY_TOL,
        });
    }

    let mut a = s.to_vec();
    // v holds eigenvectors as columns during the iteration.
    let mut v = vec![0.0; m * m];
    for i in 0..m {
        v[i * m + i] = 1.0;
    }
    let scale: f64 = a
        .iter()
        .fold(0.0f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..m {
            for q in (p + 1)..m {
                off = off.max(a[p * m + q].abs());
            }
        }
        if off <= JACOBI_THRESHOLD * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // Rotate rows/columns p and q of A.
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - sn * akq;
                    a[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - sn * aqk;
                    a[q * m + k] = sn * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[k * m + p];
                    let vkq = v[k * m + q];
                    v[k * m + p] = c * vkp - sn * vkq;
                    v[k * m + q] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        a[j * m + j]
            .partial_cmp(&a[i * m + i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * m + i]).collect();
    let mut rows = vec![0.0; m * m];
    for (r, &col) in order.iter().enumerate() {
        for k in 0..m {
            rows[r * m + k] = v[k * m + col];
        }
    }
    // Jacobi keeps near-perfect orthogonality; a final pass removes the
    // last bits of drift so the Frame invariant holds.
    let frame = super::frame::orthonormalize(m, m, &rows)?;
    Ok((eigenvalues, frame))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let (vals, vecs) = jacobi_eigen(2, &[3.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        assert!(vecs.row(0)[0].abs() > 0.999);
        assert!(vecs.row(1)[1].abs() > 0.999);
    }

    #[test]
    fn two_by_two_by_hand() {
        let (vals, vecs) = jacobi_eigen(2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        // Eigenvectors are (1,1)/sqrt(2) and (1,-1)/sqrt(2) up to sign.
        assert!((vecs.row(0)[0].abs() - inv_sqrt2).abs() < 1e-10);
        assert!((vecs.row(0)[1].abs() - inv_sqrt2).abs() < 1e-10);
        assert!((vecs.row(0)[0] - vecs.row(0)[1]).abs() < 1e-10);
        assert!((vecs.row(1)[0] + vecs.row(1)[1]).abs() < 1e-10);
    }

    #[test]
    fn random_spd_reconstruction() {
        use crate::RngStream;
        let g = RngStream::new(77).normal_vec(25);
        // S = AᵀA is symmetric positive semidefinite.
        let mut s = vec![0.0; 25];
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = 0.0;
                for k in 0..5 {
                    acc += g[k * 5 + i] * g[k * 5 + j];
                }
                s[i * 5 + j] = acc;
            }
        }
        let (vals, vecs) = jacobi_eigen(5, &s).unwrap();
        // Reconstruct VᵀΛV and compare.
        let mut recon = vec![0.0; 25];
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = 0.0;
                for r in 0..5 {
                    acc += vecs.row(r)[i] * vals[r] * vecs.row(r)[j];
                }
                recon[i * 5 + j] = acc;
            }
        }
        let scale: f64 = s.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (a, b) in recon.iter().zip(&s) {
            assert!((a - b).abs() <= 1e-8 * scale.max(1.0));
        }
        for w in vals.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
    }

    #[test]
    fn eigenpairs_satisfy_definition() {
        let s = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0];
        let (vals, vecs) = jacobi_eigen(3, &s).unwrap();
        for r in 0..3 {
            for i in 0..3 {
                let mut sv = 0.0;
                for j in 0..3 {
                    sv += s[i * 3 + j] * vecs.row(r)[j];
                }
                assert!((sv - vals[r] * vecs.row(r)[i]).abs() < 1e-8 * 4.0);
            }
        }
    }

    #[test]
    fn non_symmetric_rejected() {
        let err = jacobi_eigen(2, &[1.0, 0.5, 0.2, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Symmetry { .. }));
    }
}
