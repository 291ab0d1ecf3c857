//! Eigenvalues of complex Hermitian matrices by cyclic Jacobi rotations.
//!
//! Each rotation zeroes one off-diagonal pair (p, q) with the unitary
//!
//!   J[p][p] = c,          J[p][q] = -s w,
//!   J[q][p] = s conj(w),  J[q][q] = c,
//!
//! where w is the phase of a[p][q]. The angle solves t^2 - 2 tau t - 1 = 0
//! with tau = (a[q][q] - a[p][p]) / (2 |a[p][q]|), taking the smaller root
//! for stability. Off-diagonal mass is strictly decreasing, so sweeps
//! converge quadratically once small.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweep limit before giving up.
pub const MAX_SWEEPS: usize = 100;
/// Convergence: off-diagonal Frobenius mass relative to max(1, ||A||_F).
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;

fn off_diagonal_norm(n: usize, a: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[i * n + j].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

fn frobenius_norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// as (A + A') / 2 first; callers wanting a Hermiticity error must check
/// before calling.
pub fn hermitian_eigenvalues(n: usize, entries: &[Complex64]) -> Result<Vec<f64>> {
    if entries.len() != n * n {
        return Err(Error::BadMatrixShape {
            n,
            got: entries.len(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // Hermitize: halves of conjugate pairs average, diagonals become real.
    let mut a = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (entries[i * n + j] + entries[j * n + i].conj());
        }
    }
    let scale = frobenius_norm(&a).max(1.0);

    for _sweep in 0..MAX_SWEEPS {
        if off_diagonal_norm(n, &a) <= OFF_DIAGONAL_TOL * scale {
            let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
            eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eig);
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let w = apq / r;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    -tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i * n + p];
                    let aiq = a[i * n + q];
                    let new_ip = c * aip + s * w.conj() * aiq;
                    let new_iq = -s * w * aip + c * aiq;
                    a[i * n + p] = new_ip;
                    a[p * n + i] = new_ip.conj();
                    a[i * n + q] = new_iq;
                    a[q * n + i] = new_iq.conj();
                }
                let new_pp = c * c * app + 2.0 * c * s * r + s * s * aqq;
                let new_qq = s * s * app - 2.0 * c * s * r + c * c * aqq;
                a[p * n + p] = Complex64::new(new_pp, 0.0);
                a[q * n + q] = Complex64::new(new_qq, 0.0);
                a[p * n + q] = Complex64::ZERO;
                a[q * n + p] = Complex64::ZERO;
            }
        }
    }
    Err(Error::NoConvergence(MAX_SWEEPS))
}
