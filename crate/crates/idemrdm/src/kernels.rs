//! Scalar kernels for overlap amplitudes: matrix permanent and determinant.
//!
//! The permanent uses Ryser's inclusion-exclusion over column subsets,
//!
//!   per(A) = (-1)^n * sum_{S != empty} (-1)^|S| * prod_i sum_{j in S} A[i][j],
//!
//! enumerated in Gray-code order so each subset step updates the row sums by
//! a single column, O(2^n * n) total. `permanent_naive` sums all n!
//! permutation products and serves as the oracle for the fast path.
//! The determinant uses partially pivoted LU with an exact-zero early return
//! when a pivot column vanishes relative to the matrix scale.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::Orbital;

/// Hard cap for `permanent_ryser`; 2^30 subset steps is already minutes.
pub const RYSER_MAX_ORDER: usize = 30;
/// Hard cap for `permanent_naive`; 9! permutation products.
pub const NAIVE_MAX_ORDER: usize = 9;
/// A pivot column whose largest entry is below this times max|A| is treated
/// as exactly zero, making rank-deficient determinants exact.
pub const PIVOT_ZERO_RELATIVE: f64 = 1e-14;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl SquareMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::BadMatrixShape {
                n,
                got: entries.len(),
            });
        }
        let m = Self { n, entries };
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::BadMatrixShape { n, got: row.len() });
            }
        }
        Self::new(n, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            entries[i * n + i] = Complex64::ONE;
        }
        Self { n, entries }
    }

    pub fn all_ones(n: usize) -> Self {
        Self {
            n,
            entries: vec![Complex64::ONE; n * n],
        }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = vec![Complex64::ZERO; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.entries[i * n + j];
            }
        }
        Self { n, entries }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn check_finite(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                let z = self.entries[i * self.n + j];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFiniteEntry(i, j));
                }
            }
        }
        Ok(())
    }
}

/// Gram matrix A[i][j] = <bra_i | ket_j> of two orbital lists.
pub fn gram_matrix(bra: &[Orbital], ket: &[Orbital]) -> Result<SquareMatrix> {
    if bra.len() != ket.len() {
        return Err(Error::LengthMismatch(bra.len(), ket.len()));
    }
    if bra.is_empty() {
        return Err(Error::EmptyOrbitals);
    }
    let n = bra.len();
    let mut entries = Vec::with_capacity(n * n);
    for b in bra {
        for k in ket {
            entries.push(b.braket(k)?);
        }
    }
    SquareMatrix::new(n, entries)
}

/// Permanent via Ryser's formula with Gray-code subset stepping.
pub fn permanent_ryser(a: &SquareMatrix) -> Result<Complex64> {
    let n = a.order();
    if n > RYSER_MAX_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: RYSER_MAX_ORDER,
        });
    }
    a.check_finite()?;
    // Row sums over the current column subset; Gray code flips one column
    // per step, so each subset costs O(n).
    let mut row_sums = vec![Complex64::ZERO; n];
    let mut acc = Complex64::ZERO;
    let mut popcount: u32 = 0;
    let steps: u64 = 1u64 << n;
    for k in 1..steps {
        let j = k.trailing_zeros() as usize; // toggled column
        let gray = k ^ (k >> 1);
        let added = gray & (1 << j) != 0;
        if added {
            popcount += 1;
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum += a.get(i, j);
            }
        } else {
            popcount -= 1;
            for (i, sum) in row_sums.iter_mut().enumerate() {
                *sum -= a.get(i, j);
            }
        }
        let mut prod = Complex64::ONE;
        for r in &row_sums {
            prod *= r;
        }
        // Sign (-1)^(n - |S|) folds the leading (-1)^n into the subset term.
        if (n as u32 - popcount).is_multiple_of(2) {
            acc += prod;
        } else {
            acc -= prod;
        }
    }
    Ok(acc)
}

/// Permanent by direct summation over all n! permutations. Test oracle.
pub fn permanent_naive(a: &SquareMatrix) -> Result<Complex64> {
    let n = a.order();
    if n > NAIVE_MAX_ORDER {
        return Err(Error::OrderTooLarge {
            n,
            limit: NAIVE_MAX_ORDER,
        });
    }
    a.check_finite()?;
    fn rec(a: &SquareMatrix, row: usize, used: u32, prod: Complex64, acc: &mut Complex64) {
        let n = a.order();
        if row == n {
            *acc += prod;
            return;
        }
        for j in 0..n {
            if used & (1 << j) == 0 {
                rec(a, row + 1, used | (1 << j), prod * a.get(row, j), acc);
            }
        }
    }
    let mut acc = Complex64::ZERO;
    rec(a, 0, 0, Complex64::ONE, &mut acc);
    Ok(acc)
}

/// Determinant via partially pivoted LU elimination.
pub fn determinant(a: &SquareMatrix) -> Result<Complex64> {
    a.check_finite()?;
    let n = a.order();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(Complex64::ZERO);
    }
    let mut m = a.entries().to_vec();
    let mut sign = 1.0;
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = m[col * n + col].norm();
        for row in col + 1..n {
            let mag = m[row * n + col].norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = row;
            }
        }
        if pivot_mag <= PIVOT_ZERO_RELATIVE * scale {
            return Ok(Complex64::ZERO);
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(col * n + j, pivot_row * n + j);
            }
            sign = -sign;
        }
        let pivot = m[col * n + col];
        for row in col + 1..n {
            let factor = m[row * n + col] / pivot;
            if factor == Complex64::ZERO {
                continue;
            }
            for j in col..n {
                let sub = factor * m[col * n + j];
                m[row * n + j] -= sub;
            }
        }
    }
    let mut det = Complex64::new(sign, 0.0);
    for i in 0..n {
        det *= m[i * n + i];
    }
    Ok(det)
}
