use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    (0..k).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
}

/// The `k`-th exterior power of a square matrix.
///
/// Rows and columns are indexed by `k`-subsets of `0..r` in lexicographic
/// order; entry `(I, J)` is the minor on rows `I` and columns `J`.
pub fn exterior_power(a: &IntMatrix, k: usize) -> Result<IntMatrix> {
    a.ensure_square()?;
    let r = a.rows();
    if k > r {
        return Err(Error::ExteriorDegreeOutOfRange { k, rank: r });
    }
    let subsets: Vec<Vec<usize>> = (0..r).combinations(k).collect();
    let n = subsets.len();
    let mut data = Vec::with_capacity(n * n);
    for rows in &subsets {
        for cols in &subsets {
            data.push(a.submatrix(rows, cols).determinant()?);
        }
    }
    IntMatrix::new(n, n, data)
}

/// Whether `m` is the square of an integer. Zero counts.
pub fn is_perfect_square(m: &BigInt) -> Result<bool> {
    if m.is_negative() {
        return Err(Error::NegativeInput(m.clone()));
    }
    let root = m.sqrt();
    Ok(&root * &root == *m)
}
