//! Column Hermite normal form, used to canonicalize lattices given by generators.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::matrix::{IntMatrix, RatMatrix};
use crate::error::{Error, Result};

/// Column Hermite normal form of a full-row-rank generator matrix.
///
/// Returns the unique square lower-triangular `H` with `H·Z^m = G·Z^N`,
/// positive diagonal, and `0 <= H[i][j] < H[i][i]` for `j < i`.
/// Fails with [`Error::Singular`] if `G` does not have full row rank.
pub fn column_hermite_form(generators: &IntMatrix) -> Result<IntMatrix> {
    let (m, n) = (generators.rows(), generators.cols());
    if n < m {
        return Err(Error::Singular);
    }
    let mut h = generators.clone();
    for i in 0..m {
        for j in i + 1..n {
            if h[(i, j)].is_zero() {
                continue;
            }
            let (p, q) = (h[(i, i)].clone(), h[(i, j)].clone());
            let eg = p.extended_gcd(&q);
            let (a, b) = (&p / &eg.gcd, &q / &eg.gcd);
            // [col_i, col_j] <- [x col_i + y col_j, -b col_i + a col_j]; det = 1
            for r in 0..m {
                let ci = h[(r, i)].clone();
                let cj = h[(r, j)].clone();
                h[(r, i)] = &eg.x * &ci + &eg.y * &cj;
                h[(r, j)] = &a * &cj - &b * &ci;
            }
        }
        if h[(i, i)].is_zero() {
            return Err(Error::Singular);
        }
        if h[(i, i)].is_negative() {
            for r in 0..m {
                h[(r, i)] = -&h[(r, i)];
            }
        }
        for j in 0..i {
            let q = h[(i, j)].div_floor(&h[(i, i)]);
            if q.is_zero() {
                continue;
            }
            for r in 0..m {
                let delta = &q * &h[(r, i)];
                h[(r, j)] -= delta;
            }
        }
    }
    let cols: Vec<usize> = (0..m).collect();
    let rows: Vec<usize> = (0..m).collect();
    Ok(h.submatrix(&rows, &cols))
}

/// Canonical basis (as columns) of the lattice generated by the columns of a
/// rational matrix with full row rank.
pub fn rational_lattice_basis(generators: &RatMatrix) -> Result<RatMatrix> {
    let den = generators.common_denominator();
    let scaled = generators.map(|x| (x * BigRational::from_integer(den.clone())).to_integer());
    let h = column_hermite_form(&scaled)?;
    let inv_den = BigRational::new(BigInt::from(1), den);
    Ok(h.to_rational().scale(&inv_den))
}
