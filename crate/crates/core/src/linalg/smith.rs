use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::group::FiniteAbelianGroup;
use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal in Smith form.
///
/// The nonzero diagonal entries of `D` are positive and form a divisibility
/// chain; zeros (one per unit of free rank) come last.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn source_rows(&self) -> usize {
        self.d.rows()
    }

    pub fn source_cols(&self) -> usize {
        self.d.cols()
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        self.d.diagonal_entries()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|x| !x.is_zero()).count()
    }

    /// Nonzero diagonal entries, including any leading 1s.
    pub fn nonzero_diagonal(&self) -> Vec<BigInt> {
        self.diagonal()
            .into_iter()
            .filter(|x| !x.is_zero())
            .collect()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&d, t) else {
                return SmithDecomposition { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut residue = false;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                add_row_multiple(&mut d, i, t, &q);
                add_row_multiple(&mut u, i, t, &q);
                residue |= !d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                add_col_multiple(&mut d, j, t, &q);
                add_col_multiple(&mut v, j, t, &q);
                residue |= !d[(t, j)].is_zero();
            }
            if residue {
                continue;
            }

            // Pivot must divide the whole trailing block.
            let offender =
                (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)])));
            match offender {
                Some(i) => {
                    let minus_one = BigInt::from(-1);
                    add_row_multiple(&mut d, t, i, &minus_one);
                    add_row_multiple(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    SmithDecomposition { u, d, v }
}

/// Invariant factors of `Z^r / A·Z^r` for nonsingular square `A`.
pub fn cokernel_of(a: &IntMatrix) -> Result<FiniteAbelianGroup> {
    a.ensure_square()?;
    let snf = smith_normal_form(a);
    if snf.rank() < a.rows() {
        return Err(Error::Singular);
    }
    FiniteAbelianGroup::from_invariant_factors(snf.diagonal())
}

fn smallest_nonzero(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let x = &d[(i, j)];
            if x.is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| x.abs() < d[(bi, bj)].abs()) {
                if x.abs() == BigInt::from(1) {
                    return Some((i, j));
                }
                best = Some((i, j));
            }
        }
    }
    best
}

/// row[target] -= q * row[source]
fn add_row_multiple(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    for j in 0..m.cols() {
        let delta = q * &m[(source, j)];
        if !delta.is_zero() {
            m[(target, j)] -= delta;
        }
    }
}

/// col[target] -= q * col[source]
fn add_col_multiple(m: &mut IntMatrix, target: usize, source: usize, q: &BigInt) {
    for i in 0..m.rows() {
        let delta = q * &m[(i, source)];
        if !delta.is_zero() {
            m[(i, target)] -= delta;
        }
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for j in 0..m.cols() {
        m[(i, j)] = -&m[(i, j)];
    }
}
