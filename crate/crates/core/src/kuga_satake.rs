//! Degree bookkeeping for the isogenies between Kuga–Satake varieties.
//!
//! For `W ⊆ V` of index `d = |det A|` and rank `r`, the induced map on even
//! exterior algebras has kernel of order `d^(2^(r-2))`. The oracle computes
//! it grade by grade as `∏_{j ≥ 1} |det Λ^{2j} A|`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{binomial, exterior_power, is_perfect_square, IntMatrix};

/// `Σ_j C(r, 2j) = 2^(r-1)`.
pub fn even_clifford_rank(r: usize) -> Result<BigInt> {
    if r < 1 {
        return Err(Error::RankTooSmall { rank: r, min: 1 });
    }
    Ok((0..=r / 2).map(|j| binomial(r, 2 * j)).sum())
}

/// `d^(2^(r-2))`.
pub fn ks_degree(d: &BigInt, r: usize) -> Result<BigInt> {
    if r < 2 {
        return Err(Error::RankTooSmall { rank: r, min: 2 });
    }
    if !d.is_positive() {
        return Err(Error::NegativeInput(d.clone()));
    }
    if r > 33 {
        return Err(Error::DimensionMismatch(format!("rank {r} is too large")));
    }
    Ok(d.pow(1u32 << (r - 2)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradeRecord {
    /// The exterior degree `2j`.
    pub grade: usize,
    pub det_abs: BigInt,
    /// `C(r-1, 2j-1)`, the exponent with `det_abs = d^exponent`.
    pub exponent: BigInt,
    /// `C(r, 2j)`, the rank of `Λ^{2j}`.
    pub rank: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KSDegreeReport {
    pub r: usize,
    pub d: BigInt,
    pub closed_form: BigInt,
    pub oracle_value: BigInt,
    pub per_grade: Vec<GradeRecord>,
}

impl KSDegreeReport {
    pub fn totals_agree(&self) -> bool {
        self.closed_form == self.oracle_value
    }

    /// Every grade satisfies `|det Λ^{2j} A| = d^C(r-1, 2j-1)`.
    pub fn grades_consistent(&self) -> bool {
        self.per_grade.iter().all(|g| {
            let e: u32 = (&g.exponent).try_into().expect("small exponent");
            self.d.pow(e) == g.det_abs
        })
    }

    /// Sum of the `C(r, 2j)` over the recorded grades.
    pub fn rank_exponent_total(&self) -> BigInt {
        self.per_grade.iter().map(|g| &g.rank).sum()
    }

    pub fn closed_form_is_square(&self) -> bool {
        is_perfect_square(&self.closed_form).expect("positive")
    }
}

pub fn exterior_kernel_oracle(a: &IntMatrix) -> Result<KSDegreeReport> {
    a.ensure_square()?;
    let r = a.rows();
    let det = a.determinant()?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let d = det.abs();
    let closed_form = ks_degree(&d, r)?;
    let mut per_grade = Vec::new();
    let mut oracle_value = BigInt::one();
    for grade in (2..=r).step_by(2) {
        let det_abs = exterior_power(a, grade)?.determinant()?.abs();
        oracle_value *= &det_abs;
        per_grade.push(GradeRecord {
            grade,
            det_abs,
            exponent: binomial(r - 1, grade - 1),
            rank: binomial(r, grade),
        });
    }
    Ok(KSDegreeReport {
        r,
        d,
        closed_form,
        oracle_value,
        per_grade,
    })
}
