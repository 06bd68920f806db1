use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use super::matrix::IntMatrix;
use super::smith::smith_normal_form;
use crate::error::{Error, Result};

/// A finite abelian group `Z/d_1 ⊕ … ⊕ Z/d_k` in invariant-factor form.
///
/// `d_1 | d_2 | … | d_k`, every `d_i >= 2`. The trivial group is the empty chain.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FiniteAbelianGroup {
    factors: Vec<BigInt>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    /// Accepts a divisibility chain of positive integers; entries equal to 1
    /// are stripped.
    pub fn from_invariant_factors(chain: Vec<BigInt>) -> Result<Self> {
        if let Some(bad) = chain.iter().find(|d| !d.is_positive()) {
            return Err(Error::InvalidChain(format!("entry {bad} is not positive")));
        }
        if let Some(w) = chain.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::InvalidChain(format!(
                "{} does not divide {}",
                w[0], w[1]
            )));
        }
        Ok(Self {
            factors: chain.into_iter().filter(|d| !d.is_one()).collect(),
        })
    }

    /// Canonical form of `Z/m_1 ⊕ … ⊕ Z/m_k` for arbitrary positive orders.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Result<Self> {
        if let Some(bad) = orders.iter().find(|d| !d.is_positive()) {
            return Err(Error::InvalidChain(format!("order {bad} is not positive")));
        }
        let snf = smith_normal_form(&IntMatrix::diagonal(orders));
        Self::from_invariant_factors(snf.diagonal())
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Minimal number of generators.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// Whether the group is `⊕ (Z/a_i)^2`, i.e. the chain pairs up into equal
    /// consecutive entries.
    pub fn is_spectrally_paired(&self) -> bool {
        self.paired_orders().is_some()
    }

    /// The `a_i` of a decomposition `⊕ (Z/a_i)^2`, if one exists.
    pub fn paired_orders(&self) -> Option<Vec<BigInt>> {
        if !self.factors.len().is_multiple_of(2) {
            return None;
        }
        self.factors
            .chunks(2)
            .map(|p| (p[0] == p[1]).then(|| p[0].clone()))
            .collect()
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let orders: Vec<BigInt> = self.factors.iter().chain(&other.factors).cloned().collect();
        Self::from_cyclic_orders(&orders).expect("invariant factors are positive")
    }

    /// Number of elements killed by `m`: `∏ gcd(m, d_i)`.
    pub fn torsion_count(&self, m: &BigInt) -> BigInt {
        self.factors.iter().map(|d| d.gcd(m)).product()
    }
}

impl fmt::Debug for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}
