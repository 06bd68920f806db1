//! Isogenies as nonsingular integer matrices between rank-`2g` lattices.
//!
//! Throughout, the lattice `Λ ⊕ Λ*` carries the standard symplectic form
//! `S = [[0, I], [-I, 0]]`, i.e. `E((x, ξ), (y, η)) = η(x) - ξ(y)`. This is
//! the only sign convention used in the crate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{cokernel_of, is_perfect_square, FiniteAbelianGroup, IntMatrix};

/// An isogeny given by its action on first homology: `2g x 2g`, `det != 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeIsogeny {
    genus: usize,
    matrix: IntMatrix,
}

impl LatticeIsogeny {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        matrix.ensure_square()?;
        let dim = matrix.rows();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "isogeny matrix must be 2g x 2g with g >= 1, got {dim}x{dim}"
            )));
        }
        if matrix.determinant()?.is_zero() {
            return Err(Error::Singular);
        }
        Ok(Self {
            genus: dim / 2,
            matrix,
        })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `next ∘ self`: apply `self` first.
    pub fn then(&self, next: &LatticeIsogeny) -> Result<LatticeIsogeny> {
        LatticeIsogeny::new(next.matrix.checked_mul(&self.matrix)?)
    }

    pub fn degree(&self) -> BigInt {
        self.matrix
            .determinant()
            .expect("square by construction")
            .abs()
    }

    pub fn is_prime_to(&self, p: &BigInt) -> bool {
        self.degree().gcd(p).is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsogenyInvariants {
    pub degree: BigInt,
    pub kernel: FiniteAbelianGroup,
    pub principal: bool,
    pub spectrally_paired: bool,
}

pub fn kernel_and_degree(f: &LatticeIsogeny) -> IsogenyInvariants {
    let degree = f.degree();
    let kernel = cokernel_of(&f.matrix).expect("nonsingular by construction");
    IsogenyInvariants {
        principal: is_perfect_square(&degree).expect("degree is positive"),
        spectrally_paired: kernel.is_spectrally_paired(),
        degree,
        kernel,
    }
}

/// The isogeny `F'` with `F·F' = F'·F = n·I`, i.e. `n·F⁻¹`.
///
/// Exists exactly when the exponent of `coker F` divides `n`.
pub fn complement_isogeny(f: &IntMatrix, n: &BigInt) -> Result<IntMatrix> {
    f.ensure_square()?;
    if !n.is_positive() {
        return Err(Error::InvalidModulus(n.clone()));
    }
    let inverse = f.to_rational().inverse().ok_or(Error::Singular)?;
    inverse
        .scale(&BigRational::from_integer(n.clone()))
        .to_integer()
        .ok_or_else(|| Error::NotAnnihilatedByN { n: n.clone() })
}

/// `Φ = [[0, F], [-n·F'ᵀ, 0]]` acting on `Λ ⊕ Λ*`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedIsogeny {
    genus: usize,
    n: BigInt,
    f: IntMatrix,
    complement: IntMatrix,
    matrix: IntMatrix,
}

impl ExtendedIsogeny {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn f(&self) -> &IntMatrix {
        &self.f
    }

    pub fn complement(&self) -> &IntMatrix {
        &self.complement
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// `|det Φ|`, which equals `n^(4g)`.
    pub fn degree(&self) -> BigInt {
        self.matrix
            .determinant()
            .expect("square by construction")
            .abs()
    }
}

pub fn extend_isogeny(f: &IntMatrix, n: &BigInt) -> Result<ExtendedIsogeny> {
    let complement = complement_isogeny(f, n)?;
    let dim = f.rows();
    let zero = IntMatrix::zeros(dim, dim);
    let lower = -&complement.transpose().scale(n);
    let matrix = IntMatrix::block2x2(&zero, f, &lower, &zero)?;
    Ok(ExtendedIsogeny {
        genus: dim / 2,
        n: n.clone(),
        f: f.clone(),
        complement,
        matrix,
    })
}

/// `S = [[0, I], [-I, 0]]` on `Λ ⊕ Λ*` with `rank Λ = 2g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StandardSymplecticForm {
    genus: usize,
}

impl StandardSymplecticForm {
    pub fn new(genus: usize) -> Self {
        Self { genus }
    }

    /// Form on a `dim`-dimensional space; `dim` must be a positive multiple of 4.
    pub fn for_dimension(dim: usize) -> Option<Self> {
        (dim > 0 && dim.is_multiple_of(4)).then(|| Self::new(dim / 4))
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dimension(&self) -> usize {
        4 * self.genus
    }

    pub fn matrix(&self) -> IntMatrix {
        let half = 2 * self.genus;
        let i = IntMatrix::identity(half);
        let z = IntMatrix::zeros(half, half);
        IntMatrix::block2x2(&z, &i, &(-&i), &z).expect("square blocks")
    }

    /// `Mᵀ·S·M`.
    pub fn pullback(&self, m: &IntMatrix) -> IntMatrix {
        &(&m.transpose() * &self.matrix()) * m
    }
}

/// Whether `Φᵀ·S·Φ = n²·S` exactly. Shapes that cannot carry the standard
/// form are rejected.
pub fn is_conformal_symplectic(phi: &IntMatrix, n: &BigInt) -> bool {
    if !phi.is_square() {
        return false;
    }
    let Some(form) = StandardSymplecticForm::for_dimension(phi.rows()) else {
        return false;
    };
    form.pullback(phi) == form.matrix().scale(&(n * n))
}

pub fn verify_conformal_symplectic(phi: &ExtendedIsogeny) -> bool {
    is_conformal_symplectic(&phi.matrix, &phi.n)
}
