//! Seeded random instances for sweeps. Every generator takes the caller's
//! RNG so runs are reproducible from a single seed.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::hodge::{BField, ComplexStructure};
use crate::linalg::{IntMatrix, RatMatrix};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A product of `steps` elementary operations: row additions by `±1`, row
/// swaps and row negations.
pub fn random_unimodular<R: Rng + ?Sized>(rng: &mut R, dim: usize, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(dim);
    if dim < 2 {
        return m;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..dim);
        let mut j = rng.gen_range(0..dim - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..6) {
            0 => m.swap_rows(i, j),
            1 => {
                for c in 0..dim {
                    m[(i, c)] = -&m[(i, c)];
                }
            }
            op => {
                let sign = if op % 2 == 0 { 1 } else { -1 };
                for c in 0..dim {
                    let delta = &m[(j, c)] * sign;
                    m[(i, c)] += delta;
                }
            }
        }
    }
    m
}

/// Entries uniform in `[-bound, bound]`, resampled until nonsingular.
pub fn random_nonsingular<R: Rng + ?Sized>(rng: &mut R, dim: usize, bound: i64) -> IntMatrix {
    loop {
        let m = IntMatrix::from_fn(dim, dim, |_, _| BigInt::from(rng.gen_range(-bound..=bound)));
        if !m.determinant().expect("square").is_zero() {
            return m;
        }
    }
}

/// Anti-symmetric with zero diagonal and entries in `[-bound, bound]`.
pub fn random_antisymmetric<R: Rng + ?Sized>(rng: &mut R, dim: usize, bound: i64) -> IntMatrix {
    let mut m = IntMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let x = BigInt::from(rng.gen_range(-bound..=bound));
            m[(j, i)] = -&x;
            m[(i, j)] = x;
        }
    }
    m
}

/// `P·J₀·P⁻¹` with `P` a random unimodular matrix times a positive diagonal.
pub fn random_complex_structure<R: Rng + ?Sized>(rng: &mut R, genus: usize) -> ComplexStructure {
    let dim = 2 * genus;
    let u = random_unimodular(rng, dim, 3 * dim).to_rational();
    let scales: Vec<BigRational> = (0..dim)
        .map(|_| BigRational::from_integer(rng.gen_range(1..=3).into()))
        .collect();
    let p = &u * &RatMatrix::diagonal(&scales);
    let p_inv = p.inverse().expect("invertible");
    let j = &(&p * ComplexStructure::standard(genus).matrix()) * &p_inv;
    ComplexStructure::new(j).expect("conjugate of a complex structure")
}

/// `B = K/n` with `K` anti-symmetric, entries in `[-bound, bound]`.
pub fn random_b_field<R: Rng + ?Sized>(
    rng: &mut R,
    genus: usize,
    n: &BigInt,
    bound: i64,
) -> Result<BField> {
    let k = random_antisymmetric(rng, 2 * genus, bound);
    let b = k
        .to_rational()
        .scale(&BigRational::new(1.into(), n.clone()));
    BField::new(b, n)
}
