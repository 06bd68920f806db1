//! Twist classes as finite data modulo `n`.
//!
//! `μ_n`-valued quantities are stored additively as exponents in `Z/n`
//! (`exp(2πi·t/n) ↦ t`). The Weil pairing `X[n] × X̂[n] → μ_n` is the dot
//! product `⟨x, ξ⟩ = ξᵀx mod n` in fixed coordinates, and a twist is the
//! homomorphism `x ↦ A·x` for an anti-symmetric `A`.
//!
//! The graph `{(x, A·x)}` is tested against the descent pairing
//! `((x, ξ), (y, η)) ↦ ξᵀy + ηᵀx mod n`, which vanishes on the graph exactly
//! when `A + Aᵀ ≡ 0 (mod n)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{smith_normal_form, FiniteAbelianGroup, IntMatrix};

/// Largest group accepted by [`verify_cocycle_table`].
pub const MAX_TABLE_GROUP_ORDER: usize = 4096;

fn check_modulus(n: &BigInt) -> Result<()> {
    if n.is_positive() {
        Ok(())
    } else {
        Err(Error::InvalidModulus(n.clone()))
    }
}

fn is_alternating_mod(m: &IntMatrix, n: &BigInt) -> bool {
    m.is_square() && isotropy_check(m, n) && (0..m.rows()).all(|i| m[(i, i)].mod_floor(n).is_zero())
}

/// Anti-symmetric `2g x 2g` matrix modulo `n`, entries in `[0, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AntisymTwist {
    n: BigInt,
    genus: usize,
    matrix: IntMatrix,
}

impl AntisymTwist {
    pub fn new(matrix: &IntMatrix, n: &BigInt) -> Result<Self> {
        check_modulus(n)?;
        matrix.ensure_square()?;
        if !matrix.rows().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "twist matrix must be 2g x 2g, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !is_alternating_mod(matrix, n) {
            return Err(Error::NotAntisymmetric { n: n.clone() });
        }
        Ok(Self {
            n: n.clone(),
            genus: matrix.rows() / 2,
            matrix: matrix.reduce_mod(n),
        })
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn image(&self) -> FiniteAbelianGroup {
        image_mod_n(&self.matrix, &self.n).expect("square with positive modulus")
    }
}

/// Alternating `k x k` form modulo `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlternatingForm {
    n: BigInt,
    matrix: IntMatrix,
}

impl AlternatingForm {
    pub fn new(matrix: &IntMatrix, n: &BigInt) -> Result<Self> {
        check_modulus(n)?;
        matrix.ensure_square()?;
        if !is_alternating_mod(matrix, n) {
            return Err(Error::NotAntisymmetric { n: n.clone() });
        }
        Ok(Self {
            n: n.clone(),
            matrix: matrix.reduce_mod(n),
        })
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }
}

/// Bilinear 2-cocycle `a(σ, τ) = σᵀ·β·τ mod n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BilinearCocycle {
    n: BigInt,
    matrix: IntMatrix,
}

impl BilinearCocycle {
    pub fn new(matrix: &IntMatrix, n: &BigInt) -> Result<Self> {
        check_modulus(n)?;
        matrix.ensure_square()?;
        Ok(Self {
            n: n.clone(),
            matrix: matrix.reduce_mod(n),
        })
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Full value table on `(Z/m)^k`, row-major over [`group_elements`].
    ///
    /// Requires `m·β ≡ 0 (mod n)` so the form descends to `(Z/m)^k`.
    pub fn table(&self, m: usize) -> Result<Vec<BigInt>> {
        let m_big = BigInt::from(m);
        if m == 0
            || !self
                .matrix
                .scale(&m_big)
                .reduce_mod(&self.n)
                .is_zero_matrix()
        {
            return Err(Error::NotWellDefined {
                m: m_big,
                n: self.n.clone(),
            });
        }
        let elements = group_elements(m, self.rank());
        let as_big: Vec<Vec<BigInt>> = elements
            .iter()
            .map(|e| e.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        let mut out = Vec::with_capacity(elements.len() * elements.len());
        for s in &as_big {
            let row = self.matrix.transpose().mul_vec(s);
            for t in &as_big {
                let v: BigInt = row.iter().zip(t).map(|(a, b)| a * b).sum();
                out.push(v.mod_floor(&self.n));
            }
        }
        Ok(out)
    }
}

/// Twist whose image in `(Z/n)^2g` is `⊕ (Z/a_i)^2`:
/// `A = diag((n/a_1)·J, …, (n/a_r)·J, 0, …, 0)` with `J = [[0, 1], [-1, 0]]`.
pub fn antisym_with_image(targets: &[BigInt], n: &BigInt, genus: usize) -> Result<AntisymTwist> {
    check_modulus(n)?;
    if targets.len() > genus {
        return Err(Error::TooManyTargets {
            count: targets.len(),
            genus,
        });
    }
    if let Some(bad) = targets
        .iter()
        .find(|a| !a.is_positive() || !n.is_multiple_of(a))
    {
        return Err(Error::TargetNotDivisor {
            target: bad.clone(),
            n: n.clone(),
        });
    }
    let mut a = IntMatrix::zeros(2 * genus, 2 * genus);
    for (i, target) in targets.iter().enumerate() {
        let scale = n / target;
        a[(2 * i, 2 * i + 1)] = scale.clone();
        a[(2 * i + 1, 2 * i)] = -scale;
    }
    AntisymTwist::new(&a, n)
}

/// Invariant factors of `A·(Z/n)^k ⊆ (Z/n)^k`.
///
/// The lattice `L = A·Z^k + n·Z^k` has Smith diagonal `e_1 | … | e_k` with
/// every `e_i | n`, and the image is `L / n·Z^k ≅ ⊕ Z/(n/e_i)`.
pub fn image_mod_n(a: &IntMatrix, n: &BigInt) -> Result<FiniteAbelianGroup> {
    check_modulus(n)?;
    a.ensure_square()?;
    let k = a.rows();
    let stacked = IntMatrix::hstack(a, &IntMatrix::identity(k).scale(n))?;
    let snf = smith_normal_form(&stacked);
    let orders: Vec<BigInt> = snf.diagonal().iter().map(|e| n / e).collect();
    FiniteAbelianGroup::from_cyclic_orders(&orders)
}

/// `E = β - βᵀ mod n`.
pub fn pairing_of_cocycle(c: &BilinearCocycle) -> AlternatingForm {
    let e = (&c.matrix - &c.matrix.transpose()).reduce_mod(&c.n);
    AlternatingForm {
        n: c.n.clone(),
        matrix: e,
    }
}

/// Canonical normalized lift: `β_ij = E_ij` below the diagonal, zero elsewhere.
pub fn cocycle_from_pairing(e: &AlternatingForm) -> BilinearCocycle {
    let k = e.rank();
    let beta = IntMatrix::from_fn(k, k, |i, j| {
        if i > j {
            e.matrix[(i, j)].clone()
        } else {
            BigInt::zero()
        }
    });
    BilinearCocycle {
        n: e.n.clone(),
        matrix: beta,
    }
}

/// Whether the graph `{(x, A·x)}` is isotropic: `A + Aᵀ ≡ 0 (mod n)`.
pub fn isotropy_check(a: &IntMatrix, n: &BigInt) -> bool {
    n.is_positive() && a.is_square() && (a + &a.transpose()).reduce_mod(n).is_zero_matrix()
}

/// Elements of `(Z/m)^k` in lexicographic order, first coordinate most
/// significant.
pub fn group_elements(m: usize, k: usize) -> Vec<Vec<usize>> {
    let count = m
        .checked_pow(k as u32)
        .expect("group order overflows usize");
    (0..count)
        .map(|mut idx| {
            let mut digits = vec![0; k];
            for slot in digits.iter_mut().rev() {
                *slot = idx % m;
                idx /= m;
            }
            digits
        })
        .collect()
}

/// Exhaustive check that a table of exponents on `(Z/m)^k` is a normalized
/// 2-cocycle modulo `n`:
/// `a(σ₁,σ₂) + a(σ₁+σ₂,σ₃) ≡ a(σ₂,σ₃) + a(σ₁,σ₂+σ₃)` and `a(0,σ) ≡ a(σ,0) ≡ 0`.
///
/// `table[i·|G| + j] = a(σ_i, σ_j)` with elements ordered as in
/// [`group_elements`].
pub fn verify_cocycle_table(n: &BigInt, m: usize, k: usize, table: &[BigInt]) -> Result<bool> {
    check_modulus(n)?;
    if m == 0 {
        return Err(Error::InvalidModulus(BigInt::zero()));
    }
    let order = m
        .checked_pow(k as u32)
        .filter(|&o| o <= MAX_TABLE_GROUP_ORDER)
        .ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "(Z/{m})^{k} exceeds {MAX_TABLE_GROUP_ORDER} elements"
            ))
        })?;
    if table.len() != order * order {
        return Err(Error::TableSizeMismatch {
            expected: order * order,
            actual: table.len(),
        });
    }
    let a: Vec<BigInt> = table.iter().map(|x| x.mod_floor(n)).collect();
    if (0..order).any(|s| !a[s].is_zero() || !a[s * order].is_zero()) {
        return Ok(false);
    }

    // plus[i·|G| + j] is the index of σ_i + σ_j
    let mut plus = vec![0usize; order * order];
    for i in 0..order {
        for j in 0..order {
            let (mut x, mut y, mut place, mut out) = (i, j, 1, 0);
            for _ in 0..k {
                out += ((x % m + y % m) % m) * place;
                x /= m;
                y /= m;
                place *= m;
            }
            plus[i * order + j] = out;
        }
    }

    let holds = |eq: &dyn Fn(usize, usize, usize, usize) -> bool| {
        (0..order).all(|s1| {
            (0..order).all(|s2| {
                let s12 = plus[s1 * order + s2];
                (0..order).all(|s3| {
                    let s23 = plus[s2 * order + s3];
                    eq(
                        s1 * order + s2,
                        s12 * order + s3,
                        s2 * order + s3,
                        s1 * order + s23,
                    )
                })
            })
        })
    };
    // residues below 2^62 add without overflow
    if let Some(small) = u64::try_from(n).ok().filter(|&v| v < 1 << 62) {
        let r: Vec<u64> = a
            .iter()
            .map(|x| u64::try_from(x).expect("reduced"))
            .collect();
        Ok(holds(&|p, q, u, v| {
            (r[p] + r[q]) % small == (r[u] + r[v]) % small
        }))
    } else {
        Ok(holds(&|p, q, u, v| {
            (&a[p] + &a[q] - &a[u] - &a[v]).mod_floor(n).is_zero()
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        x.into()
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows)
    }

    #[test]
    fn lemma_twist_examples() {
        let t = antisym_with_image(&[big(5)], &big(5), 1).unwrap();
        assert_eq!(t.matrix(), &m(&[&[0, 1], &[4, 0]]));
        assert_eq!(t.image().invariant_factors(), &[big(5), big(5)]);

        let t = antisym_with_image(&[], &big(7), 2).unwrap();
        assert!(t.matrix().is_zero_matrix());
        assert!(t.image().is_trivial());

        let t = antisym_with_image(&[big(2)], &big(6), 1).unwrap();
        assert_eq!(t.matrix(), &m(&[&[0, 3], &[3, 0]]));
        assert_eq!(t.image().invariant_factors(), &[big(2), big(2)]);
        assert!(isotropy_check(t.matrix(), t.n()));
    }

    #[test]
    fn lemma_twist_errors() {
        assert_eq!(
            antisym_with_image(&[big(2), big(2)], &big(2), 1),
            Err(Error::TooManyTargets { count: 2, genus: 1 })
        );
        assert_eq!(
            antisym_with_image(&[big(4)], &big(6), 1),
            Err(Error::TargetNotDivisor {
                target: big(4),
                n: big(6)
            })
        );
        assert!(antisym_with_image(&[], &big(0), 1).is_err());
    }

    #[test]
    fn image_examples() {
        assert!(image_mod_n(&IntMatrix::zeros(2, 2), &big(3))
            .unwrap()
            .is_trivial());
        assert_eq!(
            image_mod_n(&m(&[&[0, 3], &[-3, 0]]), &big(6))
                .unwrap()
                .invariant_factors(),
            &[big(2), big(2)]
        );
        let blocks = IntMatrix::block_diagonal(&m(&[&[0, 2], &[-2, 0]]), &m(&[&[0, 1], &[-1, 0]]));
        assert_eq!(
            image_mod_n(&blocks, &big(4)).unwrap().invariant_factors(),
            &[big(2), big(2), big(4), big(4)]
        );
    }

    #[test]
    fn pairing_examples() {
        let zero = BilinearCocycle::new(&IntMatrix::zeros(2, 2), &big(7)).unwrap();
        assert!(pairing_of_cocycle(&zero).matrix().is_zero_matrix());

        let c = BilinearCocycle::new(&m(&[&[0, 0], &[-1, 0]]), &big(6)).unwrap();
        assert_eq!(pairing_of_cocycle(&c).matrix(), &m(&[&[0, 1], &[5, 0]]));

        let c = BilinearCocycle::new(&m(&[&[1, 2], &[0, 1]]), &big(5)).unwrap();
        assert_eq!(pairing_of_cocycle(&c).matrix(), &m(&[&[0, 2], &[3, 0]]));
    }

    #[test]
    fn lift_examples() {
        let e = AlternatingForm::new(&IntMatrix::zeros(3, 3), &big(4)).unwrap();
        assert!(cocycle_from_pairing(&e).matrix().is_zero_matrix());

        let e = AlternatingForm::new(&m(&[&[0, 1], &[-1, 0]]), &big(6)).unwrap();
        assert_eq!(cocycle_from_pairing(&e).matrix(), &m(&[&[0, 0], &[5, 0]]));

        let e = AlternatingForm::new(&m(&[&[0, 2], &[3, 0]]), &big(5)).unwrap();
        let beta = cocycle_from_pairing(&e);
        assert_eq!(beta.matrix(), &m(&[&[0, 0], &[3, 0]]));
        assert_eq!(pairing_of_cocycle(&beta), e);
    }

    #[test]
    fn alternating_validation() {
        assert!(AlternatingForm::new(&m(&[&[1, 0], &[0, 0]]), &big(3)).is_err());
        assert!(AlternatingForm::new(&m(&[&[0, 1], &[1, 0]]), &big(3)).is_err());
        // mod 2 symmetric and alternating coincide off the diagonal
        assert!(AlternatingForm::new(&m(&[&[0, 1], &[1, 0]]), &big(2)).is_ok());
        assert!(AlternatingForm::new(&m(&[&[1, 1], &[1, 0]]), &big(2)).is_err());
    }

    #[test]
    fn cocycle_tables() {
        let c = BilinearCocycle::new(&m(&[&[1, 1], &[0, 1]]), &big(2)).unwrap();
        let table = c.table(2).unwrap();
        assert_eq!(table.len(), 16);
        assert!(verify_cocycle_table(&big(2), 2, 2, &table).unwrap());

        let mut bumped = table.clone();
        bumped[5] += 1;
        assert!(!verify_cocycle_table(&big(2), 2, 2, &bumped).unwrap());

        let mut unnormalized = table;
        unnormalized[1] = big(1);
        assert!(!verify_cocycle_table(&big(2), 2, 2, &unnormalized).unwrap());

        assert_eq!(
            verify_cocycle_table(&big(2), 2, 2, &vec![big(0); 15]),
            Err(Error::TableSizeMismatch {
                expected: 16,
                actual: 15
            })
        );
    }

    #[test]
    fn table_requires_descent() {
        let c = BilinearCocycle::new(&m(&[&[1]]), &big(4)).unwrap();
        assert!(c.table(2).is_err());
        assert!(c.table(4).is_ok());
    }

    #[test]
    fn isotropy_examples() {
        assert!(isotropy_check(&m(&[&[0, 1], &[-1, 0]]), &big(2)));
        assert!(!isotropy_check(&IntMatrix::identity(2), &big(4)));
        assert!(isotropy_check(&IntMatrix::identity(2), &big(2)));
    }

    #[test]
    fn element_order() {
        assert_eq!(
            group_elements(2, 2),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }
}
