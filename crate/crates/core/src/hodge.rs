//! Lattice model of the twisted Hodge structure on `H_1(X) ⊕ H_1(X)*`.
//!
//! A complex structure `J` on `Λ = H_1(X, Z)` and a B-field `B` (rational,
//! anti-symmetric, `n·B` integral) determine
//!
//! ```text
//! J_α = [[J, 0], [B·J + Jᵀ·B, -Jᵀ]]
//! ```
//!
//! on `Λ ⊕ Λ*`. The covering map `π̃ = [[n·I, 0], [n·B, I]]` intertwines the
//! untwisted `blockdiag(J, -Jᵀ)` with `J_α`, and its kernel on the torus is
//! the graph of `-n·B` on the `n`-torsion.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cocycle::isotropy_check;
use crate::error::{Error, Result};
use crate::isogeny::StandardSymplecticForm;
use crate::linalg::{
    rational_lattice_basis, smith_normal_form, FiniteAbelianGroup, IntMatrix, RatMatrix,
};

/// Torus kernels larger than this are not enumerated.
pub const MAX_KERNEL_ENUMERATION: usize = 1 << 20;

fn rational(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

fn even_square_dim(m: &RatMatrix, what: &str) -> Result<usize> {
    m.ensure_square()?;
    if m.rows() == 0 || !m.rows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "{what} must be 2g x 2g with g >= 1, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.rows() / 2)
}

/// `J` on a rank-`2g` lattice with `J² = -I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStructure {
    genus: usize,
    j: RatMatrix,
}

impl ComplexStructure {
    pub fn new(j: RatMatrix) -> Result<Self> {
        let genus = even_square_dim(&j, "complex structure")?;
        if &j * &j != -&RatMatrix::identity(j.rows()) {
            return Err(Error::NotComplexStructure);
        }
        Ok(Self { genus, j })
    }

    /// `[[0, -I_g], [I_g, 0]]`.
    pub fn standard(genus: usize) -> Self {
        let i = RatMatrix::identity(genus);
        let z = RatMatrix::zeros(genus, genus);
        let j = RatMatrix::block2x2(&z, &(-&i), &i, &z).expect("square blocks");
        Self { genus, j }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.j
    }
}

/// Rational anti-symmetric `B` with `n·B` integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BField {
    genus: usize,
    n: BigInt,
    b: RatMatrix,
}

impl BField {
    pub fn new(b: RatMatrix, n: &BigInt) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::InvalidModulus(n.clone()));
        }
        let genus = even_square_dim(&b, "B-field")?;
        if b.transpose() != -&b {
            return Err(Error::InvalidBField("B is not anti-symmetric".into()));
        }
        if !b.scale(&rational(n)).is_integral() {
            return Err(Error::InvalidBField(format!("{n}·B is not integral")));
        }
        Ok(Self {
            genus,
            n: n.clone(),
            b,
        })
    }

    pub fn zero(genus: usize, n: &BigInt) -> Result<Self> {
        Self::new(RatMatrix::zeros(2 * genus, 2 * genus), n)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.b
    }

    /// `n·B` as an integer matrix.
    pub fn scaled(&self) -> IntMatrix {
        self.b
            .scale(&rational(&self.n))
            .to_integer()
            .expect("n·B integral by construction")
    }

    /// `(-n·B) mod n`, the twist matrix on the `n`-torsion.
    pub fn twist_matrix(&self) -> IntMatrix {
        (-&self.scaled()).reduce_mod(&self.n)
    }

    pub fn negated(&self) -> Self {
        Self {
            genus: self.genus,
            n: self.n.clone(),
            b: -&self.b,
        }
    }
}

/// `J_α` on `Λ ⊕ Λ*`, paired with the standard form `[[0, I], [-I, 0]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedComplexStructure {
    genus: usize,
    n: BigInt,
    j_alpha: RatMatrix,
}

impl TwistedComplexStructure {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.j_alpha
    }

    pub fn form(&self) -> StandardSymplecticForm {
        StandardSymplecticForm::new(self.genus)
    }
}

/// `blockdiag(J, -Jᵀ)`.
pub fn untwisted_j(cs: &ComplexStructure) -> RatMatrix {
    RatMatrix::block_diagonal(&cs.j, &(-&cs.j.transpose()))
}

pub fn build_j_alpha(cs: &ComplexStructure, b: &BField) -> Result<TwistedComplexStructure> {
    if cs.genus != b.genus {
        return Err(Error::DimensionMismatch(format!(
            "complex structure has genus {}, B-field genus {}",
            cs.genus, b.genus
        )));
    }
    let jt = cs.j.transpose();
    let lower_left = &(&b.b * &cs.j) + &(&jt * &b.b);
    let dim = cs.j.rows();
    let j_alpha = RatMatrix::block2x2(&cs.j, &RatMatrix::zeros(dim, dim), &lower_left, &(-&jt))?;
    Ok(TwistedComplexStructure {
        genus: cs.genus,
        n: b.n.clone(),
        j_alpha,
    })
}

/// `π̃ = [[n·I, 0], [n·B, I]]`, i.e. `(x, x̂) ↦ (n·x, x̂ + n·B·x)`.
pub fn pi_tilde(b: &BField) -> IntMatrix {
    let dim = 2 * b.genus;
    IntMatrix::block2x2(
        &IntMatrix::identity(dim).scale(&b.n),
        &IntMatrix::zeros(dim, dim),
        &b.scaled(),
        &IntMatrix::identity(dim),
    )
    .expect("square blocks")
}

/// Kernel `M⁻¹·Z^k / Z^k` of the torus map induced by `M`.
///
/// Points are stored as numerators over the group exponent. The enumeration
/// cap keeps the exponent, and so every numerator, well inside `u64`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusKernel {
    pub group: FiniteAbelianGroup,
    pub denominator: u64,
    /// One row per kernel element, entries in `[0, denominator)`, sorted.
    pub numerators: Vec<Vec<u64>>,
}

impl TorusKernel {
    /// The kernel points as rational vectors in `[0, 1)^k`, sorted.
    pub fn representatives(&self) -> Vec<Vec<BigRational>> {
        to_points(&self.numerators, self.denominator)
    }

    /// Whether the kernel is exactly the graph `{(u/n, A·u/n)}` mod `Z^{2k}`.
    pub fn is_twist_graph(&self, a: &IntMatrix, n: &BigInt) -> bool {
        if self.group.order() != n.pow(a.rows() as u32) {
            return false;
        }
        let Ok(side) = u64::try_from(n) else {
            return false;
        };
        let graph = twist_graph_numerators(a, n);
        if self.denominator == side {
            self.numerators == graph
        } else {
            self.representatives() == to_points(&graph, side)
        }
    }
}

fn to_points(numerators: &[Vec<u64>], denominator: u64) -> Vec<Vec<BigRational>> {
    numerators
        .iter()
        .map(|row| {
            row.iter()
                .map(|&x| BigRational::new(x.into(), denominator.into()))
                .collect()
        })
        .collect()
}

/// Walks the box `∏ [0, bounds_i)` in odometer order, adding `steps[i]`
/// (mod `modulus`) whenever coordinate `i` advances. A wrap subtracts
/// `bounds_i · steps[i]`, which callers arrange to vanish mod `modulus`.
fn walk_box(bounds: &[u64], steps: &[Vec<u64>], modulus: u64) -> Vec<Vec<u64>> {
    let dim = steps.first().map_or(0, Vec::len);
    let mut current = vec![0u64; dim];
    let mut counters = vec![0u64; bounds.len()];
    let mut out = vec![current.clone()];
    while let Some(pos) = (0..bounds.len()).find(|&i| counters[i] + 1 < bounds[i]) {
        counters[..pos].fill(0);
        counters[pos] += 1;
        for (x, s) in current.iter_mut().zip(&steps[pos]) {
            *x = (*x + s) % modulus;
        }
        out.push(current.clone());
    }
    out.sort_unstable();
    out
}

fn small(x: &BigInt) -> u64 {
    x.try_into().expect("bounded by the enumeration cap")
}

pub fn torus_map_kernel(m: &IntMatrix) -> Result<TorusKernel> {
    m.ensure_square()?;
    let k = m.rows();
    let snf = smith_normal_form(m);
    let diag = snf.diagonal();
    if diag.iter().any(Zero::is_zero) {
        return Err(Error::Singular);
    }
    let group = FiniteAbelianGroup::from_invariant_factors(diag.clone())?;
    let count = group.order();
    if count > BigInt::from(MAX_KERNEL_ENUMERATION) {
        return Err(Error::DimensionMismatch(format!(
            "kernel of order {count} is too large to enumerate"
        )));
    }

    // M⁻¹ = V·D⁻¹·U and U·Z^k = Z^k, so the kernel is {V·D⁻¹·w : 0 <= w_i < d_i}.
    // Over the exponent e, coordinate i steps by (e/d_i)·V[:, i].
    let exponent = group.exponent();
    let steps: Vec<Vec<u64>> = (0..k)
        .map(|i| {
            let weight = &exponent / &diag[i];
            (0..k)
                .map(|r| small(&(&snf.v[(r, i)] * &weight).mod_floor(&exponent)))
                .collect()
        })
        .collect();
    let bounds: Vec<u64> = diag.iter().map(small).collect();
    let denominator = small(&exponent);
    Ok(TorusKernel {
        numerators: walk_box(&bounds, &steps, denominator),
        denominator,
        group,
    })
}

/// Numerators of `(u, A·u) mod n` for `u ∈ (Z/n)^{2g}`, sorted. `n` must fit
/// in `u64` and `n^{2g}` points must fit in memory.
pub fn twist_graph_numerators(a: &IntMatrix, n: &BigInt) -> Vec<Vec<u64>> {
    let dim = a.rows();
    let side = u64::try_from(n).expect("modulus fits in u64");
    let steps: Vec<Vec<u64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|r| u64::from(r == i) % side)
                .chain((0..dim).map(|r| small(&a[(r, i)].mod_floor(n))))
                .collect()
        })
        .collect();
    walk_box(&vec![side; dim], &steps, side)
}

/// The points `(u/n, A·u/n) mod Z^{4g}` for `u ∈ (Z/n)^{2g}`, sorted.
pub fn twist_graph_points(a: &IntMatrix, n: &BigInt) -> Vec<Vec<BigRational>> {
    to_points(&twist_graph_numerators(a, n), small(n))
}

/// `Λ_A = Z^{4g} + (1/n)·{(u, A·u)}`, basis as columns in Hermite form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientLatticeModel {
    genus: usize,
    n: BigInt,
    basis: RatMatrix,
}

impl QuotientLatticeModel {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    pub fn basis(&self) -> &RatMatrix {
        &self.basis
    }

    /// `[Λ_A : Z^{4g}] = 1 / |det basis|`.
    pub fn index(&self) -> BigInt {
        let det = self.basis.determinant().expect("square basis").abs();
        (BigRational::one() / det).to_integer()
    }
}

pub fn quotient_lattice(a: &IntMatrix, n: &BigInt) -> Result<QuotientLatticeModel> {
    if !n.is_positive() {
        return Err(Error::InvalidModulus(n.clone()));
    }
    a.ensure_square()?;
    if !a.rows().is_multiple_of(2) {
        return Err(Error::DimensionMismatch(format!(
            "twist matrix must be 2g x 2g, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !isotropy_check(a, n) {
        return Err(Error::NotIsotropic { n: n.clone() });
    }
    let dim = a.rows();
    // columns (u, A·u) for the unit vectors u
    let graph = RatMatrix::from_fn(2 * dim, dim, |i, j| {
        if i < dim {
            rational(&BigInt::from(u8::from(i == j)))
        } else {
            rational(&a[(i - dim, j)])
        }
    });
    let inv_n = BigRational::new(BigInt::one(), n.clone());
    let generators = RatMatrix::hstack(&RatMatrix::identity(2 * dim), &graph.scale(&inv_n))?;
    Ok(QuotientLatticeModel {
        genus: dim / 2,
        n: n.clone(),
        basis: rational_lattice_basis(&generators)?,
    })
}

/// Whether `π̃(B)` maps `Λ_A` onto exactly `Z^{4g}`.
pub fn lattice_maps_onto_integers(b: &BField, a: &IntMatrix) -> Result<bool> {
    let model = quotient_lattice(a, &b.n)?;
    let image = &pi_tilde(b).to_rational() * &model.basis;
    Ok(image.is_integral() && image.determinant()?.abs().is_one())
}

/// The two presentations of the twisted torus coincide: `π̃(B)·Λ_{A_B} = Z^{4g}`
/// with `A_B = (-n·B) mod n`.
pub fn presentations_agree(b: &BField) -> Result<bool> {
    lattice_maps_onto_integers(b, &b.twist_matrix())
}

/// The three conditions of a symplectic isomorphism of integral Hodge structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticVerdict {
    pub unimodular: bool,
    pub preserves_form: bool,
    pub intertwines: bool,
}

impl SymplecticVerdict {
    pub fn holds(&self) -> bool {
        self.unimodular && self.preserves_form && self.intertwines
    }
}

/// Checks `|det ψ| = 1`, `ψᵀ·S·ψ = S` and `ψ·J_α(src) = J_α(dst)·ψ`.
/// Dimension mismatches fail every condition.
pub fn check_symplectic_isomorphism(
    psi: &IntMatrix,
    src: &TwistedComplexStructure,
    dst: &TwistedComplexStructure,
) -> SymplecticVerdict {
    let dim = src.form().dimension();
    if !psi.is_square() || psi.rows() != dim || dst.form().dimension() != dim {
        return SymplecticVerdict {
            unimodular: false,
            preserves_form: false,
            intertwines: false,
        };
    }
    let form = src.form();
    let psi_q = psi.to_rational();
    SymplecticVerdict {
        unimodular: psi.is_unimodular(),
        preserves_form: form.pullback(psi) == form.matrix(),
        intertwines: &psi_q * &src.j_alpha == &dst.j_alpha * &psi_q,
    }
}

pub fn is_symplectic_isomorphism(
    psi: &IntMatrix,
    src: &TwistedComplexStructure,
    dst: &TwistedComplexStructure,
) -> bool {
    check_symplectic_isomorphism(psi, src, dst).holds()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        x.into()
    }

    fn half_j_field() -> (ComplexStructure, BField) {
        // g = 1, J = [[0,-1],[1,0]], B = -J/2, n = 2
        let cs = ComplexStructure::standard(1);
        let b = cs.matrix().scale(&BigRational::new(big(-1), big(2)));
        (cs, BField::new(b, &big(2)).unwrap())
    }

    #[test]
    fn validation() {
        assert_eq!(
            ComplexStructure::new(RatMatrix::identity(2)),
            Err(Error::NotComplexStructure)
        );
        let sym = RatMatrix::from_ratio_rows(&[&[(0, 1), (1, 2)], &[(1, 2), (0, 1)]]);
        assert!(BField::new(sym, &big(2)).is_err());
        let third = RatMatrix::from_ratio_rows(&[&[(0, 1), (1, 3)], &[(-1, 3), (0, 1)]]);
        assert!(BField::new(third.clone(), &big(2)).is_err());
        assert!(BField::new(third, &big(3)).is_ok());
    }

    #[test]
    fn j_alpha_examples() {
        let cs = ComplexStructure::standard(1);
        let zero = BField::zero(1, &big(1)).unwrap();
        let ja = build_j_alpha(&cs, &zero).unwrap();
        assert_eq!(ja.matrix(), &untwisted_j(&cs));

        let (cs, b) = half_j_field();
        let ja = build_j_alpha(&cs, &b).unwrap();
        assert_eq!(
            ja.matrix(),
            &RatMatrix::block_diagonal(cs.matrix(), cs.matrix())
        );
        assert_eq!(ja.matrix() * ja.matrix(), -&RatMatrix::identity(4));
    }

    #[test]
    fn pi_tilde_examples() {
        let b = BField::zero(1, &big(1)).unwrap();
        assert!(pi_tilde(&b).is_identity());

        let (cs, b) = half_j_field();
        let m = pi_tilde(&b);
        let expected = IntMatrix::from_i64_rows(&[
            &[2, 0, 0, 0],
            &[0, 2, 0, 0],
            &[0, 1, 1, 0],
            &[-1, 0, 0, 1],
        ]);
        assert_eq!(m, expected);
        let ja = build_j_alpha(&cs, &b).unwrap();
        let mq = m.to_rational();
        assert_eq!(&mq * &untwisted_j(&cs), ja.matrix() * &mq);
    }

    #[test]
    fn torus_kernel_examples() {
        let k = torus_map_kernel(&IntMatrix::identity(4)).unwrap();
        assert!(k.group.is_trivial());
        assert_eq!(k.numerators.len(), 1);

        let b = BField::zero(1, &big(2)).unwrap();
        let k = torus_map_kernel(&pi_tilde(&b)).unwrap();
        assert_eq!(k.group.invariant_factors(), &[big(2), big(2)]);
        let h = BigRational::new(big(1), big(2));
        let z = BigRational::zero();
        let expected = vec![
            vec![z.clone(), z.clone(), z.clone(), z.clone()],
            vec![z.clone(), h.clone(), z.clone(), z.clone()],
            vec![h.clone(), z.clone(), z.clone(), z.clone()],
            vec![h.clone(), h.clone(), z.clone(), z.clone()],
        ];
        assert_eq!(k.representatives(), expected);

        let (_, b) = half_j_field();
        let k = torus_map_kernel(&pi_tilde(&b)).unwrap();
        assert_eq!(k.group.order(), big(4));
        assert_eq!(
            k.representatives(),
            twist_graph_points(&b.twist_matrix(), &big(2))
        );
        assert!(k.is_twist_graph(&b.twist_matrix(), &big(2)));
        assert!(!k.is_twist_graph(&IntMatrix::zeros(2, 2), &big(2)));

        assert_eq!(
            torus_map_kernel(&IntMatrix::diag_i64(&[1, 0])),
            Err(Error::Singular)
        );
    }

    #[test]
    fn quotient_lattice_examples() {
        let q = quotient_lattice(&IntMatrix::zeros(2, 2), &big(2)).unwrap();
        assert_eq!(q.index(), big(4));
        let h = (1, 2);
        let (o, z) = ((1, 1), (0, 1));
        assert_eq!(
            q.basis(),
            &RatMatrix::from_ratio_rows(&[
                &[h, z, z, z],
                &[z, h, z, z],
                &[z, z, o, z],
                &[z, z, z, o]
            ])
        );

        let j2 = IntMatrix::from_i64_rows(&[&[0, 1], &[-1, 0]]);
        let q = quotient_lattice(&j2, &big(2)).unwrap();
        assert_eq!(q.index(), big(4));
        // columns (1/2, 0, 0, 1/2) and (0, 1/2, 1/2, 0) reduced against Z^4
        assert_eq!(
            q.basis(),
            &RatMatrix::from_ratio_rows(&[
                &[h, z, z, z],
                &[z, h, z, z],
                &[z, h, o, z],
                &[h, z, z, o]
            ])
        );

        assert_eq!(
            quotient_lattice(&IntMatrix::identity(2), &big(4)),
            Err(Error::NotIsotropic { n: big(4) })
        );
    }

    #[test]
    fn presentation_examples() {
        assert!(presentations_agree(&BField::zero(1, &big(1)).unwrap()).unwrap());
        let (_, b) = half_j_field();
        assert!(presentations_agree(&b).unwrap());
        assert!(!lattice_maps_onto_integers(&b, &IntMatrix::zeros(2, 2)).unwrap());
    }

    #[test]
    fn symplectic_examples() {
        let (cs, b) = half_j_field();
        let x = build_j_alpha(&cs, &b).unwrap();
        assert!(is_symplectic_isomorphism(&IntMatrix::identity(4), &x, &x));

        let y = build_j_alpha(&cs, &b.negated()).unwrap();
        let flip = IntMatrix::block_diagonal(&(-&IntMatrix::identity(2)), &IntMatrix::identity(2));
        let verdict = check_symplectic_isomorphism(&flip, &x, &y);
        assert!(verdict.unimodular && verdict.intertwines && !verdict.preserves_form);

        let two = IntMatrix::identity(4).scale(&big(2));
        assert!(!check_symplectic_isomorphism(&two, &x, &x).unimodular);
        assert!(!is_symplectic_isomorphism(&IntMatrix::identity(2), &x, &x));
    }
}
