//! Factoring a principal isogeny into spectrally paired isogenies.
//!
//! A principal isogeny with kernel `⊕ Z/a_i` is modelled by `diag(a_1, …, a_2g)`.
//! For `g >= 2` there is a multiplier `N` and integer matrices `F_1, …, F_k`,
//! each with cokernel of the form `⊕ (Z/b_j)^2`, such that
//!
//! ```text
//! F_1 · F_2 ⋯ F_k = N · diag(a_1, …, a_2g)
//! ```
//!
//! Genus two is handled by a closed three-factor identity followed by
//! splitting `diag(1, d_2, 1, d_4)` with
//! `diag(1, 1, 1, x²) = (1/x)·diag(1, 1, x, x)·diag(1, x, 1, x)·diag(x, 1, 1, x)`.
//! Higher genus peels off the last three coordinates and recurses on a
//! `2g - 2` problem, which is brought back to invariant-factor form by a
//! Smith decomposition whose unimodular transforms are folded into the
//! outermost factors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::linalg::{cokernel_of, is_perfect_square, smith_normal_form, IntMatrix};

/// `a_1 | a_2 | … | a_2g`, all positive; entries equal to 1 are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantFactorChain {
    entries: Vec<BigInt>,
}

impl InvariantFactorChain {
    pub fn new(entries: Vec<BigInt>) -> Result<Self> {
        if entries.is_empty() || !entries.len().is_multiple_of(2) {
            return Err(Error::InvalidChain(format!(
                "length must be 2g with g >= 1, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_positive()) {
            return Err(Error::InvalidChain(format!("entry {bad} is not positive")));
        }
        if let Some(w) = entries.windows(2).find(|w| !w[1].is_multiple_of(&w[0])) {
            return Err(Error::InvalidChain(format!(
                "{} does not divide {}",
                w[0], w[1]
            )));
        }
        Ok(Self { entries })
    }

    pub fn from_i64(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn genus(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    /// Degree of the isogeny, `∏ a_i`.
    pub fn product(&self) -> BigInt {
        self.entries.iter().product()
    }

    pub fn is_principal(&self) -> bool {
        is_perfect_square(&self.product()).expect("product of positive entries")
    }

    pub fn diagonal_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(&self.entries)
    }

    /// Successive quotients `d_1 = a_1`, `d_i = a_i / a_{i-1}`.
    pub fn steps(&self) -> Vec<BigInt> {
        successive_quotients(&self.entries)
    }
}

/// All principal chains of genus `g` with top entry at most `max_top`, in
/// lexicographic order.
pub fn principal_chains(genus: usize, max_top: u64) -> Vec<InvariantFactorChain> {
    fn extend(prefix: &mut Vec<u64>, len: usize, max_top: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        let last = prefix.last().copied().unwrap_or(1);
        for next in (last..=max_top).step_by(last as usize) {
            prefix.push(next);
            extend(prefix, len, max_top, out);
            prefix.pop();
        }
    }
    let mut raw = Vec::new();
    extend(&mut Vec::new(), 2 * genus, max_top, &mut raw);
    raw.into_iter()
        .map(|a| {
            InvariantFactorChain::new(a.into_iter().map(BigInt::from).collect()).expect("chain")
        })
        .filter(InvariantFactorChain::is_principal)
        .collect()
}

/// `F_1 ⋯ F_k = N · diag(chain)` with every `coker F_i` spectrally paired.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCertificate {
    pub multiplier: BigInt,
    pub factors: Vec<IntMatrix>,
    pub chain: InvariantFactorChain,
}

impl DecompositionCertificate {
    /// Left-to-right product of the factors (identity when there are none).
    pub fn product(&self) -> IntMatrix {
        IntMatrix::product(self.factors.iter())
            .unwrap_or_else(|| IntMatrix::identity(self.chain.entries.len()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RejectionReason {
    NonPositiveMultiplier,
    FactorShape { index: usize },
    SingularFactor { index: usize },
    FactorNotPaired { index: usize },
    ProductMismatch,
}

impl RejectionReason {
    pub fn code(&self) -> &'static str {
        match self {
            Self::NonPositiveMultiplier => "non_positive_multiplier",
            Self::FactorShape { .. } => "factor_shape",
            Self::SingularFactor { .. } => "singular_factor",
            Self::FactorNotPaired { .. } => "factor_not_paired",
            Self::ProductMismatch => "product_mismatch",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CertificateVerdict {
    Valid,
    Rejected(RejectionReason),
}

impl CertificateVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Self::Valid)
    }

    pub fn reason(&self) -> Option<&RejectionReason> {
        match self {
            Self::Valid => None,
            Self::Rejected(r) => Some(r),
        }
    }
}

/// Independent check of a certificate: factor shapes, pairing of every
/// cokernel, then exact recomposition.
pub fn verify_decomposition(cert: &DecompositionCertificate) -> CertificateVerdict {
    use CertificateVerdict::Rejected;

    if !cert.multiplier.is_positive() {
        return Rejected(RejectionReason::NonPositiveMultiplier);
    }
    let dim = cert.chain.entries.len();
    for (index, f) in cert.factors.iter().enumerate() {
        if f.rows() != dim || f.cols() != dim {
            return Rejected(RejectionReason::FactorShape { index });
        }
        match cokernel_of(f) {
            Ok(kernel) if kernel.is_spectrally_paired() => {}
            Ok(_) => return Rejected(RejectionReason::FactorNotPaired { index }),
            Err(_) => return Rejected(RejectionReason::SingularFactor { index }),
        }
    }
    if cert.product() != cert.chain.diagonal_matrix().scale(&cert.multiplier) {
        return Rejected(RejectionReason::ProductMismatch);
    }
    CertificateVerdict::Valid
}

/// Decomposes `diag(chain)` into spectrally paired factors.
///
/// With `prime = Some(p)`, every `a_i` must be prime to `p`; the multiplier and
/// all factor determinants then are too.
pub fn decompose_principal_chain(
    chain: &InvariantFactorChain,
    prime: Option<&BigInt>,
) -> Result<DecompositionCertificate> {
    let genus = chain.genus();
    if genus < 2 {
        return Err(Error::GenusTooSmall { genus });
    }
    let degree = chain.product();
    if !is_perfect_square(&degree)? {
        return Err(Error::NotPrincipal { degree });
    }
    if let Some(p) = prime {
        check_prime(p)?;
        let top = chain.entries.last().expect("non-empty chain");
        if !top.gcd(p).is_one() {
            return Err(Error::NotCoprime {
                p: p.clone(),
                value: top.clone(),
            });
        }
    }
    let (multiplier, factors) = decompose_entries(&chain.entries)?;
    Ok(DecompositionCertificate {
        multiplier,
        factors,
        chain: chain.clone(),
    })
}

/// The genus-two identity
/// `diag(a) = (d_1·I_4) · diag(1, 1, d_2·d_3, d_2·d_3) · diag(1, d_2, 1, d_4)`
/// for step values `d`. Only the first two factors are spectrally paired in
/// general.
pub fn genus_two_factors(d: &[BigInt; 4]) -> [IntMatrix; 3] {
    let one = BigInt::one();
    let d23 = &d[1] * &d[2];
    [
        IntMatrix::identity(4).scale(&d[0]),
        IntMatrix::diagonal(&[one.clone(), one.clone(), d23.clone(), d23]),
        IntMatrix::diagonal(&[one.clone(), d[1].clone(), one, d[3].clone()]),
    ]
}

/// Three `4 x 4` diagonal factors whose product is `x · diag(1, …, x², …, 1)`
/// with `x²` at `position`. Each factor has cokernel `(Z/x)^2`.
///
/// For `position = 3` these are `diag(1,1,x,x)`, `diag(1,x,1,x)`,
/// `diag(x,1,1,x)`; other positions conjugate by the transposition `(position 3)`.
pub fn square_split(x: &BigInt, position: usize) -> [IntMatrix; 3] {
    assert!(position < 4, "position must index a 4x4 diagonal");
    let one = BigInt::one();
    let patterns: [[bool; 4]; 3] = [
        [false, false, true, true],
        [false, true, false, true],
        [true, false, false, true],
    ];
    patterns.map(|mut p| {
        p.swap(position, 3);
        IntMatrix::diagonal(&p.map(|on| if on { x.clone() } else { one.clone() }))
    })
}

fn decompose_entries(a: &[BigInt]) -> Result<(BigInt, Vec<IntMatrix>)> {
    if a.len() == 4 {
        return decompose_genus_two(a);
    }
    let len = a.len();
    let last_step = &a[len - 1] / &a[len - 2];

    // diag(a) = (1/d) · blockdiag(diag(b), I_2) · blockdiag(I, a_2g, a_2g) · blockdiag(I, d, 1, d)
    let mut sub: Vec<BigInt> = a[..len - 3].iter().map(|x| x * &last_step).collect();
    sub.push(a[len - 3].clone());
    if !is_perfect_square(&sub.iter().product())? {
        return Err(Error::InvariantViolation(format!(
            "peeled sub-problem {sub:?} has non-square product"
        )));
    }

    let (sub_multiplier, sub_factors) = decompose_renormalized(&sub)?;

    let mut factors: Vec<IntMatrix> = sub_factors
        .iter()
        .map(|f| IntMatrix::block_diagonal(f, &IntMatrix::identity(2)))
        .collect();
    // The sub-problem's scalar acts on the two padded coordinates too.
    factors.push(IntMatrix::block_diagonal(
        &IntMatrix::identity(len - 2),
        &IntMatrix::identity(2).scale(&sub_multiplier),
    ));
    let mut top = vec![BigInt::one(); len];
    top[len - 2] = a[len - 1].clone();
    top[len - 1] = a[len - 1].clone();
    factors.push(IntMatrix::diagonal(&top));
    let mut peel = vec![BigInt::one(); len];
    peel[len - 3] = last_step.clone();
    peel[len - 1] = last_step.clone();
    factors.push(IntMatrix::diagonal(&peel));

    factors.retain(|f| !f.is_identity());
    Ok((last_step * sub_multiplier, factors))
}

/// Decomposes `diag(b)` for positive `b` that need not form a divisibility chain.
fn decompose_renormalized(b: &[BigInt]) -> Result<(BigInt, Vec<IntMatrix>)> {
    if b.windows(2).all(|w| w[1].is_multiple_of(&w[0])) {
        return decompose_entries(b);
    }
    // U·diag(b)·V = diag(c), so diag(b) = U⁻¹·diag(c)·V⁻¹.
    let snf = smith_normal_form(&IntMatrix::diagonal(b));
    let c = snf.diagonal();
    let u_inv = snf
        .u
        .unimodular_inverse()
        .ok_or_else(|| Error::InvariantViolation("Smith transform U not unimodular".into()))?;
    let v_inv = snf
        .v
        .unimodular_inverse()
        .ok_or_else(|| Error::InvariantViolation("Smith transform V not unimodular".into()))?;

    let (multiplier, mut factors) = decompose_entries(&c)?;
    if factors.is_empty() {
        let leftover = &u_inv * &v_inv;
        if !leftover.is_identity() {
            factors.push(leftover);
        }
    } else {
        factors[0] = &u_inv * &factors[0];
        let last = factors.len() - 1;
        factors[last] = &factors[last] * &v_inv;
    }
    Ok((multiplier, factors))
}

fn decompose_genus_two(a: &[BigInt]) -> Result<(BigInt, Vec<IntMatrix>)> {
    let d: [BigInt; 4] = successive_quotients(a)
        .try_into()
        .expect("genus-two chain has four entries");
    let [scalar, middle, _] = genus_two_factors(&d);

    // Replace diag(1, d_2, 1, d_4): d_2·d_4 is square, so d_2 = g·α², d_4 = g·β².
    let g = d[1].gcd(&d[3]);
    let alpha = exact_sqrt(&(&d[1] / &g))?;
    let beta = exact_sqrt(&(&d[3] / &g))?;

    let one = BigInt::one();
    let mut factors = vec![
        scalar,
        middle,
        IntMatrix::diagonal(&[one.clone(), g.clone(), one, g]),
    ];
    factors.extend(square_split(&alpha, 1));
    factors.extend(square_split(&beta, 3));
    factors.retain(|f| !f.is_identity());
    Ok((alpha * beta, factors))
}

fn exact_sqrt(m: &BigInt) -> Result<BigInt> {
    let root = m.sqrt();
    if &root * &root != *m {
        return Err(Error::InvariantViolation(format!(
            "expected {m} to be a perfect square"
        )));
    }
    Ok(root)
}

fn successive_quotients(a: &[BigInt]) -> Vec<BigInt> {
    let mut prev = BigInt::one();
    a.iter()
        .map(|x| {
            let q = x / &prev;
            prev = x.clone();
            q
        })
        .collect()
}

fn check_prime(p: &BigInt) -> Result<()> {
    let two = BigInt::from(2);
    let not_prime = || Error::NotPrime { p: p.clone() };
    if p < &two {
        return Err(not_prime());
    }
    let mut k = two;
    while &k * &k <= *p {
        if p.is_multiple_of(&k) {
            return Err(not_prime());
        }
        k += 1;
    }
    Ok(())
}
