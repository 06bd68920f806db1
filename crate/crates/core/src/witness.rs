//! End-to-end witness: decompose a principal chain into spectrally paired
//! factors and attach to each factor a twist whose image is its kernel.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::cocycle::{antisym_with_image, isotropy_check, AntisymTwist};
use crate::decomposition::{
    decompose_principal_chain, verify_decomposition, CertificateVerdict, DecompositionCertificate,
    InvariantFactorChain,
};
use crate::error::{Error, Result};
use crate::isogeny::{extend_isogeny, verify_conformal_symplectic};
use crate::linalg::{cokernel_of, FiniteAbelianGroup, IntMatrix};

/// How the twist order `n` is chosen per factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NPolicy {
    /// The exponent of the factor's own kernel.
    #[default]
    Exponent,
    /// One `n` for all factors: the lcm of the kernel exponents.
    Lcm,
}

impl NPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            NPolicy::Exponent => "exponent",
            NPolicy::Lcm => "lcm",
        }
    }
}

impl fmt::Display for NPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponent" => Ok(NPolicy::Exponent),
            "lcm" => Ok(NPolicy::Lcm),
            other => Err(Error::Parse(format!("unknown n policy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorWitness {
    pub matrix: IntMatrix,
    pub kernel: FiniteAbelianGroup,
    pub n: BigInt,
    pub twist: AntisymTwist,
    pub image_matches_kernel: bool,
    pub isotropic: bool,
    pub conformal_symplectic: bool,
    /// `det F` prime to `p`, when a prime was given.
    pub prime_to_p: Option<bool>,
}

impl FactorWitness {
    pub fn all_true(&self) -> bool {
        self.image_matches_kernel
            && self.isotropic
            && self.conformal_symplectic
            && self.prime_to_p.unwrap_or(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub chain: InvariantFactorChain,
    pub policy: NPolicy,
    pub prime: Option<BigInt>,
    pub certificate: DecompositionCertificate,
    pub certificate_verdict: CertificateVerdict,
    pub factors: Vec<FactorWitness>,
}

impl WitnessReport {
    pub fn all_verdicts_true(&self) -> bool {
        self.certificate_verdict.is_valid() && self.factors.iter().all(FactorWitness::all_true)
    }
}

pub fn run_witness_pipeline(
    chain: &InvariantFactorChain,
    policy: NPolicy,
    prime: Option<&BigInt>,
) -> Result<WitnessReport> {
    let certificate = decompose_principal_chain(chain, prime)?;
    let certificate_verdict = verify_decomposition(&certificate);
    let genus = chain.genus();

    let kernels = certificate
        .factors
        .iter()
        .map(cokernel_of)
        .collect::<Result<Vec<_>>>()?;
    let common_n = kernels
        .iter()
        .fold(BigInt::one(), |acc, k| acc.lcm(&k.exponent()));

    let mut factors = Vec::with_capacity(kernels.len());
    for (matrix, kernel) in certificate.factors.iter().zip(kernels) {
        let n = match policy {
            NPolicy::Exponent => kernel.exponent(),
            NPolicy::Lcm => common_n.clone(),
        };
        let targets = kernel.paired_orders().ok_or_else(|| {
            Error::InvariantViolation(format!("factor kernel {kernel} is not spectrally paired"))
        })?;
        let twist = antisym_with_image(&targets, &n, genus)?;
        let extended = extend_isogeny(matrix, &n)?;
        factors.push(FactorWitness {
            image_matches_kernel: twist.image() == kernel,
            isotropic: isotropy_check(twist.matrix(), &n),
            conformal_symplectic: verify_conformal_symplectic(&extended),
            prime_to_p: prime.map(|p| {
                matrix
                    .determinant()
                    .map(|d| d.gcd(p).is_one())
                    .unwrap_or(false)
            }),
            matrix: matrix.clone(),
            kernel,
            n,
            twist,
        });
    }

    Ok(WitnessReport {
        chain: chain.clone(),
        policy,
        prime: prime.cloned(),
        certificate,
        certificate_verdict,
        factors,
    })
}
