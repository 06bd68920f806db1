//! JSON-in, JSON-out command surface.
//!
//! Exit codes: 0 success, 1 bad input, 2 an internal self-check failed.
//! Checkers that only judge a user-supplied candidate report their verdict
//! in the output and exit 0.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cocycle::{
    antisym_with_image, cocycle_from_pairing, image_mod_n, isotropy_check, pairing_of_cocycle,
    verify_cocycle_table, AlternatingForm, BilinearCocycle,
};
use crate::decomposition::{
    decompose_principal_chain, verify_decomposition, CertificateVerdict, DecompositionCertificate,
    InvariantFactorChain,
};
use crate::error::Error;
use crate::hodge::{
    build_j_alpha, check_symplectic_isomorphism, BField, ComplexStructure, TwistedComplexStructure,
};
use crate::json::{
    group, int_matrix, int_rows, ints, parse_int, rat_matrix, unwrap_ints, JsonInt, JsonIntRows,
    JsonRatRows,
};
use crate::kuga_satake::{even_clifford_rank, exterior_kernel_oracle, ks_degree, KSDegreeReport};
use crate::linalg::{cokernel_of, smith_normal_form};
use crate::sampling::{random_nonsingular, seeded_rng};
use crate::witness::{run_witness_pipeline, NPolicy, WitnessReport};

pub const CONVENTION: &str = "S = [[0, I], [-I, 0]] on H_1 + H_1*, E((x, a), (y, b)) = b(x) - a(y)";

#[derive(Debug, Parser)]
#[command(
    name = "twistlat",
    version,
    about = "Exact lattice invariants for principal isogenies and twisted tori"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Read the JSON request from this file instead of stdin.
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Write the JSON response to this file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Require every invariant factor to be prime to P.
    #[arg(long, global = true, value_name = "P")]
    pub prime: Option<String>,
    /// Seed for randomized sweeps.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Echo the fixed symplectic sign convention in the output.
    #[arg(long, global = true, value_enum)]
    pub convention: Option<Convention>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    Standard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    Exponent,
    Lcm,
}

impl From<PolicyArg> for NPolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Exponent => NPolicy::Exponent,
            PolicyArg::Lcm => NPolicy::Lcm,
        }
    }
}

#[derive(Clone, Debug, Subcommand)]
pub enum Command {
    /// Decompose a principal chain, or verify a supplied certificate.
    Decompose,
    /// Run the full witness pipeline on a principal chain.
    Witness {
        #[arg(long, value_enum, default_value = "exponent")]
        n_policy: PolicyArg,
    },
    /// Check a candidate symplectic isomorphism between twisted structures.
    VerifySymplectic,
    /// Closed-form and oracle degrees for Kuga-Satake isogenies.
    KsDegree,
    /// Cocycle and twist calculus.
    Cocycle,
    /// Smith normal form and cokernel.
    Snf,
}

#[derive(Debug, PartialEq, Eq)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Internal(_) => 2,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Input(m) => ("input", m),
            CliError::Internal(m) => ("internal", m),
        };
        serde_json::json!({ "error": { "kind": kind, "message": message } })
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvariantViolation(_) => CliError::Internal(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("invalid request: {e}"))
    }
}

/// A response plus whether its internal self-checks all held.
#[derive(Debug)]
pub struct Outcome {
    pub value: Value,
    pub checks_passed: bool,
}

impl Outcome {
    fn checked(value: impl Serialize, checks_passed: bool) -> Result<Self, CliError> {
        let value = serde_json::to_value(value)
            .map_err(|e| CliError::Internal(format!("serialization failed: {e}")))?;
        Ok(Self {
            value,
            checks_passed,
        })
    }

    fn plain(value: impl Serialize) -> Result<Self, CliError> {
        Self::checked(value, true)
    }
}

/// Runs one request. `input` is the raw JSON body.
pub fn execute(cli: &Cli, input: &str) -> Result<Outcome, CliError> {
    let request: Value = if input.trim().is_empty() {
        Value::Object(Default::default())
    } else {
        serde_json::from_str(input)?
    };
    let prime = cli.prime.as_deref().map(parse_int).transpose()?;
    let mut outcome = match &cli.command {
        Command::Decompose => decompose(request, prime)?,
        Command::Witness { n_policy } => witness(request, prime, (*n_policy).into())?,
        Command::VerifySymplectic => verify_symplectic(request)?,
        Command::KsDegree => ks(request, cli.seed)?,
        Command::Cocycle => cocycle(request)?,
        Command::Snf => snf(request)?,
    };
    if cli.convention.is_some() {
        if let Value::Object(map) = &mut outcome.value {
            map.insert("convention".into(), Value::String(CONVENTION.into()));
        }
    }
    Ok(outcome)
}

/// Full invocation: read, execute, write. Returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let input = match read_input(cli) {
        Ok(s) => s,
        Err(e) => return report_error(&e),
    };
    match execute(cli, &input) {
        Ok(outcome) => {
            let mut text = serde_json::to_string_pretty(&outcome.value).expect("json value");
            text.push('\n');
            let written = match &cli.out {
                Some(path) => fs::write(path, text),
                None => io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                return report_error(&CliError::Input(format!("cannot write output: {e}")));
            }
            if outcome.checks_passed {
                0
            } else {
                eprintln!("self-check failed, see output");
                2
            }
        }
        Err(e) => report_error(&e),
    }
}

fn read_input(cli: &Cli) -> Result<String, CliError> {
    match &cli.input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display()))),
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Input(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn report_error(e: &CliError) -> i32 {
    eprintln!("{}", e.to_json());
    e.exit_code()
}

// ---- decompose ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecomposeRequest {
    chain: Option<Vec<JsonInt>>,
    prime: Option<JsonInt>,
    certificate: Option<CertificateJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateJson {
    pub chain: Vec<JsonInt>,
    pub multiplier: JsonInt,
    pub factors: Vec<JsonIntRows>,
}

impl CertificateJson {
    fn from_certificate(c: &DecompositionCertificate) -> Self {
        Self {
            chain: ints(c.chain.entries()),
            multiplier: JsonInt(c.multiplier.clone()),
            factors: c.factors.iter().map(int_rows).collect(),
        }
    }

    fn to_certificate(&self) -> Result<DecompositionCertificate, CliError> {
        Ok(DecompositionCertificate {
            multiplier: self.multiplier.0.clone(),
            factors: self
                .factors
                .iter()
                .map(int_matrix)
                .collect::<Result<_, _>>()?,
            chain: InvariantFactorChain::new(unwrap_ints(&self.chain))?,
        })
    }
}

#[derive(Serialize)]
pub struct VerdictJson {
    pub valid: bool,
    pub reason: Option<&'static str>,
    pub factor_index: Option<usize>,
}

impl VerdictJson {
    fn from_verdict(v: &CertificateVerdict) -> Self {
        use crate::decomposition::RejectionReason::*;
        let reason = v.reason();
        Self {
            valid: v.is_valid(),
            reason: reason.map(|r| r.code()),
            factor_index: reason.and_then(|r| match r {
                FactorShape { index } | SingularFactor { index } | FactorNotPaired { index } => {
                    Some(*index)
                }
                _ => None,
            }),
        }
    }
}

#[derive(Serialize)]
struct DecomposeResponse {
    certificate: CertificateJson,
    verdict: VerdictJson,
}

fn decompose(request: Value, prime: Option<BigInt>) -> Result<Outcome, CliError> {
    let req: DecomposeRequest = serde_json::from_value(request)?;
    match (req.chain, req.certificate) {
        (Some(chain), None) => {
            let chain = InvariantFactorChain::new(unwrap_ints(&chain))?;
            let prime = prime.or(req.prime.map(|p| p.0));
            let cert = decompose_principal_chain(&chain, prime.as_ref())?;
            let verdict = verify_decomposition(&cert);
            Outcome::checked(
                DecomposeResponse {
                    certificate: CertificateJson::from_certificate(&cert),
                    verdict: VerdictJson::from_verdict(&verdict),
                },
                verdict.is_valid(),
            )
        }
        (None, Some(cert)) => {
            let verdict = verify_decomposition(&cert.to_certificate()?);
            Outcome::plain(serde_json::json!({ "verdict": VerdictJson::from_verdict(&verdict) }))
        }
        _ => Err(CliError::Input(
            "give exactly one of \"chain\" or \"certificate\"".into(),
        )),
    }
}

// ---- witness ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct WitnessRequest {
    chain: Vec<JsonInt>,
    prime: Option<JsonInt>,
}

#[derive(Serialize)]
struct FactorJson {
    matrix: JsonIntRows,
    kernel: Vec<JsonInt>,
    n: JsonInt,
    twist: JsonIntRows,
    image_matches_kernel: bool,
    isotropic: bool,
    conformal_symplectic: bool,
    prime_to_p: Option<bool>,
}

#[derive(Serialize)]
pub struct WitnessJson {
    chain: Vec<JsonInt>,
    n_policy: &'static str,
    prime: Option<JsonInt>,
    certificate: CertificateJson,
    certificate_verdict: VerdictJson,
    factors: Vec<FactorJson>,
    all_verdicts_true: bool,
}

impl WitnessJson {
    pub fn from_report(r: &WitnessReport) -> Self {
        Self {
            chain: ints(r.chain.entries()),
            n_policy: r.policy.as_str(),
            prime: r.prime.clone().map(JsonInt),
            certificate: CertificateJson::from_certificate(&r.certificate),
            certificate_verdict: VerdictJson::from_verdict(&r.certificate_verdict),
            factors: r
                .factors
                .iter()
                .map(|f| FactorJson {
                    matrix: int_rows(&f.matrix),
                    kernel: group(&f.kernel),
                    n: JsonInt(f.n.clone()),
                    twist: int_rows(f.twist.matrix()),
                    image_matches_kernel: f.image_matches_kernel,
                    isotropic: f.isotropic,
                    conformal_symplectic: f.conformal_symplectic,
                    prime_to_p: f.prime_to_p,
                })
                .collect(),
            all_verdicts_true: r.all_verdicts_true(),
        }
    }
}

fn witness(request: Value, prime: Option<BigInt>, policy: NPolicy) -> Result<Outcome, CliError> {
    let req: WitnessRequest = serde_json::from_value(request)?;
    let chain = InvariantFactorChain::new(unwrap_ints(&req.chain))?;
    let prime = prime.or(req.prime.map(|p| p.0));
    let report = run_witness_pipeline(&chain, policy, prime.as_ref())?;
    Outcome::checked(
        WitnessJson::from_report(&report),
        report.all_verdicts_true(),
    )
}

// ---- verify-symplectic ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwistedJson {
    j: JsonRatRows,
    b: JsonRatRows,
    n: JsonInt,
}

impl TwistedJson {
    fn build(&self) -> Result<TwistedComplexStructure, CliError> {
        let cs = ComplexStructure::new(rat_matrix(&self.j)?)?;
        let b = BField::new(rat_matrix(&self.b)?, &self.n.0)?;
        Ok(build_j_alpha(&cs, &b)?)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SymplecticRequest {
    psi: JsonIntRows,
    src: TwistedJson,
    dst: TwistedJson,
}

fn verify_symplectic(request: Value) -> Result<Outcome, CliError> {
    let req: SymplecticRequest = serde_json::from_value(request)?;
    let psi = int_matrix(&req.psi)?;
    let (src, dst) = (req.src.build()?, req.dst.build()?);
    let v = check_symplectic_isomorphism(&psi, &src, &dst);
    Outcome::plain(serde_json::json!({
        "unimodular": v.unimodular,
        "preserves_form": v.preserves_form,
        "intertwines": v.intertwines,
        "is_symplectic_isomorphism": v.holds(),
    }))
}

// ---- ks-degree ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields, tag = "op", rename_all = "kebab-case")]
enum KsRequest {
    ClosedForm { d: JsonInt, r: usize },
    Oracle { matrix: JsonIntRows },
    Sweep { r: usize, count: usize, bound: i64 },
}

#[derive(Serialize)]
struct GradeJson {
    grade: usize,
    det_abs: JsonInt,
    exponent: JsonInt,
    rank: JsonInt,
}

#[derive(Serialize)]
struct KsReportJson {
    r: usize,
    d: JsonInt,
    closed_form: JsonInt,
    oracle_value: JsonInt,
    per_grade: Vec<GradeJson>,
    totals_agree: bool,
    grades_consistent: bool,
}

impl KsReportJson {
    fn from_report(rep: &KSDegreeReport) -> Self {
        Self {
            r: rep.r,
            d: JsonInt(rep.d.clone()),
            closed_form: JsonInt(rep.closed_form.clone()),
            oracle_value: JsonInt(rep.oracle_value.clone()),
            per_grade: rep
                .per_grade
                .iter()
                .map(|g| GradeJson {
                    grade: g.grade,
                    det_abs: JsonInt(g.det_abs.clone()),
                    exponent: JsonInt(g.exponent.clone()),
                    rank: JsonInt(g.rank.clone()),
                })
                .collect(),
            totals_agree: rep.totals_agree(),
            grades_consistent: rep.grades_consistent(),
        }
    }
}

fn ks(request: Value, seed: Option<u64>) -> Result<Outcome, CliError> {
    match serde_json::from_value(request)? {
        KsRequest::ClosedForm { d, r } => {
            let degree = ks_degree(&d.0, r)?;
            let square = crate::linalg::is_perfect_square(&degree)?;
            Outcome::plain(serde_json::json!({
                "d": JsonInt(d.0),
                "r": r,
                "closed_form": JsonInt(degree),
                "perfect_square": square,
                "even_clifford_rank": JsonInt(even_clifford_rank(r)?),
            }))
        }
        KsRequest::Oracle { matrix } => {
            let rep = exterior_kernel_oracle(&int_matrix(&matrix)?)?;
            let ok = rep.totals_agree() && rep.grades_consistent();
            Outcome::checked(KsReportJson::from_report(&rep), ok)
        }
        KsRequest::Sweep { r, count, bound } => {
            if bound < 1 {
                return Err(CliError::Input("bound must be at least 1".into()));
            }
            let seed = seed.unwrap_or(0);
            let mut rng = seeded_rng(seed);
            let mut reports = Vec::with_capacity(count);
            for _ in 0..count {
                let a = random_nonsingular(&mut rng, r, bound);
                reports.push(exterior_kernel_oracle(&a)?);
            }
            let ok = reports
                .iter()
                .all(|r| r.totals_agree() && r.grades_consistent());
            Outcome::checked(
                serde_json::json!({
                    "seed": seed,
                    "r": r,
                    "count": count,
                    "bound": bound,
                    "all_agree": ok,
                    "reports": reports.iter().map(KsReportJson::from_report).collect::<Vec<_>>(),
                }),
                ok,
            )
        }
    }
}

// ---- cocycle ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields, tag = "op", rename_all = "kebab-case")]
enum CocycleRequest {
    Pairing {
        n: JsonInt,
        beta: JsonIntRows,
    },
    Lift {
        n: JsonInt,
        pairing: JsonIntRows,
    },
    VerifyTable {
        n: JsonInt,
        m: usize,
        k: usize,
        table: Vec<JsonInt>,
    },
    Antisym {
        targets: Vec<JsonInt>,
        n: JsonInt,
        genus: usize,
    },
    Image {
        n: JsonInt,
        matrix: JsonIntRows,
    },
    Isotropy {
        n: JsonInt,
        matrix: JsonIntRows,
    },
}

fn cocycle(request: Value) -> Result<Outcome, CliError> {
    let value = match serde_json::from_value(request)? {
        CocycleRequest::Pairing { n, beta } => {
            let c = BilinearCocycle::new(&int_matrix(&beta)?, &n.0)?;
            serde_json::json!({ "n": n, "pairing": int_rows(pairing_of_cocycle(&c).matrix()) })
        }
        CocycleRequest::Lift { n, pairing } => {
            let e = AlternatingForm::new(&int_matrix(&pairing)?, &n.0)?;
            serde_json::json!({ "n": n, "beta": int_rows(cocycle_from_pairing(&e).matrix()) })
        }
        CocycleRequest::VerifyTable { n, m, k, table } => {
            let ok = verify_cocycle_table(&n.0, m, k, &unwrap_ints(&table))?;
            serde_json::json!({ "is_cocycle": ok })
        }
        CocycleRequest::Antisym { targets, n, genus } => {
            let twist = antisym_with_image(&unwrap_ints(&targets), &n.0, genus)?;
            serde_json::json!({
                "n": n,
                "matrix": int_rows(twist.matrix()),
                "image": group(&twist.image()),
            })
        }
        CocycleRequest::Image { n, matrix } => {
            let img = image_mod_n(&int_matrix(&matrix)?, &n.0)?;
            serde_json::json!({ "image": group(&img) })
        }
        CocycleRequest::Isotropy { n, matrix } => {
            let m = int_matrix(&matrix)?;
            m.ensure_square()?;
            serde_json::json!({ "isotropic": isotropy_check(&m, &n.0) })
        }
    };
    Outcome::plain(value)
}

// ---- snf ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SnfRequest {
    matrix: JsonIntRows,
}

fn snf(request: Value) -> Result<Outcome, CliError> {
    let req: SnfRequest = serde_json::from_value(request)?;
    let a = int_matrix(&req.matrix)?;
    let s = smith_normal_form(&a);
    let identity_holds = &(&s.u * &a) * &s.v == s.d && s.u.is_unimodular() && s.v.is_unimodular();
    let cokernel = if a.is_square() {
        match cokernel_of(&a) {
            Ok(g) => Some(group(&g)),
            Err(Error::Singular) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    Outcome::checked(
        serde_json::json!({
            "u": int_rows(&s.u),
            "d": int_rows(&s.d),
            "v": int_rows(&s.v),
            "diagonal": ints(&s.diagonal()),
            "cokernel": cokernel,
        }),
        identity_holds,
    )
}
