//! Pluggable bipartite separability criteria with honest three-valued
//! verdicts.
//!
//! Real criteria are one-sided, so a clean yes/no interface cannot be
//! kept: every definite verdict must carry a certificate, and anything a
//! criterion cannot decide comes back `Inconclusive`. The positive
//! partial transpose criterion is sufficient for separability only in
//! 2x2 and 2x3, which is exactly where it is allowed to say `Separable`;
//! the realignment criterion can only ever certify entanglement.
//!
//! Oracles consume the A-major arranged form of a bipartite density
//! matrix (see [`crate::states::DensityMatrix::arrange_bipartite`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix};

/// Purity floor below which a state no longer counts as pure.
pub const PURITY_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Entangled,
    Separable,
    Inconclusive,
}

impl Verdict {
    pub fn is_definite(self) -> bool {
        self != Verdict::Inconclusive
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "entangled",
            Verdict::Separable => "separable",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Evidence backing a definite verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Schmidt rank of the underlying vector (pure oracle).
    SchmidtRank(usize),
    /// Most negative eigenvalue of the partial transpose.
    MinPtEigenvalue(f64),
    /// Trace-norm excess of the realigned matrix over 1.
    CcnrExcess(f64),
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::SchmidtRank(r) => write!(f, "schmidt rank {r}"),
            Certificate::MinPtEigenvalue(v) => write!(f, "min PT eigenvalue {v:.6e}"),
            Certificate::CcnrExcess(v) => write!(f, "ccnr excess {v:.6e}"),
        }
    }
}

/// A verdict plus its certificate. Definite verdicts always carry one;
/// `Inconclusive` never does — the constructors make other combinations
/// unrepresentable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    certificate: Option<Certificate>,
}

impl OracleVerdict {
    pub fn entangled(certificate: Certificate) -> Self {
        Self {
            verdict: Verdict::Entangled,
            certificate: Some(certificate),
        }
    }

    pub fn separable(certificate: Certificate) -> Self {
        Self {
            verdict: Verdict::Separable,
            certificate: Some(certificate),
        }
    }

    pub fn inconclusive() -> Self {
        Self {
            verdict: Verdict::Inconclusive,
            certificate: None,
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn is_definite(&self) -> bool {
        self.verdict.is_definite()
    }
}

/// A bipartite separability criterion.
pub trait BipartiteOracle: Send + Sync {
    /// Unique name, also the CLI selector.
    fn name(&self) -> &'static str;

    /// Whether this criterion can be consulted on the given input at all.
    fn applicable(&self, rho: &ComplexMatrix, d_a: usize, d_b: usize) -> bool;

    /// Verdict on a unit-trace PSD matrix in A-major arranged form.
    fn decide(&self, rho: &ComplexMatrix, d_a: usize, d_b: usize, tol: f64)
        -> Result<OracleVerdict>;
}

fn check_dims(rho: &ComplexMatrix, d_a: usize, d_b: usize) -> Result<()> {
    let d = d_a * d_b;
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "oracle input is {}x{}, dims ({d_a},{d_b}) give {d}",
            rho.rows(),
            rho.cols()
        )));
    }
    Ok(())
}

/// Exact oracle for (numerically) rank-1 inputs: extracts the vector and
/// reads the Schmidt rank off the bipartite reshape. Never inconclusive.
pub fn oracle_pure(rho: &ComplexMatrix, d_a: usize, d_b: usize, tol: f64) -> Result<OracleVerdict> {
    check_dims(rho, d_a, d_b)?;
    let (largest, vector) = linalg::top_eigenpair(rho)?;
    if largest < 1.0 - PURITY_FLOOR {
        return Err(Error::OracleRequiresPure { largest });
    }
    let matrix = ComplexMatrix::from_row_major(d_a, d_b, vector)?;
    let fact = linalg::svd(&matrix)?;
    let top = fact.singular_values[0];
    let rank = fact
        .singular_values
        .iter()
        .take_while(|s| **s > tol * top)
        .count();
    if rank == 1 {
        Ok(OracleVerdict::separable(Certificate::SchmidtRank(1)))
    } else {
        Ok(OracleVerdict::entangled(Certificate::SchmidtRank(rank)))
    }
}

/// Positive partial transpose criterion. A negative PT eigenvalue
/// certifies entanglement in any dimension; a PSD partial transpose
/// certifies separability only in 2x2 and 2x3.
pub fn oracle_ppt(rho: &ComplexMatrix, d_a: usize, d_b: usize, tol: f64) -> Result<OracleVerdict> {
    check_dims(rho, d_a, d_b)?;
    let pt = linalg::partial_transpose(rho, d_a, d_b)?;
    let min = linalg::hermitian_eigenvalues(&pt)?[0];
    if min < -tol {
        return Ok(OracleVerdict::entangled(Certificate::MinPtEigenvalue(min)));
    }
    if ppt_is_sufficient(d_a, d_b) {
        return Ok(OracleVerdict::separable(Certificate::MinPtEigenvalue(min)));
    }
    Ok(OracleVerdict::inconclusive())
}

fn ppt_is_sufficient(d_a: usize, d_b: usize) -> bool {
    matches!((d_a, d_b), (2, 2) | (2, 3) | (3, 2))
}

/// Computable cross norm / realignment criterion: trace norm of the
/// realigned matrix above 1 certifies entanglement; it can never certify
/// separability.
pub fn oracle_ccnr(rho: &ComplexMatrix, d_a: usize, d_b: usize, tol: f64) -> Result<OracleVerdict> {
    check_dims(rho, d_a, d_b)?;
    let excess = linalg::trace_norm(&linalg::realign(rho, d_a, d_b)?)? - 1.0;
    if excess > tol {
        return Ok(OracleVerdict::entangled(Certificate::CcnrExcess(excess)));
    }
    Ok(OracleVerdict::inconclusive())
}

struct PureOracle;

impl BipartiteOracle for PureOracle {
    fn name(&self) -> &'static str {
        "pure"
    }

    fn applicable(&self, rho: &ComplexMatrix, _d_a: usize, _d_b: usize) -> bool {
        // purity bounds the top eigenvalue from both sides; only the gray
        // zone pays for an eigendecomposition
        let f = rho.frobenius_norm();
        let purity = f * f;
        if purity >= 1.0 - PURITY_FLOOR {
            return true;
        }
        if purity < 1.0 - 2.0 * PURITY_FLOOR {
            return false;
        }
        linalg::top_eigenpair(rho)
            .map(|(largest, _)| largest >= 1.0 - PURITY_FLOOR)
            .unwrap_or(false)
    }

    fn decide(
        &self,
        rho: &ComplexMatrix,
        d_a: usize,
        d_b: usize,
        tol: f64,
    ) -> Result<OracleVerdict> {
        oracle_pure(rho, d_a, d_b, tol)
    }
}

struct PptOracle;

impl BipartiteOracle for PptOracle {
    fn name(&self) -> &'static str {
        "ppt"
    }

    fn applicable(&self, _rho: &ComplexMatrix, _d_a: usize, _d_b: usize) -> bool {
        true
    }

    fn decide(
        &self,
        rho: &ComplexMatrix,
        d_a: usize,
        d_b: usize,
        tol: f64,
    ) -> Result<OracleVerdict> {
        oracle_ppt(rho, d_a, d_b, tol)
    }
}

struct CcnrOracle;

impl BipartiteOracle for CcnrOracle {
    fn name(&self) -> &'static str {
        "ccnr"
    }

    fn applicable(&self, _rho: &ComplexMatrix, _d_a: usize, _d_b: usize) -> bool {
        true
    }

    fn decide(
        &self,
        rho: &ComplexMatrix,
        d_a: usize,
        d_b: usize,
        tol: f64,
    ) -> Result<OracleVerdict> {
        oracle_ccnr(rho, d_a, d_b, tol)
    }
}

pub fn oracle_by_name(name: &str) -> Result<Box<dyn BipartiteOracle>> {
    match name {
        "pure" => Ok(Box::new(PureOracle)),
        "ppt" => Ok(Box::new(PptOracle)),
        "ccnr" => Ok(Box::new(CcnrOracle)),
        other => Err(Error::UnknownOracle(other.to_string())),
    }
}

/// One oracle's contribution to a suite consultation.
#[derive(Debug, Clone)]
pub struct Consultation {
    pub oracle: &'static str,
    pub outcome: OracleVerdict,
}

/// Combined result: the winning verdict plus every consulted opinion.
#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub verdict: OracleVerdict,
    pub consulted: Vec<Consultation>,
}

/// An ordered suite of criteria; order is priority.
pub struct OracleRegistry {
    oracles: Vec<Box<dyn BipartiteOracle>>,
}

impl OracleRegistry {
    pub fn new(oracles: Vec<Box<dyn BipartiteOracle>>) -> Result<Self> {
        if oracles.is_empty() {
            return Err(Error::EmptyRegistry);
        }
        for (i, a) in oracles.iter().enumerate() {
            if oracles[..i].iter().any(|b| b.name() == a.name()) {
                return Err(Error::DuplicateOracle(a.name().to_string()));
            }
        }
        Ok(Self { oracles })
    }

    /// `[pure, ppt, ccnr]`: the exact oracle first where it applies, then
    /// the one-sided criteria.
    pub fn default_suite() -> Self {
        Self::new(vec![
            Box::new(PureOracle),
            Box::new(PptOracle),
            Box::new(CcnrOracle),
        ])
        .expect("builtin suite is valid")
    }

    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        Self::new(
            names
                .iter()
                .map(|n| oracle_by_name(n.as_ref()))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.oracles.iter().map(|o| o.name()).collect()
    }

    /// Consults every applicable oracle. The first definite verdict in
    /// registry order wins, but all are evaluated so that conflicting
    /// definite verdicts surface as a hard error instead of being masked
    /// by priority.
    pub fn consult(
        &self,
        rho: &ComplexMatrix,
        d_a: usize,
        d_b: usize,
        tol: f64,
    ) -> Result<SuiteOutcome> {
        let mut consulted = Vec::new();
        for oracle in &self.oracles {
            if !oracle.applicable(rho, d_a, d_b) {
                continue;
            }
            let outcome = oracle.decide(rho, d_a, d_b, tol)?;
            consulted.push(Consultation {
                oracle: oracle.name(),
                outcome,
            });
        }
        let mut winner: Option<&Consultation> = None;
        for c in &consulted {
            if !c.outcome.is_definite() {
                continue;
            }
            match winner {
                None => winner = Some(c),
                Some(first) => {
                    if first.outcome.verdict() != c.outcome.verdict() {
                        return Err(Error::OracleConflict {
                            first_name: first.oracle.to_string(),
                            first_verdict: first.outcome.verdict().to_string(),
                            first_certificate: first
                                .outcome
                                .certificate()
                                .map(|ct| ct.to_string())
                                .unwrap_or_default(),
                            second_name: c.oracle.to_string(),
                            second_verdict: c.outcome.verdict().to_string(),
                            second_certificate: c
                                .outcome
                                .certificate()
                                .map(|ct| ct.to_string())
                                .unwrap_or_default(),
                        });
                    }
                }
            }
        }
        let verdict = winner
            .map(|c| c.outcome.clone())
            .unwrap_or_else(OracleVerdict::inconclusive);
        Ok(SuiteOutcome { verdict, consulted })
    }
}

/// First definite verdict in registry order; hard error on conflicting
/// definite verdicts; `Inconclusive` when nothing speaks up.
pub fn oracle_all(
    registry: &OracleRegistry,
    rho: &ComplexMatrix,
    d_a: usize,
    d_b: usize,
    tol: f64,
) -> Result<OracleVerdict> {
    Ok(registry.consult(rho, d_a, d_b, tol)?.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::{Bipartition, IndexBlock};
    use crate::states::{
        density_from_pure, make_basis, make_ghz, random_pure, werner_2qubit, SubsystemDims,
    };
    use approx::assert_abs_diff_eq;

    fn head_cut(n: usize) -> Bipartition {
        Bipartition::new(
            IndexBlock::singleton(1),
            IndexBlock::new((2..=n).collect::<Vec<_>>()).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn pure_oracle_examples() {
        let sep = density_from_pure(&make_basis(SubsystemDims::qubits(2).unwrap(), &[0, 0]).unwrap());
        let v = oracle_pure(sep.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Separable);
        assert_eq!(v.certificate(), Some(&Certificate::SchmidtRank(1)));

        let bell = density_from_pure(&make_ghz(2, 2).unwrap());
        let v = oracle_pure(bell.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Entangled);
        assert_eq!(v.certificate(), Some(&Certificate::SchmidtRank(2)));

        // |+-><+-|
        let s = 0.5;
        let amps: Vec<_> = [s, -s, s, -s].iter().map(|x| num_complex::Complex64::from(*x)).collect();
        let pm = density_from_pure(
            &crate::states::PureState::new(SubsystemDims::qubits(2).unwrap(), amps).unwrap(),
        );
        let v = oracle_pure(pm.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Separable);
    }

    #[test]
    fn pure_oracle_rejects_mixed_input() {
        let w = werner_2qubit(0.5).unwrap();
        assert!(matches!(
            oracle_pure(w.matrix(), 2, 2, 1e-8),
            Err(Error::OracleRequiresPure { .. })
        ));
    }

    #[test]
    fn ppt_on_werner_family() {
        let w = werner_2qubit(0.5).unwrap();
        let v = oracle_ppt(w.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Entangled);
        match v.certificate() {
            Some(Certificate::MinPtEigenvalue(min)) => {
                assert_abs_diff_eq!(*min, -0.125, epsilon = 1e-10)
            }
            other => panic!("unexpected certificate {other:?}"),
        }

        let w = werner_2qubit(0.2).unwrap();
        let v = oracle_ppt(w.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Separable);
        match v.certificate() {
            Some(Certificate::MinPtEigenvalue(min)) => {
                assert_abs_diff_eq!(*min, 0.1, epsilon = 1e-10)
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn ppt_is_inconclusive_outside_sufficiency_dims() {
        let d = 9;
        let mixed = ComplexMatrix::identity(d).scale(num_complex::Complex64::from(1.0 / d as f64));
        let v = oracle_ppt(&mixed, 3, 3, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Inconclusive);
        assert!(v.certificate().is_none());
    }

    #[test]
    fn ccnr_examples() {
        let bell = density_from_pure(&make_ghz(2, 2).unwrap());
        let v = oracle_ccnr(bell.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Entangled);
        match v.certificate() {
            Some(Certificate::CcnrExcess(e)) => assert_abs_diff_eq!(*e, 1.0, epsilon = 1e-10),
            other => panic!("unexpected certificate {other:?}"),
        }

        let prod = density_from_pure(&make_basis(SubsystemDims::qubits(2).unwrap(), &[0, 1]).unwrap());
        let v = oracle_ccnr(prod.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Inconclusive);

        let mixed = ComplexMatrix::identity(4).scale(num_complex::Complex64::from(0.25));
        let v = oracle_ccnr(&mixed, 2, 2, 1e-8).unwrap();
        assert_eq!(v.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn suite_first_definite_wins() {
        let reg = OracleRegistry::from_names(&["ppt", "ccnr"]).unwrap();
        let w = werner_2qubit(0.5).unwrap();
        let out = reg.consult(w.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(out.verdict.verdict(), Verdict::Entangled);
        assert_eq!(out.consulted[0].oracle, "ppt");

        let reg = OracleRegistry::from_names(&["ccnr"]).unwrap();
        let w = werner_2qubit(0.2).unwrap();
        let out = reg.consult(w.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(out.verdict.verdict(), Verdict::Inconclusive);

        let reg = OracleRegistry::from_names(&["pure"]).unwrap();
        let prod = density_from_pure(&make_basis(SubsystemDims::qubits(2).unwrap(), &[1, 0]).unwrap());
        let out = reg.consult(prod.matrix(), 2, 2, 1e-8).unwrap();
        assert_eq!(out.verdict.verdict(), Verdict::Separable);
    }

    #[test]
    fn registry_rejects_bad_configurations() {
        assert!(matches!(
            OracleRegistry::from_names::<&str>(&[]),
            Err(Error::EmptyRegistry)
        ));
        assert!(matches!(
            OracleRegistry::from_names(&["ppt", "ppt"]),
            Err(Error::DuplicateOracle(_))
        ));
        assert!(matches!(
            OracleRegistry::from_names(&["nope"]),
            Err(Error::UnknownOracle(_))
        ));
    }

    struct AlwaysSeparable;
    impl BipartiteOracle for AlwaysSeparable {
        fn name(&self) -> &'static str {
            "always-separable"
        }
        fn applicable(&self, _: &ComplexMatrix, _: usize, _: usize) -> bool {
            true
        }
        fn decide(&self, _: &ComplexMatrix, _: usize, _: usize, _: f64) -> Result<OracleVerdict> {
            Ok(OracleVerdict::separable(Certificate::SchmidtRank(1)))
        }
    }

    #[test]
    fn conflicting_definite_verdicts_are_a_hard_error() {
        let reg = OracleRegistry::new(vec![Box::new(PptOracle), Box::new(AlwaysSeparable)]).unwrap();
        let w = werner_2qubit(0.5).unwrap();
        let err = reg.consult(w.matrix(), 2, 2, 1e-8).unwrap_err();
        assert!(matches!(err, Error::OracleConflict { .. }));
        let msg = err.to_string();
        assert!(msg.contains("ppt") && msg.contains("always-separable"), "{msg}");
    }

    #[test]
    fn ppt_agrees_with_pure_oracle_where_definite() {
        for (dims, da, db, seeds) in [
            (SubsystemDims::qubits(2).unwrap(), 2, 2, 0..100u64),
            (SubsystemDims::new(vec![2, 3]).unwrap(), 2, 3, 100..200u64),
        ] {
            for seed in seeds {
                let psi = random_pure(dims.clone(), seed).unwrap();
                let rho = density_from_pure(&psi);
                let from_pure = oracle_pure(rho.matrix(), da, db, 1e-8).unwrap();
                let from_ppt = oracle_ppt(rho.matrix(), da, db, 1e-8).unwrap();
                assert!(from_ppt.is_definite());
                assert_eq!(from_ppt.verdict(), from_pure.verdict(), "seed {seed}");
            }
        }
        // also across a cut of product states
        let _ = head_cut(2);
    }

    #[test]
    fn verdicts_are_monotone_in_tolerance() {
        for p in [1.0 / 3.0 - 1e-3, 1.0 / 3.0 + 1e-3, 0.1, 0.9] {
            let w = werner_2qubit(p).unwrap();
            let mut last: Option<Verdict> = None;
            let mut tol = 1e-12;
            while tol <= 1e-4 {
                let v = oracle_ppt(w.matrix(), 2, 2, tol).unwrap().verdict();
                if let Some(prev) = last {
                    let flipped = (prev == Verdict::Entangled && v == Verdict::Separable)
                        || (prev == Verdict::Separable && v == Verdict::Entangled);
                    assert!(!flipped, "p={p} tol={tol}: {prev} -> {v}");
                }
                last = Some(v);
                tol *= 10.0;
            }
        }
    }

    #[test]
    fn certificates_are_reproducible() {
        let w = werner_2qubit(0.7).unwrap();
        let a = oracle_ppt(w.matrix(), 2, 2, 1e-8).unwrap();
        let b = oracle_ppt(w.matrix(), 2, 2, 1e-8).unwrap();
        match (a.certificate(), b.certificate()) {
            (Some(Certificate::MinPtEigenvalue(x)), Some(Certificate::MinPtEigenvalue(y))) => {
                assert!((x - y).abs() < 1e-12);
            }
            other => panic!("unexpected certificates {other:?}"),
        }
    }
}
