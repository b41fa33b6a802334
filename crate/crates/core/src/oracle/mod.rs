//! Simulated approximate oracles with explicit in-gap behaviour, call
//! auditing, and the decision-to-estimation bridge.
//!
//! All thresholds are passed squared: a GapSVP query `(B, d²)` must answer YES
//! when `λ1(B)² < d²` and NO when `λ1(B)² ≥ γ²d²`.

mod audit;
mod estimate;
mod gap;
mod search;

pub use audit::{AuditSnapshot, CallKind, OracleAudit};
pub use estimate::{estimate_cvp, estimate_svp, Estimate, EstimationConfig};
pub use gap::{gapsvp_from_gapcvp, GmssGapSvp, SimulatedGapCvp, SimulatedGapSvp};
pub use search::{HsvpPolicy, SimulatedHsvp, SimulatedUsvp, UsvpViolationPolicy};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::{LatticeBasis, LatticePoint};
use crate::rational::{Int, Rational, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

/// How a gap oracle answers when the true value lies in `[d, γd)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    /// Threshold at the geometric middle of the gap: YES iff value < √γ·d.
    HonestThreshold,
    AdversarialYes,
    AdversarialNo,
    /// A deterministic pseudo-random bit of the seed and the query.
    SeededRandom,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::HonestThreshold,
        PolicyKind::AdversarialYes,
        PolicyKind::AdversarialNo,
        PolicyKind::SeededRandom,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::HonestThreshold => "honest",
            PolicyKind::AdversarialYes => "adversarial-yes",
            PolicyKind::AdversarialNo => "adversarial-no",
            PolicyKind::SeededRandom => "seeded-random",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown oracle policy `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OraclePolicy {
    pub kind: PolicyKind,
    pub seed: u64,
}

impl OraclePolicy {
    pub fn new(kind: PolicyKind, seed: u64) -> Self {
        OraclePolicy { kind, seed }
    }

    pub fn honest() -> Self {
        OraclePolicy::new(PolicyKind::HonestThreshold, 0)
    }

    /// The answer for true squared value `value_sq`, query `d_sq` and factor `gamma`.
    /// `query_key` identifies the instance for the seeded policy.
    pub fn answer(&self, gamma: &Rational, value_sq: &Rational, d_sq: &Rational, query_key: u64) -> Answer {
        if value_sq < d_sq {
            return Answer::Yes;
        }
        if *value_sq >= gamma * gamma * d_sq {
            return Answer::No;
        }
        let yes = match self.kind {
            PolicyKind::HonestThreshold => *value_sq < gamma * d_sq,
            PolicyKind::AdversarialYes => true,
            PolicyKind::AdversarialNo => false,
            PolicyKind::SeededRandom => {
                let mut h = Fnv::new();
                h.write_u64(self.seed);
                h.write_u64(query_key);
                h.write_rational(d_sq);
                h.finish() & 1 == 1
            }
        };
        if yes {
            Answer::Yes
        } else {
            Answer::No
        }
    }
}

/// FNV-1a, used for replayable seeded choices independent of the std hasher.
pub(crate) struct Fnv(u64);

impl Fnv {
    pub(crate) fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    pub(crate) fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }

    pub(crate) fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    pub(crate) fn write_int(&mut self, v: &Int) {
        let bytes = v.to_signed_bytes_le();
        self.write_u64(bytes.len() as u64);
        self.write(&bytes);
    }

    pub(crate) fn write_rational(&mut self, q: &Rational) {
        self.write_int(q.numer());
        self.write_int(q.denom());
    }

    pub(crate) fn finish(&self) -> u64 {
        self.0
    }
}

pub(crate) fn basis_key(basis: &LatticeBasis) -> u64 {
    let mut h = Fnv::new();
    let (scale, rows) = basis.integral_rows();
    h.write_int(scale);
    for r in rows {
        for x in r {
            h.write_int(x);
        }
    }
    h.finish()
}

pub(crate) fn target_key(basis: &LatticeBasis, target: &RationalVector) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(basis_key(basis));
    for x in target.iter() {
        h.write_rational(x);
    }
    h.finish()
}

/// γ-GapSVP.
pub trait GapSvpOracle {
    fn gamma(&self) -> &Rational;
    fn decide(&self, basis: &LatticeBasis, d_sq: &Rational) -> Result<Answer>;
    /// `λ1²`, available only from exact backends.
    fn exact_value(&self, _basis: &LatticeBasis) -> Result<Rational> {
        Err(Error::ExactModeUnsupported)
    }
    fn audit(&self) -> Option<&OracleAudit> {
        None
    }
}

/// γ-GapCVP.
pub trait GapCvpOracle {
    fn gamma(&self) -> &Rational;
    fn decide(&self, basis: &LatticeBasis, target: &RationalVector, d_sq: &Rational) -> Result<Answer>;
    /// `dist(t, L)²`, available only from exact backends.
    fn exact_value(&self, _basis: &LatticeBasis, _target: &RationalVector) -> Result<Rational> {
        Err(Error::ExactModeUnsupported)
    }
    fn audit(&self) -> Option<&OracleAudit> {
        None
    }
}

/// γ-uSVP search: a shortest vector whenever `λ2 ≥ γλ1`, some nonzero lattice vector otherwise.
pub trait UsvpOracle {
    fn gamma(&self) -> &Rational;
    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint>;
    fn audit(&self) -> Option<&OracleAudit> {
        None
    }
}

/// h-SVP search: a nonzero vector of length at most `h·λ1`.
pub trait HsvpOracle {
    fn factor(&self) -> &Rational;
    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint>;
    fn audit(&self) -> Option<&OracleAudit> {
        None
    }
}

/// An oracle whose every call is counted and checked against a rank limit.
pub struct Audited<O> {
    inner: O,
    audit: OracleAudit,
}

/// Wraps `oracle` so its calls are counted; calls above `limit_dimension` fail.
pub fn audit_wrap<O>(oracle: O, limit_dimension: Option<usize>) -> (Audited<O>, OracleAudit) {
    let audit = OracleAudit::new(limit_dimension);
    (
        Audited {
            inner: oracle,
            audit: audit.clone(),
        },
        audit,
    )
}

impl<O> Audited<O> {
    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: GapSvpOracle> GapSvpOracle for Audited<O> {
    fn gamma(&self) -> &Rational {
        self.inner.gamma()
    }
    fn decide(&self, basis: &LatticeBasis, d_sq: &Rational) -> Result<Answer> {
        self.audit.record(CallKind::GapSvp, basis.rank())?;
        self.inner.decide(basis, d_sq)
    }
    fn exact_value(&self, basis: &LatticeBasis) -> Result<Rational> {
        self.audit.record(CallKind::GapSvp, basis.rank())?;
        self.inner.exact_value(basis)
    }
    fn audit(&self) -> Option<&OracleAudit> {
        Some(&self.audit)
    }
}

impl<O: GapCvpOracle> GapCvpOracle for Audited<O> {
    fn gamma(&self) -> &Rational {
        self.inner.gamma()
    }
    fn decide(&self, basis: &LatticeBasis, target: &RationalVector, d_sq: &Rational) -> Result<Answer> {
        self.audit.record(CallKind::GapCvp, basis.rank())?;
        self.inner.decide(basis, target, d_sq)
    }
    fn exact_value(&self, basis: &LatticeBasis, target: &RationalVector) -> Result<Rational> {
        self.audit.record(CallKind::GapCvp, basis.rank())?;
        self.inner.exact_value(basis, target)
    }
    fn audit(&self) -> Option<&OracleAudit> {
        Some(&self.audit)
    }
}

impl<O: UsvpOracle> UsvpOracle for Audited<O> {
    fn gamma(&self) -> &Rational {
        self.inner.gamma()
    }
    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint> {
        self.audit.record(CallKind::Usvp, basis.rank())?;
        self.inner.solve(basis)
    }
    fn audit(&self) -> Option<&OracleAudit> {
        Some(&self.audit)
    }
}

impl<O: HsvpOracle> HsvpOracle for Audited<O> {
    fn factor(&self) -> &Rational {
        self.inner.factor()
    }
    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint> {
        self.audit.record(CallKind::Hsvp, basis.rank())?;
        self.inner.solve(basis)
    }
    fn audit(&self) -> Option<&OracleAudit> {
        Some(&self.audit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn promise_region_is_forced() {
        let g = rat(11, 10);
        for kind in PolicyKind::ALL {
            let p = OraclePolicy::new(kind, 7);
            assert_eq!(p.answer(&g, &rat(1, 1), &rat(4, 1), 0), Answer::Yes);
            assert_eq!(p.answer(&g, &rat(1, 1), &rat(1, 4), 0), Answer::No);
        }
    }

    #[test]
    fn gap_region_follows_policy() {
        let g = rat(11, 10);
        let yes = OraclePolicy::new(PolicyKind::AdversarialYes, 0);
        let no = OraclePolicy::new(PolicyKind::AdversarialNo, 0);
        assert_eq!(yes.answer(&g, &rat(1, 1), &rat(1, 1), 0), Answer::Yes);
        assert_eq!(no.answer(&g, &rat(1, 1), &rat(1, 1), 0), Answer::No);
    }

    #[test]
    fn policy_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("lenient".parse::<PolicyKind>().is_err());
    }
}
