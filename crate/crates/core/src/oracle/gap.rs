use std::collections::HashMap;
use std::hash::Hash;
use std::sync::Mutex;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lattice::LatticeBasis;
use crate::rational::{Int, Rational, RationalVector};
use crate::solvers::{distance_sq, lambda1_sq, EnumerationBudget};

use super::{basis_key, target_key, Answer, GapCvpOracle, GapSvpOracle, OraclePolicy};

const CACHE_LIMIT: usize = 4096;

type BasisKey = (Int, Vec<Vec<Int>>);

fn key_of(basis: &LatticeBasis) -> BasisKey {
    let (s, rows) = basis.integral_rows();
    (s.clone(), rows.to_vec())
}

/// Exact values memoised per query; reductions ask about the same lattice repeatedly.
struct Memo<K> {
    map: Mutex<HashMap<K, Rational>>,
}

impl<K: Hash + Eq> Memo<K> {
    fn new() -> Self {
        Memo {
            map: Mutex::new(HashMap::new()),
        }
    }

    fn get_or(&self, key: K, compute: impl FnOnce() -> Result<Rational>) -> Result<Rational> {
        if let Some(v) = self.map.lock().expect("memo lock").get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        let mut map = self.map.lock().expect("memo lock");
        if map.len() >= CACHE_LIMIT {
            map.clear();
        }
        map.insert(key, v.clone());
        Ok(v)
    }
}

fn check_gamma(gamma: &Rational) -> Result<()> {
    if *gamma < Rational::from_integer(1.into()) {
        return Err(Error::InvalidParameter(format!("approximation factor {gamma} is below 1")));
    }
    Ok(())
}

fn check_threshold(d_sq: &Rational) -> Result<()> {
    if d_sq.is_negative() {
        return Err(Error::InvalidParameter("negative threshold".into()));
    }
    Ok(())
}

/// γ-GapSVP backed by exact enumeration.
pub struct SimulatedGapSvp {
    gamma: Rational,
    policy: OraclePolicy,
    budget: EnumerationBudget,
    memo: Memo<BasisKey>,
}

impl SimulatedGapSvp {
    pub fn new(gamma: Rational, policy: OraclePolicy, budget: EnumerationBudget) -> Result<Self> {
        check_gamma(&gamma)?;
        Ok(SimulatedGapSvp {
            gamma,
            policy,
            budget,
            memo: Memo::new(),
        })
    }

    pub fn policy(&self) -> OraclePolicy {
        self.policy
    }

    fn value(&self, basis: &LatticeBasis) -> Result<Rational> {
        self.memo.get_or(key_of(basis), || lambda1_sq(basis, &self.budget))
    }
}

impl GapSvpOracle for SimulatedGapSvp {
    fn gamma(&self) -> &Rational {
        &self.gamma
    }

    fn decide(&self, basis: &LatticeBasis, d_sq: &Rational) -> Result<Answer> {
        check_threshold(d_sq)?;
        let value = self.value(basis)?;
        Ok(self.policy.answer(&self.gamma, &value, d_sq, basis_key(basis)))
    }

    fn exact_value(&self, basis: &LatticeBasis) -> Result<Rational> {
        self.value(basis)
    }
}

/// γ-GapCVP backed by exact enumeration.
pub struct SimulatedGapCvp {
    gamma: Rational,
    policy: OraclePolicy,
    budget: EnumerationBudget,
    memo: Memo<(BasisKey, RationalVector)>,
}

impl SimulatedGapCvp {
    pub fn new(gamma: Rational, policy: OraclePolicy, budget: EnumerationBudget) -> Result<Self> {
        check_gamma(&gamma)?;
        Ok(SimulatedGapCvp {
            gamma,
            policy,
            budget,
            memo: Memo::new(),
        })
    }

    pub fn policy(&self) -> OraclePolicy {
        self.policy
    }

    fn value(&self, basis: &LatticeBasis, target: &RationalVector) -> Result<Rational> {
        self.memo.get_or((key_of(basis), target.clone()), || {
            distance_sq(basis, target, &self.budget)
        })
    }
}

impl GapCvpOracle for SimulatedGapCvp {
    fn gamma(&self) -> &Rational {
        &self.gamma
    }

    fn decide(&self, basis: &LatticeBasis, target: &RationalVector, d_sq: &Rational) -> Result<Answer> {
        check_threshold(d_sq)?;
        let value = self.value(basis, target)?;
        Ok(self
            .policy
            .answer(&self.gamma, &value, d_sq, target_key(basis, target)))
    }

    fn exact_value(&self, basis: &LatticeBasis, target: &RationalVector) -> Result<Rational> {
        self.value(basis, target)
    }
}

/// GapSVP through GapCVP: `λ1(L) = min_j dist(b_j, L(b_1, …, 2b_j, …, b_n))`.
pub struct GmssGapSvp<C> {
    inner: C,
}

pub fn gapsvp_from_gapcvp<C: GapCvpOracle>(inner: C) -> GmssGapSvp<C> {
    GmssGapSvp { inner }
}

impl<C> GmssGapSvp<C> {
    pub fn inner(&self) -> &C {
        &self.inner
    }
}

/// The `n` CVP instances: `b_j` doubled, target `b_j`.
fn doubled_instances(basis: &LatticeBasis) -> impl Iterator<Item = (LatticeBasis, RationalVector)> + '_ {
    let (scale, rows) = basis.integral_rows();
    (0..basis.rank()).map(move |j| {
        let mut doubled = rows.to_vec();
        for x in doubled[j].iter_mut() {
            *x *= 2;
        }
        let b = LatticeBasis::from_scaled(scale.clone(), doubled).expect("doubling keeps independence");
        (b, basis.row(j).clone())
    })
}

impl<C: GapCvpOracle> GapSvpOracle for GmssGapSvp<C> {
    fn gamma(&self) -> &Rational {
        self.inner.gamma()
    }

    fn decide(&self, basis: &LatticeBasis, d_sq: &Rational) -> Result<Answer> {
        for (b, t) in doubled_instances(basis) {
            if self.inner.decide(&b, &t, d_sq)? == Answer::Yes {
                return Ok(Answer::Yes);
            }
        }
        Ok(Answer::No)
    }

    fn exact_value(&self, basis: &LatticeBasis) -> Result<Rational> {
        let mut best: Option<Rational> = None;
        for (b, t) in doubled_instances(basis) {
            let v = self.inner.exact_value(&b, &t)?;
            if best.as_ref().is_none_or(|x| v < *x) {
                best = Some(v);
            }
        }
        Ok(best.expect("rank ≥ 1"))
    }

    fn audit(&self) -> Option<&super::OracleAudit> {
        self.inner.audit()
    }
}
