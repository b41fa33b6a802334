//! Estimation from decision: binary search on the squared threshold.
//!
//! A NO answer at `d²` certifies `f² ≥ d²`; a YES answer certifies `f² < γ²d²`.
//! The search keeps a NO point `lo` and a YES point `hi` and stops once
//! `hi ≤ (1 + s)²·lo`, returning `γ²·hi`, so the estimate lies in
//! `[f², γ²(1 + s)²·f²]`.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{lll_reduce, LatticeBasis};
use crate::rational::{Int, Rational, RationalVector};
use crate::solvers::babai_nearest_plane;

use super::{Answer, GapCvpOracle, GapSvpOracle};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EstimationConfig {
    /// Relative slack `s = 2^-slack_bits` on the unsquared value.
    pub slack_bits: u32,
    /// Use the backend's exact value when γ = 1 and the backend offers one.
    pub exact_when_gamma_one: bool,
}

impl Default for EstimationConfig {
    fn default() -> Self {
        EstimationConfig {
            slack_bits: 20,
            exact_when_gamma_one: true,
        }
    }
}

impl EstimationConfig {
    pub fn slack(&self) -> Rational {
        Rational::new(Int::one(), Int::one() << self.slack_bits)
    }

    /// `γ²(1 + s)²`, the worst ratio between an estimate and the true squared value.
    pub fn effective_factor_sq(&self, gamma: &Rational) -> Rational {
        let one_s = Rational::one() + self.slack();
        gamma * gamma * &one_s * &one_s
    }
}

/// A squared estimate `d̃²` with `f² ≤ d̃²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Estimate {
    pub value_sq: Rational,
    /// Came from the backend's exact value rather than from bisection.
    pub exact: bool,
    pub queries: u32,
}

fn log2_floor_approx(q: &Rational) -> i64 {
    q.numer().bits() as i64 - q.denom().bits() as i64
}

fn bisect(
    gamma_sq: &Rational,
    mut lo: Rational,
    mut hi: Rational,
    upper: &Rational,
    config: &EstimationConfig,
    queries: &mut u32,
    mut decide: impl FnMut(&Rational) -> Result<Answer>,
) -> Result<Rational> {
    let one_s = Rational::one() + config.slack();
    let stop = &one_s * &one_s;
    let four = Rational::from_integer(Int::from(4));
    while hi > &lo * &stop {
        let ratio = &hi / &lo;
        let mid = if ratio > four {
            let e = ((log2_floor_approx(&ratio) - 1) / 2).max(1) as usize;
            &lo * Rational::from_integer(Int::one() << e)
        } else {
            (&lo + &hi) / Rational::from_integer(Int::from(2))
        };
        *queries += 1;
        match decide(&mid)? {
            Answer::Yes => hi = mid,
            Answer::No => lo = mid,
        }
    }
    Ok((gamma_sq * hi).min(upper.clone()))
}

/// Estimates `λ1(L)²` within `γ²(1 + s)²` using only GapSVP answers.
pub fn estimate_svp<O: GapSvpOracle + ?Sized>(
    oracle: &O,
    basis: &LatticeBasis,
    config: &EstimationConfig,
) -> Result<Estimate> {
    let gamma = oracle.gamma().clone();
    if gamma.is_one() && config.exact_when_gamma_one {
        match oracle.exact_value(basis) {
            Ok(v) => {
                return Ok(Estimate {
                    value_sq: v,
                    exact: true,
                    queries: 1,
                })
            }
            Err(Error::ExactModeUnsupported) => {}
            Err(e) => return Err(e),
        }
    }
    let reduced = lll_reduce(basis);
    let upper = reduced.row(0).norm_sq();
    let gso = reduced.integral_gso();
    let lower = (0..reduced.rank())
        .map(|i| gso.sq_norm(i))
        .min()
        .expect("rank ≥ 1");
    if !lower.is_positive() || lower > upper {
        return Err(Error::BracketInvalid(format!("lower {lower} upper {upper}")));
    }
    let gamma_sq = &gamma * &gamma;
    let mut queries = 1;
    if oracle.decide(basis, &upper)? == Answer::No {
        return Ok(Estimate {
            value_sq: upper,
            exact: false,
            queries,
        });
    }
    queries += 1;
    if oracle.decide(basis, &lower)? == Answer::Yes {
        return Ok(Estimate {
            value_sq: (&gamma_sq * &lower).min(upper),
            exact: false,
            queries,
        });
    }
    let value_sq = bisect(&gamma_sq, lower, upper.clone(), &upper, config, &mut queries, |d| {
        oracle.decide(basis, d)
    })?;
    Ok(Estimate {
        value_sq,
        exact: false,
        queries,
    })
}

/// Estimates `dist(t, L)²` within `γ²(1 + s)²` using only GapCVP answers.
pub fn estimate_cvp<O: GapCvpOracle + ?Sized>(
    oracle: &O,
    basis: &LatticeBasis,
    target: &RationalVector,
    config: &EstimationConfig,
) -> Result<Estimate> {
    if basis.contains(target) {
        return Ok(Estimate {
            value_sq: Rational::zero(),
            exact: true,
            queries: 0,
        });
    }
    let gamma = oracle.gamma().clone();
    if gamma.is_one() && config.exact_when_gamma_one {
        match oracle.exact_value(basis, target) {
            Ok(v) => {
                return Ok(Estimate {
                    value_sq: v,
                    exact: true,
                    queries: 1,
                })
            }
            Err(Error::ExactModeUnsupported) => {}
            Err(e) => return Err(e),
        }
    }
    let reduced = lll_reduce(basis);
    let upper = babai_nearest_plane(&reduced, target)?.dist_sq;
    let (gso, data) = reduced.target_data(target)?;
    let perp = &data.perp_sq_scaled / Rational::from_integer(&gso.scale * &gso.scale);
    // t − y is a nonzero vector whose entries have denominators dividing D
    let d = gso.scale.clone();
    let grid = Rational::new(Int::one(), &d * &d);
    let lower = perp.max(grid);
    if lower > upper {
        return Err(Error::BracketInvalid(format!("lower {lower} upper {upper}")));
    }
    let gamma_sq = &gamma * &gamma;
    let mut queries = 1;
    if oracle.decide(basis, target, &upper)? == Answer::No {
        return Ok(Estimate {
            value_sq: upper,
            exact: false,
            queries,
        });
    }
    queries += 1;
    if oracle.decide(basis, target, &lower)? == Answer::Yes {
        return Ok(Estimate {
            value_sq: (&gamma_sq * &lower).min(upper),
            exact: false,
            queries,
        });
    }
    let value_sq = bisect(&gamma_sq, lower, upper.clone(), &upper, config, &mut queries, |d| {
        oracle.decide(basis, target, d)
    })?;
    Ok(Estimate {
        value_sq,
        exact: false,
        queries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{OraclePolicy, PolicyKind, SimulatedGapCvp, SimulatedGapSvp};
    use crate::rational::rat;
    use crate::solvers::{distance_sq, lambda1_sq, EnumerationBudget};

    fn budget() -> EnumerationBudget {
        EnumerationBudget::default()
    }

    #[test]
    fn exact_mode_at_gamma_one() {
        let o = SimulatedGapSvp::new(rat(1, 1), OraclePolicy::honest(), budget()).unwrap();
        let b = LatticeBasis::from_int_rows(&[&[5, 1], &[2, 7]]).unwrap();
        let e = estimate_svp(&o, &b, &EstimationConfig::default()).unwrap();
        assert!(e.exact);
        assert_eq!(e.value_sq, lambda1_sq(&b, &budget()).unwrap());
    }

    #[test]
    fn z2_within_gap() {
        let cfg = EstimationConfig::default();
        for kind in PolicyKind::ALL {
            let o = SimulatedGapSvp::new(rat(11, 10), OraclePolicy::new(kind, 5), budget()).unwrap();
            let e = estimate_svp(&o, &LatticeBasis::identity(2), &cfg).unwrap();
            assert!(e.value_sq >= rat(1, 1));
            assert!(e.value_sq <= cfg.effective_factor_sq(&rat(11, 10)));
        }
    }

    #[test]
    fn bisection_without_exact_mode() {
        let cfg = EstimationConfig {
            exact_when_gamma_one: false,
            ..EstimationConfig::default()
        };
        let b = LatticeBasis::from_int_rows(&[&[9, 4, 1], &[3, -8, 2], &[1, 1, 13]]).unwrap();
        let l1 = lambda1_sq(&b, &budget()).unwrap();
        for kind in PolicyKind::ALL {
            let o = SimulatedGapSvp::new(rat(3, 2), OraclePolicy::new(kind, 2), budget()).unwrap();
            let e = estimate_svp(&o, &b, &cfg).unwrap();
            assert!(e.value_sq >= l1);
            assert!(e.value_sq <= cfg.effective_factor_sq(&rat(3, 2)) * &l1);
        }
    }

    #[test]
    fn cvp_estimates() {
        let cfg = EstimationConfig::default();
        let b = LatticeBasis::from_int_rows(&[&[4, 1], &[1, 3]]).unwrap();
        let t = RationalVector(vec![rat(7, 3), rat(-5, 2)]);
        let f = distance_sq(&b, &t, &budget()).unwrap();
        for kind in PolicyKind::ALL {
            let o = SimulatedGapCvp::new(rat(11, 10), OraclePolicy::new(kind, 8), budget()).unwrap();
            let e = estimate_cvp(&o, &b, &t, &cfg).unwrap();
            assert!(e.value_sq >= f);
            assert!(e.value_sq <= cfg.effective_factor_sq(&rat(11, 10)) * &f);
        }
        let o = SimulatedGapCvp::new(rat(2, 1), OraclePolicy::honest(), budget()).unwrap();
        let member = RationalVector::from_ints(&[5, 4]);
        assert_eq!(estimate_cvp(&o, &b, &member, &cfg).unwrap().value_sq, rat(0, 1));
    }

    #[test]
    fn honest_estimates_are_monotone_in_scale() {
        let cfg = EstimationConfig::default();
        let o = SimulatedGapSvp::new(rat(11, 10), OraclePolicy::honest(), budget()).unwrap();
        let mut last = Rational::zero();
        for c in 1..12 {
            let b = LatticeBasis::identity(2).scaled(&rat(c, 3)).unwrap();
            let e = estimate_svp(&o, &b, &cfg).unwrap().value_sq;
            assert!(e >= last);
            last = e;
        }
    }
}
