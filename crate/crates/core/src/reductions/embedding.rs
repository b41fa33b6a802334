//! The embedding heuristic for CVP and the rank-preserving hyperplane wrapper
//! that turns an SVP oracle plus a rank-(n−1) CVP solver into a CVP solver.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{
    extend_to_basis, lll_reduce, project_onto_span, LatticeBasis, LatticePoint,
};
use crate::oracle::HsvpOracle;
use crate::rational::{ceil, floor, sqrt_floor_approx, Int, Rational, RationalVector};
use crate::solvers::{babai_nearest_plane, cvp_exact, EnumerationBudget};

use super::{rank_one_cvp, verified_point, FactorBound, ReductionParameters, ReductionReport};

/// Rows `(b_i, 0)` followed by `(t, height)`.
pub fn kannan_embed(basis: &LatticeBasis, target: &RationalVector, height: &Rational) -> Result<LatticeBasis> {
    if !height.is_positive() {
        return Err(Error::InvalidParameter("embedding height must be positive".into()));
    }
    if target.dim() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient_dim(),
            found: target.dim(),
        });
    }
    let mut rows: Vec<RationalVector> = basis
        .rows()
        .iter()
        .map(|b| b.extended([Rational::zero()]))
        .collect();
    rows.push(target.extended([height.clone()]));
    LatticeBasis::new(rows)
}

/// About half the Babai distance on an LLL-reduced basis; zero when Babai hits the target.
pub fn default_embedding_height(basis: &LatticeBasis, target: &RationalVector) -> Result<Rational> {
    let babai = babai_nearest_plane(&lll_reduce(basis), target)?;
    Ok(sqrt_floor_approx(&(babai.dist_sq / Rational::from_integer(Int::from(4))), 16))
}

/// CVP candidate from the embedded lattice: the SVP answer yields a lattice point when
/// its last coefficient is ±1; otherwise Babai's point is returned.
pub fn kannan_cvp<O: HsvpOracle + ?Sized>(
    basis: &LatticeBasis,
    target: &RationalVector,
    svp: &O,
    height: Option<Rational>,
) -> Result<LatticePoint> {
    let reduced = lll_reduce(basis);
    let babai = babai_nearest_plane(&reduced, target)?;
    if babai.dist_sq.is_zero() {
        return verified_point(basis, babai.point.coordinates);
    }
    let height = match height {
        Some(h) => h,
        None => default_embedding_height(&reduced, target)?,
    };
    if !height.is_positive() {
        return verified_point(basis, babai.point.coordinates);
    }
    let embedded = kannan_embed(&reduced, target, &height)?;
    let x = svp.solve(&embedded)?;
    let n = basis.rank();
    let last = &x.coefficients[n];
    let candidate = if last.abs().is_one() {
        // x = Σ c_i b_i + c_n t with c_n = ±1, so −c_n Σ c_i b_i is close to t
        let sign = -last;
        let lattice_part: Vec<Int> = x.coefficients[..n].iter().map(|c| c * &sign).collect();
        reduced.combination(&lattice_part)
    } else {
        babai.point.coordinates
    };
    verified_point(basis, candidate)
}

/// How the wrapper solves its rank-(n−1) sub-instances.
pub enum InnerCvp<'a> {
    Exact(EnumerationBudget),
    Kannan(&'a dyn HsvpOracle),
}

impl InnerCvp<'_> {
    fn solve(&self, basis: &LatticeBasis, target: &RationalVector) -> Result<RationalVector> {
        match self {
            InnerCvp::Exact(budget) => Ok(cvp_exact(basis, target, budget)?.point.coordinates),
            InnerCvp::Kannan(svp) => Ok(kannan_cvp(basis, target, *svp, None)?.coordinates),
        }
    }
}

/// Scans the hyperplanes `L' + i·b_1`, `⌊a⌋ − n ≤ i ≤ ⌈a⌉ + n`, where `b_1^*` comes
/// from the SVP oracle on the dual, and keeps the closest candidate (ties: smallest `i`).
pub fn cvp_to_svp_wrapper<O: HsvpOracle + ?Sized>(
    basis: &LatticeBasis,
    target: &RationalVector,
    svp: &O,
    inner: &InnerCvp<'_>,
) -> Result<ReductionReport> {
    let n = basis.rank();
    let exact_inner = matches!(inner, InnerCvp::Exact(_));
    let bound = FactorBound {
        base_sq: if exact_inner {
            Rational::one()
        } else {
            Rational::from_integer(Int::from(n))
        },
        exponent: Rational::one(),
    };
    let params = ReductionParameters {
        gamma: svp.factor().clone(),
        ..Default::default()
    };
    if n == 1 {
        let y = rank_one_cvp(basis.row(0), target);
        let point = verified_point(basis, y)?;
        let v = (&point.coordinates - target).norm_sq();
        return Ok(ReductionReport::new("cvp-wrapper", point, v, bound, params).with_audits(&[svp.audit()]));
    }
    let dual = basis.dual();
    let w = svp.solve(&dual)?;
    if w.is_zero() || !dual.contains(&w.coordinates) {
        return Err(Error::NoValidCandidate);
    }
    let (dual_basis, _) = extend_to_basis(&dual, &w.coordinates)?;
    let primal = dual_basis.dual();
    let b1 = primal.row(0).clone();
    let sub = lll_reduce(&primal.without(0)?);
    let a = dual_basis.row(0).dot(target);
    let slack = Int::from(n);
    let lo = floor(&a) - &slack;
    let hi = ceil(&a) + &slack;
    let mut best: Option<(Rational, RationalVector)> = None;
    let mut i = lo;
    while i <= hi {
        let shifted = target.add_scaled_int(&-&i, &b1);
        let projected = project_onto_span(&sub, &shifted);
        let y = inner.solve(&sub, &projected)?;
        let candidate = y.add_scaled_int(&i, &b1);
        let d = (&candidate - target).norm_sq();
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, candidate));
        }
        i += 1;
    }
    let (value_sq, coords) = best.expect("window is nonempty");
    let point = verified_point(basis, coords)?;
    let mut report = ReductionReport::new("cvp-wrapper", point, value_sq, bound, params);
    if !exact_inner {
        report.notes.push("bound sqrt(n) recorded for comparison only".into());
    }
    Ok(report.with_audits(&[svp.audit()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{audit_wrap, HsvpPolicy, SimulatedHsvp};
    use crate::rational::rat;
    use crate::solvers::{distance_sq, lambda1_sq};

    fn exact_svp() -> SimulatedHsvp {
        SimulatedHsvp::new(rat(1, 1), HsvpPolicy::Exact, EnumerationBudget::default()).unwrap()
    }

    #[test]
    fn embedding_of_z1() {
        let b = LatticeBasis::identity(1);
        let e = kannan_embed(&b, &RationalVector::zeros(1), &rat(1, 1)).unwrap();
        assert_eq!(e.rank(), 2);
        assert!(e.contains(&RationalVector::from_ints(&[0, 1])));
    }

    #[test]
    fn embedding_recovers_closest_point() {
        let b = LatticeBasis::identity(2);
        let t = RationalVector(vec![rat(2, 5), rat(0, 1)]);
        let y = kannan_cvp(&b, &t, &exact_svp(), Some(rat(2, 5))).unwrap();
        assert!(y.coordinates.is_zero());
    }

    #[test]
    fn huge_height_leaves_lambda1_unchanged() {
        let b = LatticeBasis::from_int_rows(&[&[2, 1], &[1, 3]]).unwrap();
        let t = RationalVector(vec![rat(1, 3), rat(1, 7)]);
        let e = kannan_embed(&b, &t, &rat(1000, 1)).unwrap();
        let budget = EnumerationBudget::default();
        assert_eq!(lambda1_sq(&e, &budget).unwrap(), lambda1_sq(&b, &budget).unwrap());
    }

    #[test]
    fn wrapper_with_exact_inner_is_exact() {
        let budget = EnumerationBudget::default();
        let b = LatticeBasis::from_int_rows(&[&[3, 1, 0], &[1, -2, 4], &[0, 5, 1]]).unwrap();
        let (svp, audit) = audit_wrap(exact_svp(), Some(3));
        for t in [
            RationalVector(vec![rat(7, 3), rat(1, 2), rat(-4, 5)]),
            RationalVector::from_ints(&[4, -1, 4]),
        ] {
            let r = cvp_to_svp_wrapper(&b, &t, &svp, &InnerCvp::Exact(budget)).unwrap();
            assert_eq!(r.value_sq, distance_sq(&b, &t, &budget).unwrap());
        }
        assert!(audit.snapshot().max_call_dimension <= 3);
    }

    #[test]
    fn wrapper_with_embedding_stays_in_rank() {
        let b = LatticeBasis::from_int_rows(&[&[3, 1, 0], &[1, -2, 4], &[0, 5, 1]]).unwrap();
        let (svp, audit) = audit_wrap(exact_svp(), Some(3));
        let t = RationalVector(vec![rat(7, 3), rat(1, 2), rat(-4, 5)]);
        let r = cvp_to_svp_wrapper(&b, &t, &svp, &InnerCvp::Kannan(&svp)).unwrap();
        assert!(b.contains(&r.output.coordinates));
        assert_eq!(audit.snapshot().max_call_dimension, 3);
    }
}
