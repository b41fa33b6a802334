//! Exact ground-truth solvers: SVP, CVP, λ2, primitive-point counting.
//!
//! Every solver LLL-reduces first, enumerates on the reduced basis and maps
//! coefficients back to the caller's basis.

mod enumerate;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{canonical_sign, lll_reduce_with_transform, LatticeBasis, LatticePoint};
use crate::rational::{ceil, gcd_all, Int, Rational, RationalVector};

use enumerate::{babai, Enumerator};

/// Limits on a single enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_nodes: u64,
    pub rank_cap: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_nodes: 10_000_000,
            rank_cap: 12,
        }
    }
}

impl EnumerationBudget {
    fn check_rank(&self, basis: &LatticeBasis) -> Result<()> {
        if basis.rank() > self.rank_cap {
            return Err(Error::RankCap {
                rank: basis.rank(),
                cap: self.rank_cap,
            });
        }
        Ok(())
    }
}

/// `ξ(L, r)`: primitive vectors of length at most `r`, counting `±x` once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveCount {
    pub radius_sq: Rational,
    pub count: u64,
}

/// A closest vector and its squared distance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CvpSolution {
    pub point: LatticePoint,
    pub dist_sq: Rational,
}

/// `λ1`, `λ2` and vectors achieving them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccessiveMinima {
    pub lambda1_sq: Rational,
    pub shortest: LatticePoint,
    /// `None` in rank one.
    pub lambda2_sq: Option<Rational>,
    pub second: Option<LatticePoint>,
}

/// Reduced basis plus the map from reduced coefficients back to input coefficients.
struct Reduced {
    basis: LatticeBasis,
    transform: Vec<Vec<Int>>,
}

impl Reduced {
    fn new(basis: &LatticeBasis, budget: &EnumerationBudget) -> Result<Self> {
        budget.check_rank(basis)?;
        let (reduced, transform) = lll_reduce_with_transform(basis);
        Ok(Reduced {
            basis: reduced,
            transform,
        })
    }

    /// Input-basis coefficients of the reduced-basis combination `c`.
    fn lift(&self, c: &[Int]) -> Vec<Int> {
        let n = c.len();
        (0..n)
            .map(|j| {
                c.iter()
                    .zip(&self.transform)
                    .fold(Int::zero(), |acc, (ci, row)| acc + ci * &row[j])
            })
            .collect()
    }

    fn scaled_row_norm(&self, i: usize) -> Int {
        let (_, rows) = self.basis.integral_rows();
        rows[i].iter().map(|x| x * x).sum()
    }
}

/// Exact shortest nonzero vector. Among several shortest vectors the one whose
/// sign-normalised coefficient vector is lexicographically smallest is returned.
pub fn svp_exact(basis: &LatticeBasis, budget: &EnumerationBudget) -> Result<LatticePoint> {
    let r = Reduced::new(basis, budget)?;
    let gso = r.basis.integral_gso();
    let (mut e, p) = Enumerator::new(gso, None, budget.max_nodes);
    let bound = &p * (0..basis.rank()).map(|i| r.scaled_row_norm(i)).min().expect("rank ≥ 1");
    let mut best: Option<(Int, Vec<Vec<Int>>)> = None;
    e.run(bound, &mut |c, v| track_optima(&mut best, c, v))?;
    let (_, optima) = best.expect("a basis vector lies within the initial bound");
    let coeffs = optima
        .iter()
        .map(|c| {
            let mut x = r.lift(c);
            canonical_sign(&mut x);
            x
        })
        .min()
        .expect("nonempty");
    Ok(basis.point(coeffs))
}

/// Converts a weighted enumeration value back to an unscaled squared length.
fn unscale(value: &Int, p: &Int, perp: &Rational, scale: &Int) -> Rational {
    (Rational::new(value.clone(), p.clone()) + perp) / Rational::from_integer(scale * scale)
}

fn track_optima(best: &mut Option<(Int, Vec<Vec<Int>>)>, c: &[Int], v: &Int) -> Int {
    match best {
        Some((b, list)) if v == b => list.push(c.to_vec()),
        Some((b, _)) if v > b => {}
        _ => *best = Some((v.clone(), vec![c.to_vec()])),
    }
    best.as_ref().expect("just set").0.clone()
}

/// `λ1(L)²`
pub fn lambda1_sq(basis: &LatticeBasis, budget: &EnumerationBudget) -> Result<Rational> {
    Ok(svp_exact(basis, budget)?.norm_sq())
}

/// Babai's nearest-plane point on the basis as given.
pub fn babai_nearest_plane(basis: &LatticeBasis, target: &RationalVector) -> Result<CvpSolution> {
    let (gso, data) = basis.target_data(target)?;
    let (c, _) = babai(&gso, &data.tau);
    let point = basis.point(c);
    let dist_sq = (&point.coordinates - target).norm_sq();
    Ok(CvpSolution { point, dist_sq })
}

/// Exact closest vector; ties go to the lexicographically smallest coefficient vector.
pub fn cvp_exact(
    basis: &LatticeBasis,
    target: &RationalVector,
    budget: &EnumerationBudget,
) -> Result<CvpSolution> {
    let r = Reduced::new(basis, budget)?;
    let (gso, data) = r.basis.target_data(target)?;
    let (_, start) = babai(&gso, &data.tau);
    let (mut e, p) = Enumerator::new(&gso, Some(data.tau.clone()), budget.max_nodes);
    let mut best: Option<(Int, Vec<Vec<Int>>)> = None;
    e.run(start, &mut |c, v| track_optima(&mut best, c, v))?;
    let (value, optima) = best.expect("Babai's point lies within the initial bound");
    let coeffs = optima.iter().map(|c| r.lift(c)).min().expect("nonempty");
    let point = basis.point(coeffs);
    let dist_sq = unscale(&value, &p, &data.perp_sq_scaled, &gso.scale);
    debug_assert_eq!(dist_sq, (&point.coordinates - target).norm_sq());
    Ok(CvpSolution { point, dist_sq })
}

/// `dist(t, L)²`
pub fn distance_sq(
    basis: &LatticeBasis,
    target: &RationalVector,
    budget: &EnumerationBudget,
) -> Result<Rational> {
    Ok(cvp_exact(basis, target, budget)?.dist_sq)
}

fn parallel(a: &[Int], b: &[Int]) -> bool {
    let n = a.len();
    (0..n).all(|i| (i + 1..n).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

/// `λ1` and `λ2` with witnesses, in one enumeration.
pub fn successive_minima(
    basis: &LatticeBasis,
    budget: &EnumerationBudget,
) -> Result<SuccessiveMinima> {
    let r = Reduced::new(basis, budget)?;
    let gso = r.basis.integral_gso();
    let n = basis.rank();
    let (mut e, p) = Enumerator::new(gso, None, budget.max_nodes);
    if n == 1 {
        let shortest = basis.point(vec![Int::one()]);
        return Ok(SuccessiveMinima {
            lambda1_sq: shortest.norm_sq(),
            shortest,
            lambda2_sq: None,
            second: None,
        });
    }
    // any two basis vectors are independent, so the larger of the two shortest bounds λ2
    let mut norms: Vec<Int> = (0..n).map(|i| r.scaled_row_norm(i)).collect();
    norms.sort();
    let start = &p * &norms[1];
    let mut first: Option<(Int, Vec<Int>)> = None;
    let mut second: Option<(Int, Vec<Int>)> = None;
    e.run(start.clone(), &mut |c, v| {
        match &first {
            Some((v1, s)) if v >= v1 => {
                let beats = second.as_ref().is_none_or(|(v2, _)| v < v2);
                if beats && !parallel(c, s) {
                    second = Some((v.clone(), c.to_vec()));
                }
            }
            Some((_, s)) => {
                if !parallel(c, s) {
                    second = first.take();
                }
                first = Some((v.clone(), c.to_vec()));
            }
            None => first = Some((v.clone(), c.to_vec())),
        }
        second.as_ref().map_or_else(|| start.clone(), |(v2, _)| v2.clone())
    })?;
    let zero = Rational::zero();
    let scale = &gso.scale;
    let (v1, c1) = first.expect("basis vectors lie within the bound");
    let (v2, c2) = second.expect("a second basis vector lies within the bound");
    let mut l1 = r.lift(&c1);
    canonical_sign(&mut l1);
    let mut l2 = r.lift(&c2);
    canonical_sign(&mut l2);
    Ok(SuccessiveMinima {
        lambda1_sq: unscale(&v1, &p, &zero, scale),
        shortest: basis.point(l1),
        lambda2_sq: Some(unscale(&v2, &p, &zero, scale)),
        second: Some(basis.point(l2)),
    })
}

/// `λ2(L)²`
pub fn lambda2_sq(basis: &LatticeBasis, budget: &EnumerationBudget) -> Result<Rational> {
    if basis.rank() < 2 {
        return Err(Error::RankTooSmall {
            needed: 2,
            rank: basis.rank(),
        });
    }
    Ok(successive_minima(basis, budget)?
        .lambda2_sq
        .expect("rank ≥ 2"))
}

/// All nonzero lattice vectors with `‖y‖² ≤ radius_sq`, one of each `±y` pair.
pub fn short_vectors(
    basis: &LatticeBasis,
    radius_sq: &Rational,
    budget: &EnumerationBudget,
) -> Result<Vec<LatticePoint>> {
    if radius_sq.is_negative() {
        return Ok(Vec::new());
    }
    let r = Reduced::new(basis, budget)?;
    let gso = r.basis.integral_gso();
    let (mut e, p) = Enumerator::new(gso, None, budget.max_nodes);
    let s = &gso.scale;
    let bound = (radius_sq * Rational::from_integer(&p * s * s)).floor().to_integer();
    let mut found = Vec::new();
    e.run(bound.clone(), &mut |c, _| {
        found.push(r.lift(c));
        bound.clone()
    })?;
    Ok(found.into_iter().map(|c| basis.point(c)).collect())
}

/// All lattice vectors with `‖y − t‖² ≤ radius_sq`.
pub fn close_vectors(
    basis: &LatticeBasis,
    target: &RationalVector,
    radius_sq: &Rational,
    budget: &EnumerationBudget,
) -> Result<Vec<LatticePoint>> {
    let r = Reduced::new(basis, budget)?;
    let (gso, data) = r.basis.target_data(target)?;
    let (mut e, p) = Enumerator::new(&gso, Some(data.tau.clone()), budget.max_nodes);
    let s = &gso.scale;
    let room = radius_sq * Rational::from_integer(s * s) - &data.perp_sq_scaled;
    if room.is_negative() {
        return Ok(Vec::new());
    }
    let bound = (room * Rational::from_integer(p)).floor().to_integer();
    let mut found = Vec::new();
    e.run(bound.clone(), &mut |c, _| {
        found.push(r.lift(c));
        bound.clone()
    })?;
    Ok(found.into_iter().map(|c| basis.point(c)).collect())
}

/// `ξ(L, r)` by exhaustive enumeration.
pub fn count_primitive(
    basis: &LatticeBasis,
    radius_sq: &Rational,
    budget: &EnumerationBudget,
) -> Result<PrimitiveCount> {
    let count = short_vectors(basis, radius_sq, budget)?
        .iter()
        .filter(|y| gcd_all(&y.coefficients).is_one())
        .count() as u64;
    Ok(PrimitiveCount {
        radius_sq: radius_sq.clone(),
        count,
    })
}

/// Outcome of comparing a lattice point count against `2⌈2r⌉ⁿ − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointCountCheck {
    /// `|{y ∈ L : ‖y‖ ≤ r·λ1}|`, zero included.
    pub count: u64,
    pub bound: Int,
    pub holds: bool,
}

/// Counts lattice points in the ball of radius `r·λ1` and compares with `2⌈2r⌉ⁿ − 1`.
pub fn verify_point_count_bound(
    basis: &LatticeBasis,
    r: &Rational,
    budget: &EnumerationBudget,
) -> Result<PointCountCheck> {
    if r < &Rational::one() {
        return Err(Error::InvalidParameter("radius multiplier must be at least 1".into()));
    }
    let l1 = lambda1_sq(basis, budget)?;
    let half = short_vectors(basis, &(r * r * l1), budget)?.len() as u64;
    let count = 2 * half + 1;
    let side = ceil(&(r * Rational::from_integer(Int::from(2))));
    let bound: Int = num_traits::pow(side, basis.rank()) * 2 - 1;
    let holds = Int::from(count) <= bound;
    Ok(PointCountCheck {
        count,
        bound,
        holds,
    })
}
