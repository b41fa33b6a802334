//! Guided nearest-hyperplane search: CVP from a GapCVP oracle and an h-SVP oracle.

use crate::error::{Error, Result};
use crate::lattice::{extend_to_basis, lll_reduce, nearby_hyperplane_indices, LatticeBasis};
use crate::oracle::{estimate_cvp, EstimationConfig, GapCvpOracle, HsvpOracle};
use crate::rational::{Int, Rational, RationalVector};

use super::{rank_one_cvp, step_factor_sq, verified_point, FactorBound, ReductionParameters, ReductionReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GuidedConfig {
    /// Depth of each exhaustive super-step.
    pub ell: u32,
    pub estimation: EstimationConfig,
}

impl GuidedConfig {
    pub fn new(ell: u32) -> Self {
        GuidedConfig {
            ell,
            estimation: EstimationConfig::default(),
        }
    }
}

/// One level of the hyperplane decomposition `L = ⋃_i (L' + i·b_1)`.
struct Level {
    dual_first: RationalVector,
    b1: RationalVector,
    sub: LatticeBasis,
    /// `h·rank`, the half-width of the index window.
    slack: Rational,
}

fn level<H: HsvpOracle + ?Sized>(lattice: &LatticeBasis, hsvp: &H) -> Result<Level> {
    let dual = lattice.dual();
    let w = hsvp.solve(&dual)?;
    if w.is_zero() || !dual.contains(&w.coordinates) {
        return Err(Error::NoValidCandidate);
    }
    let (dual_basis, _) = extend_to_basis(&dual, &w.coordinates)?;
    let primal = dual_basis.dual();
    Ok(Level {
        dual_first: dual_basis.row(0).clone(),
        b1: primal.row(0).clone(),
        sub: lll_reduce(&primal.without(0)?),
        slack: hsvp.factor() * Rational::from_integer(Int::from(lattice.rank())),
    })
}

struct Search<'a, C: ?Sized> {
    levels: &'a [Level],
    oracle: &'a C,
    config: &'a EstimationConfig,
    leaves: u64,
    inexact: u64,
    /// `(estimate, path, shifted target)` of the best leaf so far.
    best: Option<(Rational, Vec<Int>, RationalVector)>,
}

impl<C: GapCvpOracle + ?Sized> Search<'_, C> {
    fn explore(&mut self, depth: usize, target: &RationalVector, path: &mut Vec<Int>) -> Result<()> {
        let lv = &self.levels[depth];
        let (lo, hi) = nearby_hyperplane_indices(&lv.dual_first, target, &lv.slack);
        let mut i = lo;
        while i <= hi {
            let shifted = target.add_scaled_int(&-&i, &lv.b1);
            path.push(i.clone());
            if depth + 1 == self.levels.len() {
                let e = estimate_cvp(self.oracle, &lv.sub, &shifted, self.config)?;
                self.leaves += 1;
                if !e.exact {
                    self.inexact += 1;
                }
                // windows are scanned in increasing order, so strict improvement keeps the smallest path
                if self.best.as_ref().is_none_or(|(b, _, _)| e.value_sq < *b) {
                    self.best = Some((e.value_sq, path.clone(), shifted));
                }
            } else {
                self.explore(depth + 1, &shifted, path)?;
            }
            path.pop();
            i += 1;
        }
        Ok(())
    }
}

/// `γ^{n/ℓ}`-approximate CVP. Each super-step enumerates every index path of depth
/// `ℓ` through the nearby-hyperplane windows, estimates the distance at each
/// leaf, and commits to the leaf with the smallest estimate (ties: smallest path).
pub fn cvp_guided<C, H>(
    basis: &LatticeBasis,
    target: &RationalVector,
    config: &GuidedConfig,
    gapcvp: &C,
    hsvp: &H,
) -> Result<ReductionReport>
where
    C: GapCvpOracle + ?Sized,
    H: HsvpOracle + ?Sized,
{
    if config.ell == 0 {
        return Err(Error::InvalidParameter("ell must be at least 1".into()));
    }
    if target.dim() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient_dim(),
            found: target.dim(),
        });
    }
    let n = basis.rank();
    let gamma = gapcvp.gamma().clone();
    let mut lattice = lll_reduce(basis);
    let mut t = target.clone();
    let mut inexact = 0;
    let mut max_paths = 0;
    while lattice.rank() > 1 {
        let depth = (config.ell as usize).min(lattice.rank() - 1);
        let mut levels = Vec::with_capacity(depth);
        let mut cur = lattice.clone();
        for _ in 0..depth {
            let lv = level(&cur, hsvp)?;
            cur = lv.sub.clone();
            levels.push(lv);
        }
        let mut search = Search {
            levels: &levels,
            oracle: gapcvp,
            config: &config.estimation,
            leaves: 0,
            inexact: 0,
            best: None,
        };
        search.explore(0, &t, &mut Vec::new())?;
        max_paths = max_paths.max(search.leaves);
        inexact += search.inexact;
        let (_, _, shifted) = search.best.expect("every window is nonempty");
        t = shifted;
        lattice = cur;
    }
    let y = rank_one_cvp(lattice.row(0), &t);
    // t = target − (lattice vector), and y is close to t
    let coords = &y + &(target - &t);
    let point = verified_point(basis, coords)?;
    let value_sq = (&point.coordinates - target).norm_sq();
    let nq = Rational::from_integer(Int::from(n));
    let mut report = ReductionReport::new(
        "cvp-guided",
        point,
        value_sq,
        FactorBound {
            base_sq: step_factor_sq(&gamma, config.estimation.slack_bits, inexact > 0),
            exponent: nq / Rational::from_integer(Int::from(config.ell)),
        },
        ReductionParameters {
            gamma,
            ell: Some(config.ell),
            h: Some(hsvp.factor().clone()),
            slack_bits: Some(config.estimation.slack_bits),
            ..Default::default()
        },
    );
    report.inexact_estimates = inexact;
    report.max_paths = Some(max_paths);
    Ok(report.with_audits(&[gapcvp.audit(), hsvp.audit()]))
}

/// `(2hn + 2)^ℓ`, the leaf bound for one super-step.
pub fn guided_path_bound(h: &Rational, n: usize, ell: u32) -> Rational {
    let two = Rational::from_integer(Int::from(2));
    let base = &two * h * Rational::from_integer(Int::from(n)) + two;
    num_traits::pow(base, ell as usize)
}
