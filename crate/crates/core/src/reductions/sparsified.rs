//! SVP to uSVP by repeated sparsification, its GapSVP-flavoured composition,
//! the uSVP padding construction and the CVP chain built on top of it.

use std::cmp::Ordering;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{lll_reduce, LatticeBasis, LatticePoint};
use crate::oracle::{
    audit_wrap, HsvpOracle, OracleAudit, OraclePolicy, PolicyKind, SimulatedUsvp, UsvpOracle,
    UsvpViolationPolicy,
};
use crate::primes::{next_prime_above, Prime};
use crate::rational::{ceil_log2_scaled, pow_rational, sqrt_floor_approx, Int, Rational, RationalVector};
use crate::solvers::EnumerationBudget;
use crate::sparsify::{random_z, sparsify};

use super::embedding::{cvp_to_svp_wrapper, InnerCvp};
use super::{verified_point, FactorBound, ReductionParameters, ReductionReport};

/// Default bound on `k·(ℓ+1)`, the number of sparsified oracle calls.
pub const DEFAULT_SAMPLE_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SvpToUsvpConfig {
    /// `None` picks [`default_a`].
    pub a: Option<Rational>,
    pub seed: u64,
    pub sample_cap: u64,
}

impl SvpToUsvpConfig {
    pub fn new(a: Option<Rational>, seed: u64) -> Self {
        SvpToUsvpConfig {
            a,
            seed,
            sample_cap: DEFAULT_SAMPLE_CAP,
        }
    }
}

/// `k`, `ℓ` and the primes of one sparsified run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsifiedParameters {
    pub a: Rational,
    /// `a` was raised so that `2^a > γⁿ`.
    pub raised: bool,
    pub k: Int,
    pub ell: u32,
    pub primes: Vec<Prime>,
}

/// `2^a` compared with `x > 0`, exactly.
fn cmp_two_pow(a: &Rational, x: &Rational) -> Ordering {
    let v = a.denom().to_usize().expect("small denominator");
    let u = a.numer();
    let xv = num_traits::pow(x.clone(), v);
    let e = u.abs().to_usize().expect("small exponent");
    let two_u = if u.is_negative() {
        Rational::new(Int::one(), Int::one() << e)
    } else {
        Rational::from_integer(Int::one() << e)
    };
    two_u.cmp(&xv)
}

/// The smallest multiple of 1/100 that is at least `log2(n+1)`.
pub fn default_a(n: usize) -> Rational {
    let u = ceil_log2_scaled(&Rational::from_integer(Int::from(n + 1)), 100);
    Rational::new(Int::from(u), Int::from(100))
}

/// `⌈4^e⌉` for rational `e ≥ 0`.
fn ceil_four_pow(e: &Rational) -> Int {
    let v = e.denom().to_u32().expect("small denominator");
    let u = e.numer().to_usize().expect("small exponent");
    let power = Int::one() << (2 * u);
    let root = power.nth_root(v);
    if num_traits::pow(root.clone(), v as usize) == power {
        root
    } else {
        root + 1
    }
}

/// Validates `a` and derives `k = ⌈4^{an/(n−a)}⌉`, `ℓ = ⌊n/a⌋` and primes `2k^{i+1} < p_i < 4k^{i+1}`.
pub fn sparsified_parameters(
    n: usize,
    gamma: &Rational,
    a: Option<Rational>,
    sample_cap: u64,
) -> Result<SparsifiedParameters> {
    if n < 2 {
        return Err(Error::RankTooSmall { needed: 2, rank: n });
    }
    let nq = Rational::from_integer(Int::from(n));
    let mut a = a.unwrap_or_else(|| default_a(n));
    if cmp_two_pow(&a, &(&nq + Rational::one())) == Ordering::Less {
        return Err(Error::InvalidParameter(format!(
            "a = {a} is below log2(n+1) for n = {n}"
        )));
    }
    let gamma_n = pow_rational(gamma, n as u32);
    let mut raised = false;
    if cmp_two_pow(&a, &gamma_n) != Ordering::Greater {
        a = Rational::from_integer(Int::from(ceil_log2_scaled(&gamma_n, 1) + 1));
        raised = true;
    }
    if a >= nq {
        return Err(Error::InvalidParameter(format!("a = {a} must stay below the rank {n}")));
    }
    let e = &a * &nq / (&nq - &a);
    let k = ceil_four_pow(&e);
    let ell = (&nq / &a).floor().to_integer().to_u32().expect("ℓ ≤ n");
    let samples = &k * Int::from(ell + 1);
    if samples > Int::from(sample_cap) {
        return Err(Error::CapExceeded(format!(
            "{samples} sparsified samples exceed the cap {sample_cap}"
        )));
    }
    let mut primes = Vec::with_capacity(ell as usize + 1);
    let mut kp = k.clone();
    for _ in 0..=ell {
        let p = next_prime_above(&(&kp * 2));
        assert!(p.value() < &(&kp * 4), "Bertrand interval violated");
        primes.push(p);
        kp *= &k;
    }
    Ok(SparsifiedParameters {
        a,
        raised,
        k,
        ell,
        primes,
    })
}

/// Approximate SVP from a uSVP oracle: `k` rounds of sparsifying with each `p_i`
/// and keeping the shortest verified oracle answer.
pub fn svp_to_usvp<O: UsvpOracle + ?Sized>(
    basis: &LatticeBasis,
    oracle: &O,
    config: &SvpToUsvpConfig,
) -> Result<ReductionReport> {
    let n = basis.rank();
    let gamma = oracle.gamma().clone();
    let nq = Rational::from_integer(Int::from(n));
    if n == 1 {
        let x = basis.point(vec![Int::one()]);
        let v = x.norm_sq();
        let mut r = ReductionReport::new(
            "svp-usvp",
            x,
            v,
            FactorBound {
                base_sq: Rational::one(),
                exponent: Rational::one(),
            },
            ReductionParameters {
                gamma,
                seed: Some(config.seed),
                ..Default::default()
            },
        );
        r.notes.push("rank one: the basis vector is shortest".into());
        return Ok(r.with_audits(&[oracle.audit()]));
    }
    let params = sparsified_parameters(n, &gamma, config.a.clone(), config.sample_cap)?;
    let reduced = lll_reduce(basis);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rounds = params.k.to_u64().expect("bounded by the sample cap");
    let mut best: Option<(Rational, RationalVector)> = None;
    let mut rejected = 0u64;
    for _ in 0..rounds {
        for p in &params.primes {
            let z = random_z(p.value(), n, &mut rng);
            let sample = sparsify(&reduced, p, &z)?;
            let x = oracle.solve(&sample.sublattice)?;
            let v = x.norm_sq();
            if best.as_ref().is_some_and(|(b, _)| v >= *b) {
                continue;
            }
            if x.coordinates.is_zero() || !basis.contains(&x.coordinates) {
                rejected += 1;
                continue;
            }
            best = Some((v, x.coordinates));
        }
    }
    let (value_sq, coords) = best.ok_or(Error::NoValidCandidate)?;
    let output = verified_point(basis, coords)?;
    let mut report = ReductionReport::new(
        "svp-usvp",
        output,
        value_sq,
        FactorBound {
            base_sq: &gamma * &gamma,
            exponent: &nq / &params.a,
        },
        ReductionParameters {
            gamma,
            a: Some(params.a.clone()),
            ell: Some(params.ell),
            k: Some(params.k.clone()),
            primes: params.primes.iter().map(|p| p.value().clone()).collect(),
            seed: Some(config.seed),
            ..Default::default()
        },
    );
    if params.raised {
        report.notes.push("a raised to ceil(n log gamma) + 1 so that 2^a > gamma^n".into());
    }
    if params.a > &nq / Rational::from_integer(Int::from(2)) {
        report.notes.push("a exceeds n/2".into());
    }
    if rejected > 0 {
        report.notes.push(format!("{rejected} oracle answers failed validation"));
    }
    Ok(report.with_audits(&[oracle.audit()]))
}

/// The simulated uSVP behaviour standing in for a GapSVP oracle with the given in-gap policy.
pub fn usvp_policy_for(policy: &OraclePolicy) -> UsvpViolationPolicy {
    match policy.kind {
        PolicyKind::HonestThreshold => UsvpViolationPolicy::ShortestAnyway,
        PolicyKind::AdversarialYes | PolicyKind::AdversarialNo => UsvpViolationPolicy::SecondMinimum,
        PolicyKind::SeededRandom => UsvpViolationPolicy::ArbitrarySeeded { seed: policy.seed },
    }
}

/// Approximate SVP from γ-GapSVP. The uSVP-from-GapSVP leg is not implemented;
/// a simulated uSVP oracle whose promise-violation behaviour mirrors the gap
/// policy answers in its place, audited with limit `n`.
pub fn svp_to_gapsvp(
    basis: &LatticeBasis,
    gamma: &Rational,
    policy: &OraclePolicy,
    config: &SvpToUsvpConfig,
    budget: &EnumerationBudget,
) -> Result<(ReductionReport, OracleAudit)> {
    let usvp = SimulatedUsvp::new(gamma.clone(), usvp_policy_for(policy), *budget)?;
    let (oracle, audit) = audit_wrap(usvp, Some(basis.rank()));
    let mut report = svp_to_usvp(basis, &oracle, config)?;
    report.reduction = "svp-gapsvp";
    report.notes.push(format!(
        "uSVP-to-GapSVP leg simulated: {} gap policy as {} uSVP behaviour",
        policy.kind,
        usvp_policy_for(policy).name()
    ));
    Ok((report, audit))
}

/// An SVP oracle realised by [`svp_to_usvp`] with `a = 2n·log γ + log(n+1)`.
pub struct SparsifiedSvp<'a, O: ?Sized> {
    usvp: &'a O,
    seed: u64,
    sample_cap: u64,
    factor: Rational,
}

impl<'a, O: UsvpOracle + ?Sized> SparsifiedSvp<'a, O> {
    pub fn new(usvp: &'a O, seed: u64) -> Self {
        SparsifiedSvp {
            usvp,
            seed,
            sample_cap: DEFAULT_SAMPLE_CAP,
            // γ^{n/a} ≤ √2 for this choice of a
            factor: Rational::from_integer(Int::from(2)),
        }
    }

    /// Smallest multiple of 1/100 at least `2n·log γ + log(n+1)`.
    pub fn a_for(&self, n: usize) -> Rational {
        let g = self.usvp.gamma();
        let x = pow_rational(g, 2 * n as u32) * Rational::from_integer(Int::from(n + 1));
        Rational::new(Int::from(ceil_log2_scaled(&x, 100)), Int::from(100))
    }
}

impl<O: UsvpOracle + ?Sized> HsvpOracle for SparsifiedSvp<'_, O> {
    fn factor(&self) -> &Rational {
        &self.factor
    }

    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint> {
        let config = SvpToUsvpConfig {
            a: (basis.rank() > 1).then(|| self.a_for(basis.rank())),
            seed: self.seed,
            sample_cap: self.sample_cap,
        };
        Ok(svp_to_usvp(basis, self.usvp, &config)?.output)
    }

    fn audit(&self) -> Option<&OracleAudit> {
        self.usvp.audit()
    }
}

/// CVP from uSVP: the hyperplane wrapper whose dual SVP call and inner embedded
/// CVP calls are all served by sparsification over the uSVP oracle.
pub fn cvp_chain_via_usvp<O: UsvpOracle + ?Sized>(
    basis: &LatticeBasis,
    target: &RationalVector,
    usvp: &O,
    seed: u64,
) -> Result<ReductionReport> {
    let svp = SparsifiedSvp::new(usvp, seed);
    let mut report = cvp_to_svp_wrapper(basis, target, &svp, &InnerCvp::Kannan(&svp))?;
    report.reduction = "cvp-chain";
    report.parameters.gamma = usvp.gamma().clone();
    report.parameters.seed = Some(seed);
    report.notes.push("inner CVP leg substituted by the embedding heuristic; no sqrt(n) guarantee".into());
    Ok(report)
}

/// Pads a rank-`n` basis to rank `N = ⌈n^{1/ε}⌉` with orthogonal vectors of length
/// `r ≥ 3‖b_1‖` in fresh coordinates. `r` is exact when `‖b_1‖` is rational and
/// otherwise a rational upper approximation within `2^-32`.
pub fn pad_usvp(basis: &LatticeBasis, epsilon: &Rational, rank_cap: usize) -> Result<LatticeBasis> {
    if !epsilon.is_positive() || *epsilon >= Rational::one() {
        return Err(Error::InvalidParameter(format!("epsilon {epsilon} must lie in (0, 1)")));
    }
    let n = basis.rank();
    let target_rank = ceil_root_power(n, epsilon);
    if target_rank > Int::from(rank_cap) {
        return Err(Error::CapExceeded(format!("padded rank {target_rank} exceeds {rank_cap}")));
    }
    let big_n = target_rank.to_usize().expect("bounded by cap");
    let r_sq = Rational::from_integer(Int::from(9)) * basis.row(0).norm_sq();
    let r = rational_sqrt_ceil(&r_sq);
    let m = basis.ambient_dim();
    let extra = big_n - n;
    let mut rows: Vec<RationalVector> = basis
        .rows()
        .iter()
        .map(|b| b.extended(std::iter::repeat_n(Rational::zero(), extra)))
        .collect();
    for j in 0..extra {
        let mut v = RationalVector::zeros(m + extra);
        v[m + j] = r.clone();
        rows.push(v);
    }
    LatticeBasis::new(rows)
}

/// `⌈n^{1/ε}⌉` for rational `ε = u/v`: the least `N` with `N^u ≥ n^v`.
fn ceil_root_power(n: usize, epsilon: &Rational) -> Int {
    let u = epsilon.numer().to_u32().expect("small numerator");
    let v = epsilon.denom().to_usize().expect("small denominator");
    let nv = num_traits::pow(Int::from(n), v);
    let root = nv.nth_root(u);
    if num_traits::pow(root.clone(), u as usize) == nv {
        root
    } else {
        root + 1
    }
}

/// Smallest "nice" rational at least `√q`: exact when `q` is a rational square.
fn rational_sqrt_ceil(q: &Rational) -> Rational {
    let num_root = q.numer().sqrt();
    let den_root = q.denom().sqrt();
    if &num_root * &num_root == *q.numer() && &den_root * &den_root == *q.denom() {
        return Rational::new(num_root, den_root);
    }
    // the floor approximation is within one grid step of the root
    sqrt_floor_approx(q, 32) + Rational::new(Int::one(), Int::one() << 32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::solvers::{lambda1_sq, lambda2_sq};

    #[test]
    fn k_and_prime_selection() {
        // an/(n−a) = 1 gives k = 4, and the first prime above 8 is 11
        let p = sparsified_parameters(2, &rat(1, 1), Some(rat(1, 1)), DEFAULT_SAMPLE_CAP);
        assert!(p.is_err(), "a = 1 is below log2(3)");
        let p = sparsified_parameters(4, &rat(1, 1), Some(rat(12, 5)), DEFAULT_SAMPLE_CAP).unwrap();
        // e = (48/5)/(8/5) = 6
        assert_eq!(p.k, int(4096));
        assert_eq!(p.ell, 1);
        assert_eq!(p.primes[0].value(), &int(8209));
    }

    #[test]
    fn ceil_four_pow_examples() {
        assert_eq!(ceil_four_pow(&rat(1, 1)), int(4));
        assert_eq!(ceil_four_pow(&rat(1, 2)), int(2));
        // 4^(1/3) ≈ 1.587
        assert_eq!(ceil_four_pow(&rat(1, 3)), int(2));
        // 4^(16/3) = 2^(32/3) ≈ 1625.5
        assert_eq!(ceil_four_pow(&rat(16, 3)), int(1626));
    }

    #[test]
    fn default_a_is_at_least_log() {
        for n in 2..10 {
            let a = default_a(n);
            assert_ne!(cmp_two_pow(&a, &rat(n as i64 + 1, 1)), Ordering::Less);
            let below = &a - rat(1, 100);
            assert_eq!(cmp_two_pow(&below, &rat(n as i64 + 1, 1)), Ordering::Less);
        }
        assert_eq!(default_a(3), rat(2, 1));
        assert_eq!(default_a(7), rat(3, 1));
    }

    #[test]
    fn a_is_raised_for_large_gamma() {
        let p = sparsified_parameters(6, &rat(3, 2), Some(rat(3, 1)), DEFAULT_SAMPLE_CAP).unwrap_err();
        // 1.5^6 ≈ 11.4 needs a = 5, which leaves k = 4^15 beyond the cap
        assert!(matches!(p, Error::CapExceeded(_)));
        let p = sparsified_parameters(8, &rat(11, 10), Some(rat(16, 5)), DEFAULT_SAMPLE_CAP).unwrap();
        assert!(!p.raised);
    }

    #[test]
    fn exact_oracle_on_z4() {
        let b = LatticeBasis::identity(4);
        let o = SimulatedUsvp::new(rat(1, 1), UsvpViolationPolicy::ShortestAnyway, EnumerationBudget::default()).unwrap();
        let (o, audit) = audit_wrap(o, Some(4));
        let r = svp_to_usvp(&b, &o, &SvpToUsvpConfig::new(None, 1)).unwrap();
        assert_eq!(r.value_sq, rat(1, 1));
        assert!(audit.snapshot().max_call_dimension <= 4);
    }

    #[test]
    fn padding_preserves_shortest_vector() {
        let b = LatticeBasis::identity(2);
        let padded = pad_usvp(&b, &rat(1, 2), 12).unwrap();
        assert_eq!(padded.rank(), 4);
        assert_eq!(padded.row(2).norm_sq(), rat(9, 1));
        let budget = EnumerationBudget::default();
        assert_eq!(lambda1_sq(&padded, &budget).unwrap(), rat(1, 1));
        let skew = LatticeBasis::from_int_rows(&[&[1, 0], &[0, 5]]).unwrap();
        let padded = pad_usvp(&skew, &rat(1, 2), 12).unwrap();
        assert_eq!(lambda2_sq(&padded, &budget).unwrap(), rat(9, 1));
        assert!(pad_usvp(&b, &rat(1, 4), 12).is_err());
    }

    #[test]
    fn irrational_padding_length_is_an_upper_bound() {
        let b = LatticeBasis::from_int_rows(&[&[1, 1], &[0, 3]]).unwrap();
        let padded = pad_usvp(&b, &rat(1, 2), 12).unwrap();
        let r_sq = padded.row(2).norm_sq();
        assert!(r_sq >= rat(18, 1));
        assert!(r_sq < rat(18, 1) + rat(1, 1_000_000));
    }
}
