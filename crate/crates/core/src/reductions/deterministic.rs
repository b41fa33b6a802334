//! Deterministic base-`p` reductions: the coordinates of a close (or short)
//! lattice vector are fixed one digit at a time with `p` (or `p + 1`) estimates
//! per digit.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{gram_schmidt, lll_reduce, LatticeBasis};
use crate::oracle::{estimate_cvp, estimate_svp, EstimationConfig, GapCvpOracle, GapSvpOracle};
use crate::primes::Prime;
use crate::rational::{round_half_even, Int, Rational, RationalVector};

use super::{rank_one_cvp, step_factor_sq, verified_point, FactorBound, ReductionParameters, ReductionReport};

const MAX_ELL: u32 = 1 << 16;

fn smallest_ell(ratio: &Rational, power_step: u32, threshold: &Int) -> Result<u32> {
    if *ratio <= Rational::one() {
        return Err(Error::InvalidParameter("digit base must exceed the approximation factor".into()));
    }
    let step = num_traits::pow(ratio.clone(), power_step as usize);
    let threshold = Rational::from_integer(threshold.clone());
    let mut acc = step.clone();
    for ell in 1..=MAX_ELL {
        if acc >= threshold {
            return Ok(ell);
        }
        acc *= &step;
    }
    Err(Error::InvalidParameter(format!("digit count exceeds {MAX_ELL}")))
}

/// Smallest `ℓ ≥ 1` with `2ℓ·log(p/γ) ≥ n + log n + 2`, i.e. `(p/γ)^{2ℓ} ≥ n·2^{n+2}`.
pub fn det_cvp_ell(n: usize, p: &Int, gamma: &Rational) -> Result<u32> {
    let ratio = Rational::from_integer(p.clone()) / gamma;
    smallest_ell(&ratio, 2, &(Int::from(n) << (n + 2)))
}

/// Smallest `ℓ ≥ 1` with `ℓ·log(p/γ²) ≥ n + 3`, i.e. `(p/γ²)^ℓ ≥ 2^{n+3}`.
pub fn det_svp_ell(n: usize, p: &Int, gamma: &Rational) -> Result<u32> {
    let ratio = Rational::from_integer(p.clone()) / (gamma * gamma);
    smallest_ell(&ratio, 1, &(Int::one() << (n + 3)))
}

fn usize_of(v: &Int) -> Result<usize> {
    num_traits::ToPrimitive::to_usize(v).ok_or_else(|| Error::InvalidParameter(format!("p = {v} is too large")))
}

/// `γ^{ℓn}`-approximate CVP from a γ-GapCVP oracle, with `p` integer and `γ² < p`.
pub fn det_cvp<O: GapCvpOracle + ?Sized>(
    basis: &LatticeBasis,
    target: &RationalVector,
    p: &Int,
    oracle: &O,
    config: &EstimationConfig,
) -> Result<ReductionReport> {
    let gamma = oracle.gamma().clone();
    let pq = Rational::from_integer(p.clone());
    if *p < Int::from(2) || &gamma * &gamma >= pq {
        return Err(Error::InvalidParameter(format!("det-cvp needs p ≥ 2 and γ² < p, got p = {p}")));
    }
    if target.dim() != basis.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.ambient_dim(),
            found: target.dim(),
        });
    }
    let n = basis.rank();
    let top_ell = det_cvp_ell(n, p, &gamma)?;
    let digits = usize_of(p)?;
    let mut lattice = basis.clone();
    let mut t = target.clone();
    let mut inexact = 0u64;
    let mut levels = Vec::new();
    while lattice.rank() > 1 {
        let m = lattice.rank();
        let ell = det_cvp_ell(m, p, &gamma)?;
        levels.push(ell);
        let b = lll_reduce(&lattice);
        let bn = b.row(m - 1).clone();
        let mut unit = vec![vec![Int::zero(); m]; m];
        for (k, row) in unit.iter_mut().enumerate() {
            row[k] = Int::one();
        }
        // p^i
        let mut power = Int::one();
        for _ in 0..ell {
            let next = &power * p;
            unit[m - 1][m - 1] = next.clone();
            let sub = b.transformed(&unit)?;
            let mut best: Option<(Rational, usize)> = None;
            for j in 0..digits {
                let shifted = t.add_scaled_int(&-(&power * Int::from(j)), &bn);
                let e = estimate_cvp(oracle, &sub, &shifted, config)?;
                if !e.exact {
                    inexact += 1;
                }
                if best.as_ref().is_none_or(|(v, _)| e.value_sq < *v) {
                    best = Some((e.value_sq, j));
                }
            }
            let (_, j) = best.expect("p ≥ 2");
            t = t.add_scaled_int(&-(&power * Int::from(j)), &bn);
            power = next;
        }
        let gs = gram_schmidt(b.rows())?;
        let star = &gs.vectors[m - 1];
        let pl = Rational::from_integer(power.clone());
        let c = round_half_even(&(t.dot(star) / (pl * &gs.sq_norms[m - 1])));
        t = t.add_scaled_int(&-(&power * c), &bn);
        lattice = b.without(m - 1)?;
    }
    let y = rank_one_cvp(lattice.row(0), &t);
    let point = verified_point(basis, &y + &(target - &t))?;
    let value_sq = (&point.coordinates - target).norm_sq();
    let mut report = ReductionReport::new(
        "det-cvp",
        point,
        value_sq,
        FactorBound {
            base_sq: step_factor_sq(&gamma, config.slack_bits, inexact > 0),
            exponent: Rational::from_integer(Int::from(top_ell as u64 * n as u64)),
        },
        ReductionParameters {
            gamma,
            ell: Some(top_ell),
            p: Some(p.clone()),
            slack_bits: Some(config.slack_bits),
            ..Default::default()
        },
    );
    report.inexact_estimates = inexact;
    if !levels.is_empty() {
        let l: Vec<String> = levels.iter().map(u32::to_string).collect();
        report.notes.push(format!("ell per level {}", l.join(",")));
    }
    Ok(report.with_audits(&[oracle.audit()]))
}

fn p_adic_valuation(v: &Int, p: &Int) -> u32 {
    let mut v = v.abs();
    let mut k = 0;
    while !v.is_zero() && v.is_multiple_of(p) {
        v /= p;
        k += 1;
    }
    k
}

/// Coefficient rows of `L(b_1..b_{m−2}, x·b_{m−1} + y·b_m, z·b_m)`.
fn pair_rows(m: usize, x: &Int, y: &Int, z: &Int) -> Vec<Vec<Int>> {
    let mut rows = vec![vec![Int::zero(); m]; m];
    for (k, row) in rows.iter_mut().enumerate().take(m - 2) {
        row[k] = Int::one();
    }
    rows[m - 2][m - 2] = x.clone();
    rows[m - 2][m - 1] = y.clone();
    rows[m - 1][m - 1] = z.clone();
    rows
}

/// `(a1, a2, a3)` after choosing digit `j ∈ 0..=p` (`j = p` scales the combined vector).
pub(crate) fn next_coefficients(a: &(Int, Int, Int), j: &Int, p: &Int) -> (Int, Int, Int) {
    if j == p {
        (&a.0 * p, a.1.clone(), a.2.clone())
    } else {
        (a.0.clone(), &a.1 + j * &a.2, p * &a.2)
    }
}

/// `γ^{ℓn}`-approximate SVP from a γ-GapSVP oracle, with `p` prime and `γ³ < p`.
pub fn det_svp<O: GapSvpOracle + ?Sized>(
    basis: &LatticeBasis,
    p: &Int,
    oracle: &O,
    config: &EstimationConfig,
) -> Result<ReductionReport> {
    let gamma = oracle.gamma().clone();
    let prime = Prime::new(p.clone())?;
    let p = prime.value();
    if &gamma * &gamma * &gamma >= Rational::from_integer(p.clone()) {
        return Err(Error::InvalidParameter(format!("det-svp needs γ³ < p, got p = {p}")));
    }
    let n = basis.rank();
    let top_ell = det_svp_ell(n, p, &gamma)?;
    let digits = usize_of(p)?;
    let mut lattice = basis.clone();
    let mut inexact = 0u64;
    let mut levels = Vec::new();
    while lattice.rank() > 1 {
        let m = lattice.rank();
        let ell = det_svp_ell(m, p, &gamma)?;
        levels.push(ell);
        let b = lll_reduce(&lattice);
        let mut a = (Int::one(), Int::zero(), Int::one());
        for _ in 0..ell {
            let mut best: Option<(Rational, usize)> = None;
            for j in 0..=digits {
                let rows = if j < digits {
                    pair_rows(m, &a.0, &(&a.1 + Int::from(j) * &a.2), &(p * &a.2))
                } else {
                    pair_rows(m, &(p * &a.0), &(p * &a.1), &a.2)
                };
                let e = estimate_svp(oracle, &b.transformed(&rows)?, config)?;
                if !e.exact {
                    inexact += 1;
                }
                if best.as_ref().is_none_or(|(v, _)| e.value_sq < *v) {
                    best = Some((e.value_sq, j));
                }
            }
            let (_, j) = best.expect("p + 1 candidates");
            a = next_coefficients(&a, &Int::from(j), p);
        }
        let k1 = p_adic_valuation(&a.0, p);
        let k2 = p_adic_valuation(&a.2, p);
        lattice = if k1 >= k2 {
            b.without(m - 2)?
        } else {
            let mut rows = pair_rows(m, &a.0, &a.1, &Int::one());
            rows.pop();
            b.transformed(&rows)?
        };
    }
    let point = verified_point(basis, lattice.row(0).clone())?;
    let value_sq = point.coordinates.norm_sq();
    let mut report = ReductionReport::new(
        "det-svp",
        point,
        value_sq,
        FactorBound {
            base_sq: step_factor_sq(&gamma, config.slack_bits, inexact > 0),
            exponent: Rational::from_integer(Int::from(top_ell as u64 * n as u64)),
        },
        ReductionParameters {
            gamma,
            ell: Some(top_ell),
            p: Some(p.clone()),
            slack_bits: Some(config.slack_bits),
            ..Default::default()
        },
    );
    report.inexact_estimates = inexact;
    if !levels.is_empty() {
        let l: Vec<String> = levels.iter().map(u32::to_string).collect();
        report.notes.push(format!("ell per level {}", l.join(",")));
    }
    Ok(report.with_audits(&[oracle.audit()]))
}
