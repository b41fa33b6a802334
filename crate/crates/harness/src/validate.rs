//! Exact structural checks over a corpus and the sparsification probability tables.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use s2d_core::lattice::{gram_schmidt, is_lll_reduced, linalg::det_int, lll_reduce};
use s2d_core::primes::Prime;
use s2d_core::rational::{format_rational, gcd_all, rat, Int, Rational, RationalVector};
use s2d_core::solvers::{distance_sq, lambda1_sq, short_vectors, verify_point_count_bound, EnumerationBudget};
use s2d_core::sparsify::{
    exact_sparsification_probability, random_z, sample_sparsification_stats, sparsify, survives,
};

use crate::instance::Instance;

/// One check on one instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRow {
    pub instance: String,
    pub check: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub rows: Vec<CheckRow>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    fn push(&mut self, instance: &str, check: &'static str, pass: bool, detail: String) {
        self.rows.push(CheckRow {
            instance: instance.to_string(),
            check,
            pass,
            detail,
        });
    }

    fn push_error(&mut self, instance: &str, check: &'static str, e: impl fmt::Display) {
        self.push(instance, check, false, format!("error: {e}"));
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.rows.extend(other.rows);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "instance={} check={} pass={} {}", r.instance, r.check, r.pass, r.detail)?;
        }
        writeln!(f, "summary.checks={}", self.rows.len())?;
        writeln!(f, "summary.failures={}", self.failures().count())?;
        write!(f, "summary.pass={}", self.passed())
    }
}

/// LLL condition, lattice equality, `‖b̃_i‖² ≥ ‖b_1‖²/2^{i−1}`, and the coordinate bound
/// `|a_i| ≤ 2^{3n/2−i}·‖y‖/λ1` for every `y` with `‖y‖ ≤ 3λ1`.
pub fn validate_lll_bounds(instances: &[Instance], budget: &EnumerationBudget) -> ValidationReport {
    let mut out = ValidationReport::default();
    for inst in instances {
        let b = &inst.basis;
        let r = lll_reduce(b);
        out.push(&inst.name, "lll-condition", is_lll_reduced(&r), String::new());
        out.push(&inst.name, "lll-same-lattice", r.same_lattice(b), String::new());
        let gs = match gram_schmidt(r.rows()) {
            Ok(gs) => gs,
            Err(e) => {
                out.push_error(&inst.name, "gso-decay", e);
                continue;
            }
        };
        let b1 = r.row(0).norm_sq();
        let decay = gs
            .sq_norms
            .iter()
            .enumerate()
            .all(|(i, s)| s * Rational::from_integer(Int::one() << i) >= b1);
        out.push(&inst.name, "gso-decay", decay, String::new());
        let n = r.rank();
        let checked = lambda1_sq(&r, budget).and_then(|l1| {
            let points = short_vectors(&r, &(&l1 * rat(9, 1)), budget)?;
            let ok = points.iter().all(|y| {
                let norm = y.norm_sq();
                y.coefficients.iter().enumerate().all(|(k, a)| {
                    // squared: a_i²·λ1² ≤ 2^{3n−2i}·‖y‖², with i = k + 1
                    let shift = 3 * n - 2 * (k + 1);
                    Rational::from_integer(a * a) * &l1 <= Rational::from_integer(Int::one() << shift) * &norm
                })
            });
            Ok((ok, points.len()))
        });
        match checked {
            Ok((ok, count)) => out.push(&inst.name, "coordinate-bound", ok, format!("points={count}")),
            Err(e) => out.push_error(&inst.name, "coordinate-bound", e),
        }
    }
    out
}

/// `|{y : ‖y‖ ≤ r·λ1}| ≤ 2⌈2r⌉ⁿ − 1` for each multiplier in `radii`.
pub fn validate_point_count(instances: &[Instance], radii: &[Rational], budget: &EnumerationBudget) -> ValidationReport {
    let mut out = ValidationReport::default();
    for inst in instances {
        for r in radii {
            match verify_point_count_bound(&inst.basis, r, budget) {
                Ok(c) => out.push(
                    &inst.name,
                    "point-count",
                    c.holds,
                    format!("r={} count={} bound={}", format_rational(r), c.count, c.bound),
                ),
                Err(e) => out.push_error(&inst.name, "point-count", e),
            }
        }
    }
    out
}

/// For `samples` seeded targets in the fundamental parallelepiped of the LLL basis:
/// `dist² ≤ n·2^{n−2}·‖b̃_n‖²` and `dist²·λ1(L*)² ≤ n²/4`.
pub fn validate_covering_bounds(
    instances: &[Instance],
    samples: usize,
    seed: u64,
    budget: &EnumerationBudget,
) -> ValidationReport {
    let mut out = ValidationReport::default();
    for inst in instances {
        let r = lll_reduce(&inst.basis);
        let n = r.rank();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
        let setup = gram_schmidt(r.rows()).and_then(|gs| Ok((gs, lambda1_sq(&r.dual(), budget)?)));
        let (gs, dual_l1) = match setup {
            Ok(x) => x,
            Err(e) => {
                out.push_error(&inst.name, "covering-radius", e);
                continue;
            }
        };
        let nq = Rational::from_integer(Int::from(n));
        let covering = &nq * &gs.sq_norms[n - 1] * Rational::new(Int::one() << n, Int::from(4));
        let product = &nq * &nq / Rational::from_integer(Int::from(4));
        let mut worst = Rational::zero();
        let mut worst_product = Rational::zero();
        let mut failed = None;
        for _ in 0..samples {
            let mut t = RationalVector::zeros(r.ambient_dim());
            for row in r.rows() {
                t = t.add_scaled(&rat(rng.gen_range(0..1000), 1000), row);
            }
            match distance_sq(&r, &t, budget) {
                Ok(d) => {
                    let p = &d * &dual_l1;
                    if d > worst {
                        worst = d;
                    }
                    if p > worst_product {
                        worst_product = p;
                    }
                }
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            out.push_error(&inst.name, "covering-radius", e);
            continue;
        }
        out.push(
            &inst.name,
            "covering-radius",
            worst <= covering,
            format!("max_dist_sq={} bound={}", format_rational(&worst), format_rational(&covering)),
        );
        out.push(
            &inst.name,
            "dual-product",
            worst_product <= product,
            format!("max_product_sq={} bound={}", format_rational(&worst_product), format_rational(&product)),
        );
    }
    out
}

/// `(L*)* = L` row by row and `⟨b_i, d_j⟩ = δ_ij`.
pub fn validate_dual_identity(instances: &[Instance]) -> ValidationReport {
    let mut out = ValidationReport::default();
    for inst in instances {
        let b = &inst.basis;
        let d = b.dual();
        let biorthogonal = b.rows().iter().enumerate().all(|(i, bi)| {
            d.rows().iter().enumerate().all(|(j, dj)| {
                let v = bi.dot(dj);
                if i == j {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })
        });
        let ok = biorthogonal && d.dual().rows() == b.rows();
        out.push(&inst.name, "dual-of-dual", ok, String::new());
    }
    out
}

/// For `draws` seeded `z`: the transform has determinant `±p` (or `±1` when `z ≡ 0`), the
/// Gram determinant scales by the index squared, and every sublattice vector satisfies
/// `⟨z, c⟩ ≡ 0 mod p`.
pub fn validate_sparsify_index(instances: &[Instance], p: &Prime, draws: usize, seed: u64) -> ValidationReport {
    let mut out = ValidationReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for inst in instances {
        let b = &inst.basis;
        let mut ok = true;
        let mut detail = String::new();
        for _ in 0..draws {
            let z = random_z(p.value(), b.rank(), &mut rng);
            let s = match sparsify(b, p, &z) {
                Ok(s) => s,
                Err(e) => {
                    ok = false;
                    detail = format!("error: {e}");
                    break;
                }
            };
            let index = if z.iter().all(Zero::is_zero) {
                Int::one()
            } else {
                p.value().clone()
            };
            let det_ok = det_int(&s.transform).abs() == index;
            let gram_ok = s.sublattice.gram_determinant()
                == b.gram_determinant() * Rational::from_integer(&index * &index);
            let members_ok = s.sublattice.rows().iter().all(|row| {
                b.coefficients_of(row)
                    .is_some_and(|c| survives(p.value(), &z, &c))
            });
            if !(det_ok && gram_ok && members_ok) {
                ok = false;
                detail = format!("z={z:?} det_ok={det_ok} gram_ok={gram_ok} members_ok={members_ok}");
                break;
            }
        }
        out.push(&inst.name, "sparsify-index", ok, detail);
    }
    out
}

/// One row of the sparsification probability table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsificationRow {
    pub instance: String,
    pub p: Int,
    pub r1_sq: Rational,
    pub r2_sq: Rational,
    pub xi_r1: u64,
    pub xi_r2: u64,
    /// `(probability, lower, upper)` per primitive vector in the `r2` ball.
    pub single: Vec<(Rational, Rational, Rational)>,
    pub compound: Rational,
    pub compound_lower_bound: Rational,
    pub pass: bool,
    pub error: Option<String>,
}

/// `r1 = λ1` and the largest `r2 ≥ r1` among primitive vector lengths with `ξ(L, r2) ≤ max_count`.
pub fn sparsification_radii(
    instance: &Instance,
    max_count: u64,
    budget: &EnumerationBudget,
) -> s2d_core::Result<(Rational, Rational)> {
    let b = &instance.basis;
    let l1 = lambda1_sq(b, budget)?;
    let mut norms: Vec<Rational> = short_vectors(b, &(&l1 * rat(16, 1)), budget)?
        .into_iter()
        .filter(|y| gcd_all(&y.coefficients).is_one())
        .map(|y| y.norm_sq())
        .collect();
    norms.sort();
    let mut r2 = l1.clone();
    for (k, m) in norms.iter().enumerate() {
        let through = norms.iter().skip(k).take_while(|x| *x == m).count();
        if (k + through) as u64 > max_count {
            break;
        }
        r2 = m.clone();
    }
    Ok((l1, r2))
}

/// Exhaustive probabilities over all `z ∈ ℤ_pⁿ`, checked against `[1/p − N/p², 1/p]` with `N = ξ(L, r2)`
/// per single vector and against `ξ(r1)/p·(1 − ξ(r2)/p)` for the compound event.
pub fn sparsification_validation(
    p: &Prime,
    instances: &[Instance],
    max_count: u64,
    cap: u64,
    budget: &EnumerationBudget,
) -> Vec<SparsificationRow> {
    instances
        .iter()
        .map(|inst| {
            let mut row = SparsificationRow {
                instance: inst.name.clone(),
                p: p.value().clone(),
                r1_sq: Rational::zero(),
                r2_sq: Rational::zero(),
                xi_r1: 0,
                xi_r2: 0,
                single: Vec::new(),
                compound: Rational::zero(),
                compound_lower_bound: Rational::zero(),
                pass: false,
                error: None,
            };
            let result = sparsification_radii(inst, max_count, budget).and_then(|(r1, r2)| {
                row.r1_sq = r1.clone();
                row.r2_sq = r2.clone();
                exact_sparsification_probability(&inst.basis, p, &r1, &r2, cap, budget)
            });
            match result {
                Ok(prob) => {
                    row.xi_r1 = prob.xi_r1;
                    row.xi_r2 = prob.xi_r2;
                    let mut pass = prob.compound >= prob.compound_lower_bound;
                    for e in &prob.single {
                        let (lo, hi) = e.bounds(p.value(), prob.xi_r2);
                        pass &= lo <= e.probability && e.probability <= hi;
                        row.single.push((e.probability.clone(), lo, hi));
                    }
                    row.compound = prob.compound;
                    row.compound_lower_bound = prob.compound_lower_bound;
                    row.pass = pass;
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            row
        })
        .collect()
}

impl fmt::Display for SparsificationRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "instance={} p={}", self.instance, self.p)?;
        if let Some(e) = &self.error {
            return write!(f, " pass=false error={e}");
        }
        write!(
            f,
            " r1_sq={} r2_sq={} xi_r1={} xi_r2={} compound={} compound_lower={}",
            format_rational(&self.r1_sq),
            format_rational(&self.r2_sq),
            self.xi_r1,
            self.xi_r2,
            format_rational(&self.compound),
            format_rational(&self.compound_lower_bound)
        )?;
        for (k, (pr, lo, hi)) in self.single.iter().enumerate() {
            write!(
                f,
                " single{k}={}:[{},{}]",
                format_rational(pr),
                format_rational(lo),
                format_rational(hi)
            )?;
        }
        write!(f, " pass={}", self.pass)
    }
}

/// Empirical frequency of the compound event over seeded draws versus the exact value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonteCarloRow {
    pub instance: String,
    pub trials: u64,
    pub hits: u64,
    pub exact: Rational,
    pub pass: bool,
    pub error: Option<String>,
}

/// Monte-Carlo check of each exact row: frequency within `k` standard errors.
pub fn monte_carlo_validation(
    p: &Prime,
    instances: &[Instance],
    rows: &[SparsificationRow],
    trials: u64,
    k: u32,
    seed: u64,
    budget: &EnumerationBudget,
) -> Vec<MonteCarloRow> {
    instances
        .iter()
        .zip(rows)
        .map(|(inst, row)| {
            let mut out = MonteCarloRow {
                instance: inst.name.clone(),
                trials,
                hits: 0,
                exact: row.compound.clone(),
                pass: false,
                error: row.error.clone(),
            };
            if row.error.is_none() {
                match sample_sparsification_stats(&inst.basis, p, &row.r1_sq, &row.r2_sq, trials, seed, budget) {
                    Ok(s) => {
                        out.hits = s.hits;
                        out.pass = s.within_standard_errors(&row.compound, k);
                    }
                    Err(e) => out.error = Some(e.to_string()),
                }
            }
            out
        })
        .collect()
}

impl fmt::Display for MonteCarloRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "instance={} trials={} hits={} exact={} pass={}",
            self.instance,
            self.trials,
            self.hits,
            format_rational(&self.exact),
            self.pass
        )?;
        if let Some(e) = &self.error {
            write!(f, " error={e}")?;
        }
        Ok(())
    }
}
