//! Random prime-index sublattices `L' = {y ∈ L : ⟨z, B⁻¹y⟩ ≡ 0 mod p}` and
//! exact/empirical statistics of their short vectors.

use num_bigint::RandBigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{unit_matrix, LatticeBasis};
use crate::primes::Prime;
use crate::rational::{Int, Rational};
use crate::solvers::{short_vectors, successive_minima, EnumerationBudget};

/// One draw of the sparsifier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsificationSample {
    pub prime: Int,
    /// Entries reduced into `[0, p)`.
    pub z: Vec<Int>,
    pub sublattice: LatticeBasis,
    /// Integer matrix `T` with `sublattice = T · basis`.
    pub transform: Vec<Vec<Int>>,
}

/// Coefficient matrix of a basis of `{c ∈ ℤⁿ : ⟨z, c⟩ ≡ 0 mod p}`.
pub fn sparsifier_transform(p: &Int, z: &[Int]) -> Vec<Vec<Int>> {
    let n = z.len();
    let mut t = unit_matrix(n);
    let Some(j) = z.iter().position(|x| !x.is_zero()) else {
        return t;
    };
    let inv = mod_inverse(&z[j], p);
    for (i, zi) in z.iter().enumerate() {
        if i != j {
            t[i][j] = -((zi * &inv).mod_floor(p));
        }
    }
    t[j][j] = p.clone();
    t
}

fn mod_inverse(a: &Int, p: &Int) -> Int {
    let g = a.extended_gcd(p);
    debug_assert!(g.gcd.is_one());
    g.x.mod_floor(p)
}

/// Basis of the sublattice selected by `z` (reduced mod `p`).
pub fn sparsify(basis: &LatticeBasis, p: &Prime, z: &[Int]) -> Result<SparsificationSample> {
    let p = p.value();
    if z.len() != basis.rank() {
        return Err(Error::DimensionMismatch {
            expected: basis.rank(),
            found: z.len(),
        });
    }
    let z: Vec<Int> = z.iter().map(|x| x.mod_floor(p)).collect();
    let transform = sparsifier_transform(p, &z);
    let sublattice = basis.transformed(&transform)?;
    Ok(SparsificationSample {
        prime: p.clone(),
        z,
        sublattice,
        transform,
    })
}

/// Uniform `z ∈ ℤ_pⁿ`.
pub fn random_z(p: &Int, n: usize, rng: &mut ChaCha8Rng) -> Vec<Int> {
    (0..n)
        .map(|_| rng.gen_bigint_range(&Int::zero(), p))
        .collect()
}

/// Whether the lattice point with coefficients `c` survives sparsification by `z`.
pub fn survives(p: &Int, z: &[Int], c: &[Int]) -> bool {
    let s: Int = z.iter().zip(c).map(|(a, b)| a * b).sum();
    s.mod_floor(p).is_zero()
}

/// Exact probabilities over all `pⁿ` choices of `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsificationProbability {
    pub prime: Int,
    /// `ξ(L, r1)` and `ξ(L, r2)`.
    pub xi_r1: u64,
    pub xi_r2: u64,
    /// `Pr[λ1(L') ≤ r1 and λ2(L') > r2]`
    pub compound: Rational,
    /// `ξ(L, r1)/p · (1 − ξ(L, r2)/p)`
    pub compound_lower_bound: Rational,
    /// For each primitive `y_0` with `‖y_0‖ ≤ r2`: `Pr[y_0 ∈ L', y_i ∉ L' for the other y_i]`.
    pub single: Vec<SingleVectorEvent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingleVectorEvent {
    pub coefficients: Vec<Int>,
    pub norm_sq: Rational,
    /// Number of other primitive pairs `y_i ≠ ±y_0` in the ball.
    pub others: u64,
    pub probability: Rational,
}

impl SingleVectorEvent {
    /// `[1/p − N/p², 1/p]` for `N` other vectors.
    pub fn bounds(&self, p: &Int, n: u64) -> (Rational, Rational) {
        let p = Rational::from_integer(p.clone());
        let upper = p.recip();
        let lower = &upper - Rational::from_integer(Int::from(n)) / (&p * &p);
        (lower, upper)
    }
}

/// Exhaustive computation over `ℤ_pⁿ`; fails when `pⁿ` exceeds `cap`.
pub fn exact_sparsification_probability(
    basis: &LatticeBasis,
    p: &Prime,
    r1_sq: &Rational,
    r2_sq: &Rational,
    cap: u64,
    budget: &EnumerationBudget,
) -> Result<SparsificationProbability> {
    let p = p.value();
    if r1_sq > r2_sq {
        return Err(Error::InvalidParameter("r1 must not exceed r2".into()));
    }
    let n = basis.rank();
    let total = num_traits::pow(p.clone(), n);
    if total > Int::from(cap) {
        return Err(Error::CapExceeded(format!("{p}^{n} choices of z exceed {cap}")));
    }
    let prim: Vec<(Vec<Int>, Rational)> = short_vectors(basis, r2_sq, budget)?
        .into_iter()
        .filter(|y| crate::rational::gcd_all(&y.coefficients).is_one())
        .map(|y| {
            let norm = y.norm_sq();
            (y.coefficients, norm)
        })
        .collect();
    let xi_r2 = prim.len() as u64;
    let xi_r1 = prim.iter().filter(|(_, m)| m <= r1_sq).count() as u64;
    let pu = p.to_u64().expect("p fits after the cap check");
    let mut compound_hits: u64 = 0;
    let mut single_hits = vec![0u64; prim.len()];
    let mut z = vec![Int::zero(); n];
    let mut inside = Vec::with_capacity(prim.len());
    loop {
        inside.clear();
        inside.extend(
            prim.iter()
                .enumerate()
                .filter(|(_, (c, _))| survives(p, &z, c))
                .map(|(i, _)| i),
        );
        if inside.len() == 1 {
            let i = inside[0];
            single_hits[i] += 1;
            if prim[i].1 <= *r1_sq {
                compound_hits += 1;
            }
        }
        // odometer over ℤ_pⁿ
        let mut k = 0;
        loop {
            if k == n {
                let denom = total.clone();
                let pr = |hits: u64| Rational::new(Int::from(hits), denom.clone());
                let pq = Rational::from_integer(p.clone());
                let compound_lower_bound = Rational::from_integer(Int::from(xi_r1)) / &pq
                    * (Rational::one() - Rational::from_integer(Int::from(xi_r2)) / &pq);
                let single = prim
                    .iter()
                    .zip(&single_hits)
                    .map(|((c, m), &h)| SingleVectorEvent {
                        coefficients: c.clone(),
                        norm_sq: m.clone(),
                        others: xi_r2 - 1,
                        probability: pr(h),
                    })
                    .collect();
                return Ok(SparsificationProbability {
                    prime: p.clone(),
                    xi_r1,
                    xi_r2,
                    compound: pr(compound_hits),
                    compound_lower_bound,
                    single,
                });
            }
            z[k] += 1u32;
            if z[k] == Int::from(pu) {
                z[k] = Int::zero();
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// Empirical frequency of `λ1(L') ≤ r1 and λ2(L') > r2` over seeded draws, computed
/// from the actual sublattices.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsificationStats {
    pub trials: u64,
    pub hits: u64,
}

impl SparsificationStats {
    pub fn frequency(&self) -> Rational {
        Rational::new(Int::from(self.hits), Int::from(self.trials))
    }

    /// Whether the frequency lies within `k` standard errors of `probability`.
    pub fn within_standard_errors(&self, probability: &Rational, k: u32) -> bool {
        // (f - q)² ≤ k² q(1-q)/T, all exact
        let diff = self.frequency() - probability;
        let var = probability * (Rational::one() - probability)
            / Rational::from_integer(Int::from(self.trials));
        &diff * &diff <= var * Rational::from_integer(Int::from(k * k))
    }
}

pub fn sample_sparsification_stats(
    basis: &LatticeBasis,
    p: &Prime,
    r1_sq: &Rational,
    r2_sq: &Rational,
    trials: u64,
    seed: u64,
    budget: &EnumerationBudget,
) -> Result<SparsificationStats> {
    if trials == 0 {
        return Err(Error::InvalidParameter("at least one trial is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..trials {
        let z = random_z(p.value(), basis.rank(), &mut rng);
        let sample = sparsify(basis, p, &z)?;
        let m = successive_minima(&sample.sublattice, budget)?;
        let second_long = m.lambda2_sq.as_ref().is_none_or(|l2| l2 > r2_sq);
        if &m.lambda1_sq <= r1_sq && second_long {
            hits += 1;
        }
    }
    Ok(SparsificationStats { trials, hits })
}
