use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{LatticeBasis, LatticePoint};
use crate::rational::{Int, Rational};
use crate::solvers::{short_vectors, successive_minima, svp_exact, EnumerationBudget};

use super::{basis_key, HsvpOracle, UsvpOracle};

/// What a uSVP oracle returns when `λ2 < γλ1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UsvpViolationPolicy {
    ShortestAnyway,
    /// A shortest vector independent of the shortest one.
    SecondMinimum,
    /// A pseudo-random nonzero `{-1, 0, 1}` combination of the given basis.
    ArbitrarySeeded { seed: u64 },
}

impl UsvpViolationPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            UsvpViolationPolicy::ShortestAnyway => "shortest-anyway",
            UsvpViolationPolicy::SecondMinimum => "second-minimum",
            UsvpViolationPolicy::ArbitrarySeeded { .. } => "arbitrary-seeded",
        }
    }
}

fn seeded_rng(seed: u64, basis: &LatticeBasis) -> ChaCha8Rng {
    let mut h = super::Fnv::new();
    h.write_u64(seed);
    h.write_u64(basis_key(basis));
    ChaCha8Rng::seed_from_u64(h.finish())
}

/// γ-uSVP backed by exact enumeration.
pub struct SimulatedUsvp {
    gamma: Rational,
    policy: UsvpViolationPolicy,
    budget: EnumerationBudget,
}

impl SimulatedUsvp {
    pub fn new(gamma: Rational, policy: UsvpViolationPolicy, budget: EnumerationBudget) -> Result<Self> {
        if gamma < Rational::one() {
            return Err(Error::InvalidParameter(format!("uSVP factor {gamma} is below 1")));
        }
        Ok(SimulatedUsvp { gamma, policy, budget })
    }

    pub fn policy(&self) -> UsvpViolationPolicy {
        self.policy
    }

    fn arbitrary(&self, seed: u64, basis: &LatticeBasis) -> LatticePoint {
        let n = basis.rank();
        let mut rng = seeded_rng(seed, basis);
        loop {
            let c: Vec<Int> = (0..n).map(|_| Int::from(rng.gen_range(-1i8..=1))).collect();
            if c.iter().any(|x| !x.is_zero()) {
                return basis.point(c);
            }
        }
    }
}

impl UsvpOracle for SimulatedUsvp {
    fn gamma(&self) -> &Rational {
        &self.gamma
    }

    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint> {
        // γ = 1: the promise always holds
        if self.gamma.is_one() || basis.rank() == 1 {
            return svp_exact(basis, &self.budget);
        }
        let m = successive_minima(basis, &self.budget)?;
        let l2 = m.lambda2_sq.expect("rank ≥ 2");
        if l2 >= &self.gamma * &self.gamma * &m.lambda1_sq {
            return Ok(m.shortest);
        }
        Ok(match self.policy {
            UsvpViolationPolicy::ShortestAnyway => m.shortest,
            UsvpViolationPolicy::SecondMinimum => m.second.expect("rank ≥ 2"),
            UsvpViolationPolicy::ArbitrarySeeded { seed } => self.arbitrary(seed, basis),
        })
    }
}

/// How an h-SVP oracle picks among the admissible vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HsvpPolicy {
    Exact,
    /// A seeded choice among all vectors of length at most `h·λ1`.
    SeededDegraded { seed: u64 },
    /// The longest admissible vector.
    Longest,
}

/// h-SVP backed by exact enumeration.
pub struct SimulatedHsvp {
    factor: Rational,
    policy: HsvpPolicy,
    budget: EnumerationBudget,
}

impl SimulatedHsvp {
    pub fn new(factor: Rational, policy: HsvpPolicy, budget: EnumerationBudget) -> Result<Self> {
        if factor < Rational::one() {
            return Err(Error::InvalidParameter(format!("h-SVP factor {factor} is below 1")));
        }
        Ok(SimulatedHsvp { factor, policy, budget })
    }
}

impl HsvpOracle for SimulatedHsvp {
    fn factor(&self) -> &Rational {
        &self.factor
    }

    fn solve(&self, basis: &LatticeBasis) -> Result<LatticePoint> {
        let shortest = svp_exact(basis, &self.budget)?;
        if self.policy == HsvpPolicy::Exact || self.factor.is_one() {
            return Ok(shortest);
        }
        let radius = &self.factor * &self.factor * shortest.norm_sq();
        let mut admissible = short_vectors(basis, &radius, &self.budget)?;
        admissible.sort_by(|a, b| a.coefficients.cmp(&b.coefficients));
        Ok(match self.policy {
            HsvpPolicy::SeededDegraded { seed } => {
                let i = seeded_rng(seed, basis).gen_range(0..admissible.len());
                admissible.swap_remove(i)
            }
            _ => {
                let longest = admissible
                    .iter()
                    .map(|y| y.norm_sq())
                    .max()
                    .expect("the shortest vector is admissible");
                admissible
                    .into_iter()
                    .find(|y| y.norm_sq() == longest)
                    .expect("attained")
            }
        })
    }
}
