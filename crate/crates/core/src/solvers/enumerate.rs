//! Depth-first coefficient enumeration over the fraction-free Gram–Schmidt data.
//!
//! With `N_j = c_j d_{j+1} + Σ_{k>j} λ_{kj} c_k − τ_j` the scaled squared distance
//! from `Σ c_i b_i` to the target is `Σ_j N_j² / (d_j d_{j+1}) + ‖t⊥‖²`. Multiplying
//! by `P = lcm(d_j d_{j+1})` turns every level bound into an integer comparison.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::IntegralGso;
use crate::rational::Int;

pub(crate) struct Enumerator<'a> {
    gso: &'a IntegralGso,
    weights: Vec<Int>,
    tau: Vec<Int>,
    /// Skip the zero vector and report one point of each `±y` pair.
    symmetric: bool,
    coeffs: Vec<Int>,
    nodes: u64,
    limit: u64,
}

/// What the visitor wants after seeing a point: the (possibly tightened) bound.
pub(crate) type Visit<'v> = dyn FnMut(&[Int], &Int) -> Int + 'v;

impl<'a> Enumerator<'a> {
    pub(crate) fn new(gso: &'a IntegralGso, tau: Option<Vec<Int>>, limit: u64) -> (Self, Int) {
        let n = gso.rank();
        let (p, weights) = gso.level_weights();
        let symmetric = tau.is_none();
        let e = Enumerator {
            gso,
            weights,
            tau: tau.unwrap_or_else(|| vec![Int::zero(); n]),
            symmetric,
            coeffs: vec![Int::zero(); n],
            nodes: 0,
            limit,
        };
        (e, p)
    }

    /// `N_j` for candidate `c` at level `j` given the offset `C_j`.
    fn level_value(&self, j: usize, c: &Int, offset: &Int) -> Int {
        c * &self.gso.d[j + 1] + offset
    }

    /// Visits every point with weighted value `≤ bound`, letting the visitor shrink the bound.
    pub(crate) fn run(&mut self, bound: Int, visit: &mut Visit<'_>) -> Result<()> {
        let n = self.gso.rank();
        let mut bound = bound;
        self.search(n - 1, &Int::zero(), &mut bound, true, visit)
    }

    fn search(
        &mut self,
        j: usize,
        partial: &Int,
        bound: &mut Int,
        zero_above: bool,
        visit: &mut Visit<'_>,
    ) -> Result<()> {
        let n = self.gso.rank();
        let mut offset = -&self.tau[j];
        for k in j + 1..n {
            if !self.coeffs[k].is_zero() {
                offset += &self.gso.lambda[k][j] * &self.coeffs[k];
            }
        }
        let dj = &self.gso.d[j + 1];
        // nearest integer to -offset / d
        let twice: Int = -&offset * 2 + dj;
        let center = twice.div_floor(&(dj * 2));
        let restrict_sign = self.symmetric && zero_above;
        let mut up = center.clone();
        let mut down: Int = center - 1;
        let mut up_alive = true;
        let mut down_alive = !(restrict_sign && down.is_negative());
        while up_alive || down_alive {
            let nu = up_alive.then(|| self.level_value(j, &up, &offset));
            let nd = down_alive.then(|| self.level_value(j, &down, &offset));
            let take_up = match (&nu, &nd) {
                (Some(a), Some(b)) => a.abs() <= b.abs(),
                (Some(_), None) => true,
                _ => false,
            };
            let (c, nv) = if take_up {
                (up.clone(), nu.expect("alive"))
            } else {
                (down.clone(), nd.expect("alive"))
            };
            let value = partial + &self.weights[j] * &nv * &nv;
            if value > *bound {
                if take_up {
                    up_alive = false;
                } else {
                    down_alive = false;
                }
                continue;
            }
            if take_up {
                up += 1;
            } else {
                down -= 1;
                if restrict_sign && down.is_negative() {
                    down_alive = false;
                }
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::BudgetExceeded { limit: self.limit });
            }
            let still_zero = zero_above && c.is_zero();
            self.coeffs[j] = c;
            if j == 0 {
                if !(self.symmetric && still_zero) {
                    *bound = visit(&self.coeffs, &value);
                }
            } else {
                self.search(j - 1, &value, bound, still_zero, visit)?;
            }
        }
        self.coeffs[j] = Int::zero();
        Ok(())
    }
}

/// Babai's nearest-plane coefficients and weighted value, the first greedy descent.
pub(crate) fn babai(gso: &IntegralGso, tau: &[Int]) -> (Vec<Int>, Int) {
    let n = gso.rank();
    let (_, weights) = gso.level_weights();
    let mut c = vec![Int::zero(); n];
    let mut value = Int::zero();
    for j in (0..n).rev() {
        let mut offset = -&tau[j];
        for k in j + 1..n {
            offset += &gso.lambda[k][j] * &c[k];
        }
        let dj = &gso.d[j + 1];
        let twice: Int = -&offset * 2 + dj;
        c[j] = twice.div_floor(&(dj * 2));
        let nv = &c[j] * dj + &offset;
        value += &weights[j] * &nv * &nv;
    }
    (c, value)
}
