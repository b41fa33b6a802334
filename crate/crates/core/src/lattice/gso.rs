//! Gram–Schmidt data.
//!
//! [`gram_schmidt`] is the textbook rational form. [`IntegralGso`] is the
//! fraction-free form (Gram determinants `d_i` and `λ_{ij} = d_{j+1} μ_{ij}`)
//! that LLL and enumeration run on; it only ever performs exact integer
//! divisions.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{Int, Rational, RationalVector};

use super::LatticeBasis;

/// Rational Gram–Schmidt orthogonalisation of a basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramSchmidt {
    /// `b̃_i`
    pub vectors: Vec<RationalVector>,
    /// `μ_{i,j}` for `j < i`; row `i` has length `i`.
    pub mu: Vec<Vec<Rational>>,
    /// `‖b̃_i‖²`
    pub sq_norms: Vec<Rational>,
}

impl GramSchmidt {
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }
}

/// Orthogonalises `basis`; fails when a `‖b̃_i‖²` vanishes.
pub fn gram_schmidt(rows: &[RationalVector]) -> Result<GramSchmidt> {
    let mut vectors: Vec<RationalVector> = Vec::with_capacity(rows.len());
    let mut mu = Vec::with_capacity(rows.len());
    let mut sq_norms: Vec<Rational> = Vec::with_capacity(rows.len());
    for b in rows {
        let mut star = b.clone();
        let mut row = Vec::with_capacity(vectors.len());
        for (bj, nj) in vectors.iter().zip(&sq_norms) {
            let m = b.dot(bj) / nj;
            star = star.add_scaled(&-&m, bj);
            row.push(m);
        }
        let n = star.norm_sq();
        if n.is_zero() {
            return Err(Error::DependentVectors);
        }
        vectors.push(star);
        mu.push(row);
        sq_norms.push(n);
    }
    Ok(GramSchmidt {
        vectors,
        mu,
        sq_norms,
    })
}

/// Fraction-free Gram–Schmidt data of `scale · B` for an integer `scale`
/// making every entry of `scale · B` integral.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralGso {
    pub scale: Int,
    /// `d[0] = 1`, `d[i+1]` is the Gram determinant of the first `i+1` scaled vectors.
    pub d: Vec<Int>,
    /// `lambda[i][j]` for `j < i`.
    pub lambda: Vec<Vec<Int>>,
}

impl IntegralGso {
    /// Builds the data from an integer Gram matrix (already scaled by `scale²`).
    pub fn from_gram(gram: &[Vec<Int>], scale: Int) -> Result<Self> {
        let n = gram.len();
        let mut d = vec![Int::zero(); n + 1];
        d[0] = Int::one();
        let mut lambda: Vec<Vec<Int>> = (0..n).map(|i| vec![Int::zero(); i]).collect();
        for i in 0..n {
            for j in 0..=i {
                let mut u = gram[i][j].clone();
                for k in 0..j {
                    u = (&d[k + 1] * &u - &lambda[i][k] * &lambda[j][k]) / &d[k];
                }
                if j < i {
                    lambda[i][j] = u;
                } else {
                    if !u.is_positive() {
                        return Err(Error::DependentVectors);
                    }
                    d[i + 1] = u;
                }
            }
        }
        Ok(IntegralGso { scale, d, lambda })
    }

    pub fn rank(&self) -> usize {
        self.d.len() - 1
    }

    /// The same data for `factor · scale`.
    pub fn rescaled(&self, factor: &Int) -> Self {
        if factor.is_one() {
            return self.clone();
        }
        let f2 = factor * factor;
        let mut powers = Vec::with_capacity(self.d.len());
        let mut p = Int::one();
        for _ in 0..self.d.len() {
            powers.push(p.clone());
            p *= &f2;
        }
        let d = self.d.iter().zip(&powers).map(|(d, p)| d * p).collect();
        let lambda = self
            .lambda
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .map(|(j, l)| l * &powers[j + 1])
                    .collect()
            })
            .collect();
        IntegralGso {
            scale: &self.scale * factor,
            d,
            lambda,
        }
    }

    /// `‖b̃_i‖²` of the unscaled basis.
    pub fn sq_norm(&self, i: usize) -> Rational {
        let s2 = &self.scale * &self.scale;
        Rational::new(self.d[i + 1].clone(), &self.d[i] * s2)
    }

    pub fn mu(&self, i: usize, j: usize) -> Rational {
        Rational::new(self.lambda[i][j].clone(), self.d[j + 1].clone())
    }

    /// Projection data of a target whose scaled inner products with the scaled basis are
    /// `gram_row[j] = ⟨scale·t, scale·b_j⟩` (integers) and whose scaled squared norm is
    /// `norm_sq`.
    pub fn target_data(&self, gram_row: &[Int], norm_sq: &Int) -> TargetData {
        let n = self.rank();
        let mut tau = vec![Int::zero(); n];
        for j in 0..n {
            let mut u = gram_row[j].clone();
            for k in 0..j {
                u = (&self.d[k + 1] * &u - &tau[k] * &self.lambda[j][k]) / &self.d[k];
            }
            tau[j] = u;
        }
        let mut perp = Rational::from_integer(norm_sq.clone());
        for j in 0..n {
            perp -= Rational::new(&tau[j] * &tau[j], &self.d[j] * &self.d[j + 1]);
        }
        TargetData {
            tau,
            perp_sq_scaled: perp,
        }
    }

    /// Common multiple `P` of the level weights `d_j d_{j+1}`, and `P / (d_j d_{j+1})`.
    pub fn level_weights(&self) -> (Int, Vec<Int>) {
        let n = self.rank();
        let denoms: Vec<Int> = (0..n).map(|j| &self.d[j] * &self.d[j + 1]).collect();
        let p = denoms.iter().fold(Int::one(), |acc, w| acc.lcm(w));
        let weights = denoms.iter().map(|w| &p / w).collect();
        (p, weights)
    }
}

/// Fraction-free coordinates of a target against an [`IntegralGso`].
#[derive(Clone, Debug)]
pub struct TargetData {
    /// `τ_j = d_{j+1} ⟨t, b̃_j⟩ / ‖b̃_j‖²` in scaled units (an integer).
    pub tau: Vec<Int>,
    /// Squared norm of the component of `scale·t` orthogonal to the span.
    pub perp_sq_scaled: Rational,
}

impl LatticeBasis {
    /// Rational Gram–Schmidt data of this basis.
    pub fn gram_schmidt(&self) -> GramSchmidt {
        gram_schmidt(self.rows()).expect("a validated basis is independent")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn basis(rows: &[&[i64]]) -> LatticeBasis {
        LatticeBasis::from_int_rows(rows).unwrap()
    }

    #[test]
    fn identity_is_its_own_orthogonalisation() {
        let gs = basis(&[&[1, 0], &[0, 1]]).gram_schmidt();
        assert_eq!(gs.vectors[0], RationalVector::from_ints(&[1, 0]));
        assert_eq!(gs.vectors[1], RationalVector::from_ints(&[0, 1]));
        assert_eq!(gs.mu[1][0], rat(0, 1));
    }

    #[test]
    fn sheared_square_lattice() {
        let gs = basis(&[&[1, 0], &[1, 1]]).gram_schmidt();
        assert_eq!(gs.vectors[1], RationalVector::from_ints(&[0, 1]));
        assert_eq!(gs.mu[1][0], rat(1, 1));
    }

    #[test]
    fn hand_evaluated_coefficients() {
        // μ = ⟨(3,1),(2,0)⟩ / 4 = 3/2, b̃_2 = (3,1) - 3/2 (2,0) = (0,1)
        let b = basis(&[&[2, 0], &[3, 1]]);
        let gs = b.gram_schmidt();
        assert_eq!(gs.mu[1][0], rat(3, 2));
        assert_eq!(gs.vectors[1], RationalVector::from_ints(&[0, 1]));
        let rebuilt = gs.vectors[1].add_scaled(&gs.mu[1][0], &gs.vectors[0]);
        assert_eq!(&rebuilt, &b.rows()[1]);
    }

    #[test]
    fn dependent_rows_are_rejected() {
        let rows = vec![
            RationalVector::from_ints(&[1, 2]),
            RationalVector::from_ints(&[2, 4]),
        ];
        assert_eq!(gram_schmidt(&rows), Err(Error::DependentVectors));
        assert_eq!(LatticeBasis::new(rows).unwrap_err(), Error::DependentVectors);
    }

    #[test]
    fn integral_and_rational_forms_agree() {
        let b = LatticeBasis::new(vec![
            RationalVector(vec![rat(1, 2), rat(3, 1), rat(0, 1)]),
            RationalVector(vec![rat(2, 1), rat(-1, 3), rat(5, 1)]),
            RationalVector(vec![rat(1, 1), rat(1, 1), rat(7, 4)]),
        ])
        .unwrap();
        let gs = b.gram_schmidt();
        let ig = b.integral_gso();
        for i in 0..3 {
            assert_eq!(ig.sq_norm(i), gs.sq_norms[i]);
            for j in 0..i {
                assert_eq!(ig.mu(i, j), gs.mu[i][j]);
            }
        }
        let doubled = ig.rescaled(&Int::from(2));
        for i in 0..3 {
            assert_eq!(doubled.sq_norm(i), gs.sq_norms[i]);
            for j in 0..i {
                assert_eq!(doubled.mu(i, j), gs.mu[i][j]);
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn reconstruction_identity_holds(entries in proptest::collection::vec(-9i64..10, 9)) {
            let rows: Vec<RationalVector> =
                entries.chunks(3).map(RationalVector::from_ints).collect();
            if let Ok(gs) = gram_schmidt(&rows) {
                for (i, b) in rows.iter().enumerate() {
                    let mut rebuilt = gs.vectors[i].clone();
                    for j in 0..i {
                        rebuilt = rebuilt.add_scaled(&gs.mu[i][j], &gs.vectors[j]);
                    }
                    proptest::prop_assert_eq!(&rebuilt, b);
                }
            }
        }
    }
}
