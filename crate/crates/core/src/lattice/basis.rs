use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{common_denominator, Int, Rational, RationalVector};

use super::gso::{IntegralGso, TargetData};

/// An ordered list of linearly independent rational vectors.
///
/// Stored as an integer matrix `s·B` with a common scale `s`. Construction
/// validates independence; the fraction-free Gram–Schmidt data computed
/// during validation is kept for the lifetime of the value.
#[derive(Clone)]
pub struct LatticeBasis {
    inner: Arc<Inner>,
}

struct Inner {
    /// `scale · B` is integral.
    scale: Int,
    int_rows: Vec<Vec<Int>>,
    gso: IntegralGso,
    rows: OnceLock<Vec<RationalVector>>,
}

fn int_dot(a: &[Int], b: &[Int]) -> Int {
    a.iter().zip(b).fold(Int::zero(), |acc, (x, y)| acc + x * y)
}

impl LatticeBasis {
    pub fn new(rows: Vec<RationalVector>) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyBasis)?;
        let dim = first.dim();
        if let Some(bad) = rows.iter().find(|r| r.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let scale = common_denominator(rows.iter().flat_map(|r| r.iter()));
        let int_rows = rows
            .iter()
            .map(|r| r.iter().map(|q| q.numer() * (&scale / q.denom())).collect())
            .collect();
        let basis = Self::from_scaled(scale, int_rows)?;
        basis.inner.rows.set(rows).expect("fresh cell");
        Ok(basis)
    }

    /// The basis `int_rows / scale`.
    pub fn from_scaled(scale: Int, int_rows: Vec<Vec<Int>>) -> Result<Self> {
        let first = int_rows.first().ok_or(Error::EmptyBasis)?;
        let dim = first.len();
        if let Some(bad) = int_rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if int_rows.len() > dim {
            return Err(Error::DependentVectors);
        }
        let gram: Vec<Vec<Int>> = int_rows
            .iter()
            .map(|a| int_rows.iter().map(|b| int_dot(a, b)).collect())
            .collect();
        let gso = IntegralGso::from_gram(&gram, scale.clone())?;
        Ok(Self::with_gso(scale, int_rows, gso))
    }

    /// Builds a basis whose Gram–Schmidt data is already known (e.g. from LLL).
    pub(crate) fn with_gso(scale: Int, int_rows: Vec<Vec<Int>>, gso: IntegralGso) -> Self {
        debug_assert_eq!(gso.scale, scale);
        LatticeBasis {
            inner: Arc::new(Inner {
                scale,
                int_rows,
                gso,
                rows: OnceLock::new(),
            }),
        }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::new(rows.iter().map(|r| RationalVector::from_ints(r)).collect())
    }

    pub fn from_big_int_rows(rows: &[Vec<Int>]) -> Result<Self> {
        Self::from_scaled(Int::one(), rows.to_vec())
    }

    /// The standard basis of `ℤⁿ`.
    pub fn identity(n: usize) -> Self {
        Self::new((0..n).map(|i| RationalVector::unit(n, i)).collect())
            .expect("identity is independent")
    }

    pub fn rows(&self) -> &[RationalVector] {
        self.inner.rows.get_or_init(|| {
            self.inner
                .int_rows
                .iter()
                .map(|r| self.unscale(r.clone()))
                .collect()
        })
    }

    fn unscale(&self, v: Vec<Int>) -> RationalVector {
        let s = &self.inner.scale;
        RationalVector(
            v.into_iter()
                .map(|x| if s.is_one() { Rational::from_integer(x) } else { Rational::new(x, s.clone()) })
                .collect(),
        )
    }

    pub fn row(&self, i: usize) -> &RationalVector {
        &self.rows()[i]
    }

    pub fn rank(&self) -> usize {
        self.inner.int_rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.inner.int_rows[0].len()
    }

    pub fn into_rows(self) -> Vec<RationalVector> {
        self.rows().to_vec()
    }

    pub fn integral_gso(&self) -> &IntegralGso {
        &self.inner.gso
    }

    /// `(s, s·B)` with `s·B` integral.
    pub fn integral_rows(&self) -> (&Int, &[Vec<Int>]) {
        (&self.inner.scale, &self.inner.int_rows)
    }

    /// `s · Σ c_i b_i`, an integer vector.
    pub fn scaled_combination(&self, coeffs: &[Int]) -> Vec<Int> {
        assert_eq!(coeffs.len(), self.rank());
        let mut out = vec![Int::zero(); self.ambient_dim()];
        for (c, b) in coeffs.iter().zip(&self.inner.int_rows) {
            if !c.is_zero() {
                for (o, x) in out.iter_mut().zip(b) {
                    *o += c * x;
                }
            }
        }
        out
    }

    /// `Σ c_i b_i`
    pub fn combination(&self, coeffs: &[Int]) -> RationalVector {
        self.unscale(self.scaled_combination(coeffs))
    }

    pub fn point(&self, coeffs: Vec<Int>) -> LatticePoint {
        LatticePoint {
            coordinates: self.combination(&coeffs),
            coefficients: coeffs,
        }
    }

    /// Rows `U·B` for an integer matrix `U`.
    pub fn transformed(&self, u: &[Vec<Int>]) -> Result<Self> {
        Self::from_scaled(
            self.inner.scale.clone(),
            u.iter().map(|row| self.scaled_combination(row)).collect(),
        )
    }

    /// The basis with row `i` removed.
    pub fn without(&self, i: usize) -> Result<Self> {
        let rows = self
            .inner
            .int_rows
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, r)| r.clone())
            .collect();
        Self::from_scaled(self.inner.scale.clone(), rows)
    }

    pub fn scaled(&self, c: &Rational) -> Result<Self> {
        Self::new(self.rows().iter().map(|r| r.scale(c)).collect())
    }

    /// Integral form of a target: GSO data sharing one scale with the target.
    pub fn target_data(&self, target: &RationalVector) -> Result<(IntegralGso, TargetData)> {
        if target.dim() != self.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim(),
                found: target.dim(),
            });
        }
        let base = &self.inner.scale;
        let scale = base.lcm(&target.denominator_lcm());
        let factor = &scale / base;
        let gso = self.inner.gso.rescaled(&factor);
        let t_int: Vec<Int> = target
            .iter()
            .map(|q| q.numer() * (&scale / q.denom()))
            .collect();
        let gram_row: Vec<Int> = self
            .inner
            .int_rows
            .iter()
            .map(|r| int_dot(&t_int, r) * &factor)
            .collect();
        let norm = int_dot(&t_int, &t_int);
        let data = gso.target_data(&gram_row, &norm);
        Ok((gso, data))
    }

    /// Integer coefficients of `v` in this basis, or `None` when `v` is not a lattice member.
    pub fn coefficients_of(&self, v: &RationalVector) -> Option<Vec<Int>> {
        if v.dim() != self.ambient_dim() {
            return None;
        }
        // lattice points have denominators dividing the basis scale
        if !self.inner.scale.is_multiple_of(&v.denominator_lcm()) {
            return None;
        }
        let (gso, data) = self.target_data(v).ok()?;
        if !data.perp_sq_scaled.is_zero() {
            return None;
        }
        let n = self.rank();
        let mut c = vec![Int::zero(); n];
        for j in (0..n).rev() {
            let mut num = data.tau[j].clone();
            for i in j + 1..n {
                num -= &gso.lambda[i][j] * &c[i];
            }
            let (q, r) = num.div_rem(&gso.d[j + 1]);
            if !r.is_zero() {
                return None;
            }
            c[j] = q;
        }
        Some(c)
    }

    pub fn contains(&self, v: &RationalVector) -> bool {
        self.coefficients_of(v).is_some()
    }

    /// `det(BBᵀ)`, the squared covolume.
    pub fn gram_determinant(&self) -> Rational {
        let gso = &self.inner.gso;
        let n = self.rank() as u32;
        let s2 = &gso.scale * &gso.scale;
        Rational::new(gso.d[self.rank()].clone(), num_traits::pow(s2, n as usize))
    }

    /// Whether both bases generate the same lattice.
    pub fn same_lattice(&self, other: &LatticeBasis) -> bool {
        self.rank() == other.rank()
            && other.rows().iter().all(|r| self.contains(r))
            && self.rows().iter().all(|r| other.contains(r))
    }
}

impl PartialEq for LatticeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.rows() == other.rows()
    }
}

impl Eq for LatticeBasis {}

impl Hash for LatticeBasis {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rows().hash(state);
    }
}

impl fmt::Debug for LatticeBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows().iter().map(|r| r.to_string())).finish()
    }
}

/// A lattice vector together with its integer coefficients in some basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticePoint {
    pub coordinates: RationalVector,
    pub coefficients: Vec<Int>,
}

impl LatticePoint {
    pub fn norm_sq(&self) -> Rational {
        self.coordinates.norm_sq()
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    /// Re-expresses the point in `basis`, failing when it is not a member.
    pub fn relative_to(&self, basis: &LatticeBasis) -> Result<LatticePoint> {
        let coefficients = basis
            .coefficients_of(&self.coordinates)
            .ok_or(Error::NotMember)?;
        Ok(LatticePoint {
            coordinates: self.coordinates.clone(),
            coefficients,
        })
    }

    /// `coordinates == basis · coefficients`
    pub fn is_consistent_with(&self, basis: &LatticeBasis) -> bool {
        self.coefficients.len() == basis.rank()
            && basis.combination(&self.coefficients) == self.coordinates
    }

    pub fn negated(&self) -> LatticePoint {
        LatticePoint {
            coordinates: -&self.coordinates,
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        }
    }
}

/// Sign-normalises a coefficient vector so its first non-zero entry is positive.
pub fn canonical_sign(coeffs: &mut [Int]) {
    if let Some(first) = coeffs.iter().find(|c| !c.is_zero()) {
        if first < &Int::zero() {
            for c in coeffs.iter_mut() {
                *c = -&*c;
            }
        }
    }
}

pub(crate) fn unit_matrix(n: usize) -> Vec<Vec<Int>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn rejects_malformed_input() {
        assert_eq!(LatticeBasis::new(vec![]).unwrap_err(), Error::EmptyBasis);
        let err = LatticeBasis::new(vec![
            RationalVector::from_ints(&[1, 0]),
            RationalVector::from_ints(&[1, 0, 0]),
        ])
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
        assert_eq!(
            LatticeBasis::from_int_rows(&[&[1], &[2]]).unwrap_err(),
            Error::DependentVectors
        );
    }

    #[test]
    fn membership_and_coefficients() {
        let b = LatticeBasis::from_int_rows(&[&[2, 0], &[1, 2]]).unwrap();
        assert_eq!(
            b.coefficients_of(&RationalVector::from_ints(&[3, 2])),
            Some(vec![int(1), int(1)])
        );
        assert_eq!(b.coefficients_of(&RationalVector::from_ints(&[1, 0])), None);
        assert_eq!(
            b.coefficients_of(&RationalVector(vec![rat(1, 2), rat(0, 1)])),
            None
        );
        // rank-deficient span: (0,0,1) is outside span{e1,e2}
        let e = LatticeBasis::from_int_rows(&[&[1, 0, 0], &[0, 1, 0]]).unwrap();
        assert_eq!(e.coefficients_of(&RationalVector::from_ints(&[0, 0, 1])), None);
        assert_eq!(
            e.coefficients_of(&RationalVector::from_ints(&[4, -3, 0])),
            Some(vec![int(4), int(-3)])
        );
    }

    #[test]
    fn rational_basis_membership() {
        let b = LatticeBasis::new(vec![
            RationalVector(vec![rat(1, 2), rat(0, 1)]),
            RationalVector(vec![rat(1, 3), rat(1, 3)]),
        ])
        .unwrap();
        let v = b.combination(&[int(-3), int(5)]);
        assert_eq!(b.coefficients_of(&v), Some(vec![int(-3), int(5)]));
        assert!(b.same_lattice(&b.transformed(&[vec![int(1), int(1)], vec![int(0), int(1)]]).unwrap()));
        assert!(!b.same_lattice(&b.transformed(&[vec![int(2), int(0)], vec![int(0), int(1)]]).unwrap()));
    }

    #[test]
    fn gram_determinant_of_diagonal() {
        let b = LatticeBasis::from_int_rows(&[&[2, 0], &[0, 3]]).unwrap();
        assert_eq!(b.gram_determinant(), rat(36, 1));
    }
}
