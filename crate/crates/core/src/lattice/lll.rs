//! LLL reduction with parameter 3/4, run entirely on the fraction-free
//! Gram–Schmidt data so every division is exact.

use num_integer::Integer;
use num_traits::{One, Signed};

use crate::rational::{rat, Int, Rational};

use super::{gram_schmidt, unit_matrix, IntegralGso, LatticeBasis};

/// `round(a / b)` for `b > 0`, halves rounded up.
fn round_div(a: &Int, b: &Int) -> Int {
    let num: Int = a * 2 + b;
    num.div_floor(&(b * 2))
}

struct State {
    d: Vec<Int>,
    lambda: Vec<Vec<Int>>,
    h: Vec<Vec<Int>>,
}

impl State {
    fn reduce(&mut self, k: usize, l: usize) {
        let twice = self.lambda[k][l].abs() * 2;
        if twice <= self.d[l + 1] {
            return;
        }
        let q = round_div(&self.lambda[k][l], &self.d[l + 1]);
        let (hk, hl) = pair_mut(&mut self.h, k, l);
        for (a, b) in hk.iter_mut().zip(hl.iter()) {
            *a -= &q * b;
        }
        self.lambda[k][l] -= &q * &self.d[l + 1];
        for i in 0..l {
            let t = &q * &self.lambda[l][i];
            self.lambda[k][i] -= t;
        }
    }

    fn lovasz_fails(&self, k: usize) -> bool {
        let lhs = &self.d[k + 1] * &self.d[k - 1] * 4;
        let l = &self.lambda[k][k - 1];
        let rhs = &self.d[k] * &self.d[k] * 3 - l * l * 4;
        lhs < rhs
    }

    fn swap(&mut self, k: usize) {
        let n = self.d.len() - 1;
        self.h.swap(k, k - 1);
        for j in 0..k - 1 {
            let (a, b) = pair_mut(&mut self.lambda, k, k - 1);
            std::mem::swap(&mut a[j], &mut b[j]);
        }
        let l = self.lambda[k][k - 1].clone();
        let b = (&self.d[k - 1] * &self.d[k + 1] + &l * &l) / &self.d[k];
        for i in k + 1..n {
            let t = self.lambda[i][k].clone();
            let new_ik = (&self.d[k + 1] * &self.lambda[i][k - 1] - &l * &t) / &self.d[k];
            let new_ik1 = (&b * &t + &l * &new_ik) / &self.d[k + 1];
            self.lambda[i][k] = new_ik;
            self.lambda[i][k - 1] = new_ik1;
        }
        self.d[k] = b;
    }
}

fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (lo, hi) = v.split_at_mut(j);
        (&mut lo[i], &mut hi[0])
    } else {
        let (lo, hi) = v.split_at_mut(i);
        (&mut hi[0], &mut lo[j])
    }
}

/// LLL-reduces `basis`, returning the reduced basis and the unimodular `U`
/// with `reduced = U · basis`.
pub fn lll_reduce_with_transform(basis: &LatticeBasis) -> (LatticeBasis, Vec<Vec<Int>>) {
    let gso = basis.integral_gso();
    let n = basis.rank();
    let mut st = State {
        d: gso.d.clone(),
        lambda: gso.lambda.clone(),
        h: unit_matrix(n),
    };
    let mut k = 1;
    while k < n {
        st.reduce(k, k - 1);
        if st.lovasz_fails(k) {
            st.swap(k);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                st.reduce(k, l);
            }
            k += 1;
        }
    }
    let rows = st.h.iter().map(|row| basis.scaled_combination(row)).collect();
    let reduced = LatticeBasis::with_gso(
        gso.scale.clone(),
        rows,
        IntegralGso {
            scale: gso.scale.clone(),
            d: st.d,
            lambda: st.lambda,
        },
    );
    (reduced, st.h)
}

pub fn lll_reduce(basis: &LatticeBasis) -> LatticeBasis {
    lll_reduce_with_transform(basis).0
}

/// Checks size reduction and the 3/4 exchange condition in rational arithmetic.
pub fn is_lll_reduced(basis: &LatticeBasis) -> bool {
    let gs = match gram_schmidt(basis.rows()) {
        Ok(gs) => gs,
        Err(_) => return false,
    };
    let half = rat(1, 2);
    let three_quarters = rat(3, 4);
    for i in 0..gs.rank() {
        if gs.mu[i].iter().any(|m| m.abs() > half) {
            return false;
        }
        if i > 0 {
            let m = &gs.mu[i][i - 1];
            let rhs: Rational = (&three_quarters - m * m) * &gs.sq_norms[i - 1];
            if gs.sq_norms[i] < rhs {
                return false;
            }
        }
    }
    true
}

/// Whether `u` is square, integral and has determinant ±1.
pub fn is_unimodular(u: &[Vec<Int>]) -> bool {
    let n = u.len();
    u.iter().all(|r| r.len() == n) && super::linalg::det_int(u).abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::RationalVector;

    #[test]
    fn identity_is_unchanged() {
        let b = LatticeBasis::identity(4);
        let r = lll_reduce(&b);
        assert_eq!(r, b);
        assert!(is_lll_reduced(&r));
    }

    #[test]
    fn skewed_basis_of_z2() {
        let b = LatticeBasis::from_int_rows(&[&[1, 0], &[10, 1]]).unwrap();
        assert!(!is_lll_reduced(&b));
        let (r, u) = lll_reduce_with_transform(&b);
        assert!(is_lll_reduced(&r));
        assert!(is_unimodular(&u));
        assert_eq!(r.row(0).norm_sq(), rat(1, 1));
        assert!(r.same_lattice(&b));
        assert_eq!(r.integral_gso(), LatticeBasis::new(r.rows().to_vec()).unwrap().integral_gso());
    }

    #[test]
    fn rational_entries() {
        let b = LatticeBasis::new(vec![
            RationalVector(vec![rat(7, 2), rat(1, 3), rat(5, 1)]),
            RationalVector(vec![rat(3, 1), rat(2, 3), rat(4, 1)]),
            RationalVector(vec![rat(1, 2), rat(-1, 1), rat(9, 5)]),
        ])
        .unwrap();
        let (r, u) = lll_reduce_with_transform(&b);
        assert!(is_lll_reduced(&r));
        assert!(is_unimodular(&u));
        assert!(r.same_lattice(&b));
        assert_eq!(r.integral_gso(), LatticeBasis::new(r.rows().to_vec()).unwrap().integral_gso());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]
        #[test]
        fn output_is_reduced_and_equivalent(entries in proptest::collection::vec(-50i64..50, 16)) {
            let rows: Vec<RationalVector> = entries.chunks(4).map(RationalVector::from_ints).collect();
            if let Ok(b) = LatticeBasis::new(rows) {
                let (r, u) = lll_reduce_with_transform(&b);
                proptest::prop_assert!(is_lll_reduced(&r));
                proptest::prop_assert!(is_unimodular(&u));
                proptest::prop_assert_eq!(b.transformed(&u).unwrap(), r.clone());
                let fresh = LatticeBasis::new(r.rows().to_vec()).unwrap();
                proptest::prop_assert_eq!(r.integral_gso(), fresh.integral_gso());
            }
        }
    }
}
