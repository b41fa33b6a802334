//! Primitivity, unimodular completion and Hermite normal form.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{gcd_all, Int, RationalVector};

use super::{unit_matrix, LatticeBasis};

/// An integer matrix with determinant ±1 whose first row is `v`.
///
/// `v` must have coprime entries.
pub fn complete_to_unimodular(v: &[Int]) -> Result<Vec<Vec<Int>>> {
    let n = v.len();
    if v.iter().all(Zero::is_zero) {
        return Err(Error::ZeroVector);
    }
    if !gcd_all(v).is_one() {
        return Err(Error::InvalidParameter(
            "coefficient vector is not primitive".into(),
        ));
    }
    // Invariant: w · m = v. Column operations on w are mirrored by inverse row
    // operations on m until w = e_1.
    let mut w = v.to_vec();
    let mut m = unit_matrix(n);
    loop {
        let pivot = (0..n)
            .filter(|&i| !w[i].is_zero())
            .min_by(|&a, &b| w[a].abs().cmp(&w[b].abs()))
            .expect("w stays nonzero");
        let mut done = true;
        for i in 0..n {
            if i == pivot || w[i].is_zero() {
                continue;
            }
            let q = w[i].div_floor(&w[pivot]);
            let t = &q * &w[pivot];
            w[i] -= t;
            // w_i -= q w_pivot  <=>  row_pivot += q row_i
            let row_i = m[i].clone();
            for (a, b) in m[pivot].iter_mut().zip(&row_i) {
                *a += &q * b;
            }
            if !w[i].is_zero() {
                done = false;
            }
        }
        if done {
            w.swap(0, pivot);
            m.swap(0, pivot);
            if w[0].is_negative() {
                w[0] = -&w[0];
                for a in m[0].iter_mut() {
                    *a = -&*a;
                }
            }
            debug_assert!(w[0].is_one());
            return Ok(m);
        }
    }
}

/// Whether the nonzero lattice point `v` is not an integer multiple `k·y`, `k ≥ 2`, of a lattice point.
pub fn is_primitive(basis: &LatticeBasis, v: &RationalVector) -> Result<bool> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let c = basis.coefficients_of(v).ok_or(Error::NotMember)?;
    Ok(gcd_all(&c).is_one())
}

/// A basis of the same lattice whose first vector is `v` divided by the gcd of its coefficients.
///
/// Returns the new basis and the unimodular `M` with `new = M · basis`.
pub fn extend_to_basis(
    basis: &LatticeBasis,
    v: &RationalVector,
) -> Result<(LatticeBasis, Vec<Vec<Int>>)> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    let c = basis.coefficients_of(v).ok_or(Error::NotMember)?;
    let g = gcd_all(&c);
    let primitive: Vec<Int> = c.iter().map(|x| x / &g).collect();
    let m = complete_to_unimodular(&primitive)?;
    Ok((basis.transformed(&m)?, m))
}

/// Row-style Hermite normal form of the integer row span of `rows`: echelon form with
/// positive pivots and entries above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(rows: &[Vec<Int>]) -> Vec<Vec<Int>> {
    let mut a: Vec<Vec<Int>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        // gcd-eliminate column c below row r
        loop {
            let pivot = (r..a.len())
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&x, &y| a[x][c].abs().cmp(&a[y][c].abs()));
            let Some(p) = pivot else { break };
            a.swap(r, p);
            let mut clean = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let q = a[i][c].div_floor(&a[r][c]);
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
                if !a[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if r >= a.len() || a[r][c].is_zero() {
            continue;
        }
        if a[r][c].is_negative() {
            for x in a[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = a[i][c].div_floor(&a[r][c]);
            if !q.is_zero() {
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    a.truncate(r);
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::is_unimodular;
    use crate::rational::int;

    fn ints(v: &[i64]) -> Vec<Int> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn primitivity() {
        let z2 = LatticeBasis::identity(2);
        assert!(is_primitive(&z2, &RationalVector::from_ints(&[1, 0])).unwrap());
        assert!(!is_primitive(&z2, &RationalVector::from_ints(&[2, 0])).unwrap());
        assert!(is_primitive(&z2, &RationalVector::from_ints(&[2, 3])).unwrap());
        assert_eq!(
            is_primitive(&z2, &RationalVector::zeros(2)),
            Err(Error::ZeroVector)
        );
        let even = LatticeBasis::from_int_rows(&[&[2, 0], &[0, 2]]).unwrap();
        assert_eq!(
            is_primitive(&even, &RationalVector::from_ints(&[1, 0])),
            Err(Error::NotMember)
        );
    }

    #[test]
    fn extension_puts_vector_first() {
        let z2 = LatticeBasis::identity(2);
        let (b, m) = extend_to_basis(&z2, &RationalVector::from_ints(&[0, 1])).unwrap();
        assert_eq!(b.row(0), &RationalVector::from_ints(&[0, 1]));
        assert!(is_unimodular(&m));

        let (b, m) = extend_to_basis(&z2, &RationalVector::from_ints(&[2, 4])).unwrap();
        assert_eq!(b.row(0), &RationalVector::from_ints(&[1, 2]));
        assert!(is_unimodular(&m));

        let z3 = LatticeBasis::identity(3);
        let (b, m) = extend_to_basis(&z3, &RationalVector::from_ints(&[1, 1, 1])).unwrap();
        assert_eq!(b.row(0), &RationalVector::from_ints(&[1, 1, 1]));
        assert!(is_unimodular(&m));
        assert!(b.same_lattice(&z3));
    }

    #[test]
    fn hnf_of_known_lattice() {
        let h = hermite_normal_form(&[ints(&[2, 4]), ints(&[3, 1]), ints(&[6, 12])]);
        // lattice {(x,y): ...} generated by (2,4),(3,1): det = -10
        assert_eq!(h.len(), 2);
        assert_eq!(h[1][0], int(0));
        assert_eq!(&h[0][0] * &h[1][1], int(10));
        assert_eq!(h, hermite_normal_form(&[ints(&[3, 1]), ints(&[2, 4])]));
    }

    proptest::proptest! {
        #[test]
        fn completion_is_unimodular(v in proptest::collection::vec(-40i64..40, 1..6)) {
            let v = ints(&v);
            if v.iter().all(Zero::is_zero) {
                return Ok(());
            }
            let g = gcd_all(&v);
            let p: Vec<Int> = v.iter().map(|x| x / &g).collect();
            let m = complete_to_unimodular(&p).unwrap();
            proptest::prop_assert_eq!(&m[0], &p);
            proptest::prop_assert!(is_unimodular(&m));
        }
    }
}
