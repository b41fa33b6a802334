use num_traits::{Signed, ToPrimitive, Zero};
use proptest::prelude::*;

use s2d_core::lattice::LatticeBasis;
use s2d_core::rational::{rat, Int, Rational, RationalVector};
use s2d_core::solvers::{
    babai_nearest_plane, count_primitive, cvp_exact, distance_sq, lambda1_sq, lambda2_sq, short_vectors, svp_exact,
    verify_point_count_bound, EnumerationBudget,
};

/// Per-coordinate box from `|a_i| = |⟨y, d_i⟩| ≤ ‖y‖·‖d_i‖` with `d_i` the dual basis.
fn coefficient_box(basis: &LatticeBasis, center: &RationalVector, radius_sq: &Rational) -> Vec<(i64, i64)> {
    let dual = basis.dual();
    dual.rows()
        .iter()
        .map(|d| {
            let c = d.dot(center).to_f64().unwrap();
            let r = (radius_sq * d.norm_sq()).to_f64().unwrap().sqrt();
            ((c - r).floor() as i64 - 1, (c + r).ceil() as i64 + 1)
        })
        .collect()
}

fn for_each_point(bounds: &[(i64, i64)], f: &mut impl FnMut(&[Int])) {
    let mut c: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        let big: Vec<Int> = c.iter().map(|&x| Int::from(x)).collect();
        f(&big);
        let mut k = 0;
        loop {
            if k == c.len() {
                return;
            }
            c[k] += 1;
            if c[k] > bounds[k].1 {
                c[k] = bounds[k].0;
                k += 1;
            } else {
                break;
            }
        }
    }
}

/// All nonzero norms `‖Σ c_i b_i − t‖²` within `radius_sq`, sorted.
fn brute_norms(basis: &LatticeBasis, t: &RationalVector, radius_sq: &Rational, skip_zero: bool) -> Vec<(Rational, Vec<Int>)> {
    let mut out = Vec::new();
    for_each_point(&coefficient_box(basis, t, radius_sq), &mut |c| {
        if skip_zero && c.iter().all(Zero::is_zero) {
            return;
        }
        let v = (&basis.combination(c) - t).norm_sq();
        if &v <= radius_sq {
            out.push((v, c.to_vec()));
        }
    });
    out.sort();
    out
}

fn parallel(a: &[Int], b: &[Int]) -> bool {
    (0..a.len()).all(|i| (0..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

fn small_basis(rank: usize) -> impl Strategy<Value = LatticeBasis> {
    prop::collection::vec(prop::collection::vec(-6i64..=6, rank), rank)
        .prop_filter_map("dependent rows", |rows| {
            let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
            LatticeBasis::from_int_rows(&refs).ok()
        })
}

fn small_target(dim: usize) -> impl Strategy<Value = RationalVector> {
    prop::collection::vec((-20i64..=20, 1i64..=5), dim)
        .prop_map(|v| RationalVector(v.into_iter().map(|(a, b)| rat(a, b)).collect()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lambda1_and_lambda2_match_enumeration(b in (2usize..=3).prop_flat_map(small_basis)) {
        let budget = EnumerationBudget::default();
        let r = b.rows().iter().map(RationalVector::norm_sq).max().unwrap();
        let zero = RationalVector::zeros(b.ambient_dim());
        let all = brute_norms(&b, &zero, &r, true);
        let l1 = lambda1_sq(&b, &budget).unwrap();
        prop_assert_eq!(&l1, &all[0].0);
        let first = &all[0].1;
        let l2 = all.iter().find(|(_, c)| !parallel(c, first)).unwrap().0.clone();
        prop_assert_eq!(lambda2_sq(&b, &budget).unwrap(), l2);
        let s = svp_exact(&b, &budget).unwrap();
        prop_assert!(b.contains(&s.coordinates));
        prop_assert_eq!(s.coordinates.norm_sq(), l1);
    }

    #[test]
    fn closest_vector_matches_enumeration(
        (b, t) in (2usize..=3).prop_flat_map(|n| (small_basis(n), small_target(n)))
    ) {
        let budget = EnumerationBudget::default();
        let babai = babai_nearest_plane(&b, &t).unwrap();
        let best = brute_norms(&b, &t, &babai.dist_sq, false)[0].0.clone();
        prop_assert_eq!(distance_sq(&b, &t, &budget).unwrap(), best.clone());
        let y = cvp_exact(&b, &t, &budget).unwrap();
        prop_assert!(b.contains(&y.point.coordinates));
        prop_assert_eq!((&y.point.coordinates - &t).norm_sq(), best);
    }

    #[test]
    fn point_count_bound_holds(b in (2usize..=3).prop_flat_map(small_basis), r in 1i64..=3) {
        let check = verify_point_count_bound(&b, &rat(r, 1), &EnumerationBudget::default()).unwrap();
        prop_assert!(check.holds);
    }
}

#[test]
fn textbook_values() {
    let budget = EnumerationBudget::default();
    let b = LatticeBasis::from_int_rows(&[&[2, 0], &[1, 2]]).unwrap();
    assert_eq!(lambda1_sq(&b, &budget).unwrap(), rat(4, 1));
    let skew = LatticeBasis::new(vec![
        RationalVector::from_ints(&[1, 0]),
        RationalVector(vec![rat(1, 2), rat(10, 1)]),
    ])
    .unwrap();
    assert_eq!(lambda1_sq(&skew, &budget).unwrap(), rat(1, 1));
    assert!(lambda2_sq(&skew, &budget).unwrap() >= rat(1, 1));
    assert_eq!(lambda1_sq(&LatticeBasis::identity(5), &budget).unwrap(), rat(1, 1));
    let t = RationalVector(vec![rat(1, 2), rat(1, 2), rat(1, 2)]);
    assert_eq!(distance_sq(&LatticeBasis::identity(3), &t, &budget).unwrap(), rat(3, 4));
}

#[test]
fn primitive_counts_in_z2() {
    // ±e1, ±e2 at radius 1; the diagonals join at radius √2
    let budget = EnumerationBudget::default();
    let z2 = LatticeBasis::identity(2);
    assert_eq!(count_primitive(&z2, &rat(1, 1), &budget).unwrap().count, 2);
    assert_eq!(count_primitive(&z2, &rat(2, 1), &budget).unwrap().count, 4);
    // (2,0) is not primitive, so radius 2 adds nothing
    assert_eq!(count_primitive(&z2, &rat(4, 1), &budget).unwrap().count, 4);
}

#[test]
fn budget_is_enforced() {
    let b = LatticeBasis::identity(4);
    let tight = EnumerationBudget {
        max_nodes: 10,
        rank_cap: 12,
    };
    assert!(short_vectors(&b, &rat(9, 1), &tight).is_err());
    let capped = EnumerationBudget {
        max_nodes: 1_000,
        rank_cap: 3,
    };
    assert!(lambda1_sq(&b, &capped).is_err());
}

#[test]
fn negative_entries_do_not_confuse_the_box() {
    let b = LatticeBasis::from_int_rows(&[&[-7, 3], &[4, -9]]).unwrap();
    let t = RationalVector(vec![rat(-13, 3), rat(5, 2)]);
    let budget = EnumerationBudget::default();
    let d = distance_sq(&b, &t, &budget).unwrap();
    let babai = babai_nearest_plane(&b, &t).unwrap();
    assert!(d <= babai.dist_sq);
    assert!(!d.is_negative());
    assert_eq!(d, brute_norms(&b, &t, &babai.dist_sq, false)[0].0);
}
