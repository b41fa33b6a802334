//! Hyperplane localisation and orthogonal projection onto sub-spans.

use crate::rational::{ceil, floor, Int, Rational, RationalVector};

use super::{gram_schmidt, linalg, LatticeBasis};

/// All integers `i` with `⌊a − slack⌋ ≤ i ≤ ⌈a + slack⌉`, where `a = ⟨dual_first, target⟩`.
pub fn nearby_hyperplane_indices(
    dual_first: &RationalVector,
    target: &RationalVector,
    slack: &Rational,
) -> (Int, Int) {
    let a = dual_first.dot(target);
    (floor(&(&a - slack)), ceil(&(&a + slack)))
}

/// Orthogonal projection of `point` onto `span(sub_basis)`, in ambient coordinates.
pub fn project_onto_span(sub_basis: &LatticeBasis, point: &RationalVector) -> RationalVector {
    let gs = gram_schmidt(sub_basis.rows()).expect("validated basis");
    let mut out = RationalVector::zeros(point.dim());
    for (v, n) in gs.vectors.iter().zip(&gs.sq_norms) {
        out = out.add_scaled(&(point.dot(v) / n), v);
    }
    out
}

/// Real coefficients `x` with `project_onto_span(sub_basis, point) = Σ x_i b_i`.
pub fn span_coefficients(sub_basis: &LatticeBasis, point: &RationalVector) -> Vec<Rational> {
    let rows = sub_basis.rows();
    let gram: Vec<Vec<Rational>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| a.dot(b)).collect())
        .collect();
    let inv = linalg::invert(&gram).expect("validated basis");
    let rhs: Vec<Rational> = rows.iter().map(|b| b.dot(point)).collect();
    inv.iter()
        .map(|row| row.iter().zip(&rhs).map(|(a, b)| a * b).sum())
        .collect()
}
