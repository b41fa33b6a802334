use crate::rational::{Rational, RationalVector};

use super::{linalg, LatticeBasis};

/// The basis `B* = (BBᵀ)⁻¹B` of the dual lattice, with `⟨b*_i, b_j⟩ = δ_ij`.
pub fn dual_basis(basis: &LatticeBasis) -> LatticeBasis {
    let rows = basis.rows();
    let gram: Vec<Vec<Rational>> = rows
        .iter()
        .map(|a| rows.iter().map(|b| a.dot(b)).collect())
        .collect();
    let inv = linalg::invert(&gram).expect("a validated basis has an invertible Gram matrix");
    let dual = inv
        .iter()
        .map(|coeffs| {
            coeffs
                .iter()
                .zip(rows)
                .fold(RationalVector::zeros(basis.ambient_dim()), |acc, (c, b)| {
                    acc.add_scaled(c, b)
                })
        })
        .collect();
    LatticeBasis::new(dual).expect("the dual of a basis is a basis")
}

impl LatticeBasis {
    pub fn dual(&self) -> LatticeBasis {
        dual_basis(self)
    }
}
