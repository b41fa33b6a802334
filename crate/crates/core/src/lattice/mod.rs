//! Exact lattice kernel.

mod basis;
pub mod dual;
pub mod gso;
pub mod hyperplane;
pub mod linalg;
pub mod lll;
pub mod unimodular;

pub use basis::{canonical_sign, LatticeBasis, LatticePoint};
pub(crate) use basis::unit_matrix;
pub use dual::dual_basis;
pub use gso::{gram_schmidt, GramSchmidt, IntegralGso, TargetData};
pub use hyperplane::{nearby_hyperplane_indices, project_onto_span, span_coefficients};
pub use lll::{is_lll_reduced, is_unimodular, lll_reduce, lll_reduce_with_transform};
pub use unimodular::{complete_to_unimodular, extend_to_basis, hermite_normal_form, is_primitive};
