//! Dense exact linear algebra: elimination, kernels, spans, Pfaffians and
//! eigenvalue scans.

mod eigen;
mod json;
mod matrix;
mod pfaffian;
mod span;

pub use eigen::{charpoly_rational, eigenvalues_in_field, nonzero_eigenvalues};
pub use json::{decode_vector, encode_vector, MatrixJson};
pub use matrix::{alternating_unit, rank_in_place, standard_vector, unit, Matrix};
pub use pfaffian::{pfaffian, pfaffian_by_expansion, AlternatingMatrix};
pub use span::Span;
