//! Exact computation with affine spaces of alternating matrices of bounded
//! or constant rank: explicit families, rank and spectrum checks, and a
//! certified reduction of large constant-rank spaces to a canonical block
//! form.

pub mod analyze;
pub mod error;
pub mod exactfield;
pub mod families;
pub mod linalg;
pub mod reduce;
pub mod spaces;
pub mod symplectic;

pub use analyze::{rank_profile, RankProfile, RankMethod};
pub use error::{Error, Result};
pub use exactfield::{Cardinality, Field, FieldCtx, Fp, Rationals};
pub use linalg::{AlternatingMatrix, Matrix, Span};
pub use reduce::{reduce, ReductionCertificate};
pub use spaces::AffineMatrixSpace;
