//! The tensor algebra `T(V)` on graded generators, its graded bracket and
//! squaring, quadratic quotients `T(V)/(ℒ)`, and Hilbert-series rank bookkeeping.
//!
//! Lie elements are handled through their images in `T(V)`.

mod element;
mod relation;
mod series;

pub use element::{bracket, square, GradedBasis, TensorElement, Word};
pub use relation::{
    coefficient_columns, column_determinant, construct_w, ideal_membership, rank_oracle,
    w_identity_defect, w_span_is_basis, IdealWitness, QuadraticRelation,
};
pub use series::{
    lie_ranks_from_series, product_formula, quadratic_hilbert, verify_factorization,
    FactorizationReport, HilbertMode, PowerSeries,
};
