//! Whitehead products in `π_*(∨_k S^n)` for `n ∈ {2, 4, 8}`, in the range
//! `π_{2n−1}` and `π_{3n−2}`, rewritten to Hilton–Milnor normal form from
//! versioned data tables.

mod confluence;
mod expr;
mod hilton;
mod kernel;
mod normalize;
mod table;

pub use confluence::{check_confluence, random_expr, ConfluenceReport};
pub use expr::Expr;
pub use kernel::{
    attaching_data, attaching_expr, hopf_generator, rho, torsion_generator, vector_expr, KernelSubgroup,
};
pub(crate) use kernel::relation_matrix;
pub use hilton::{HiltonBasis, HiltonVector, Slot, Stratum};
pub use normalize::{check_table_identities, normalize, Normal, Normalizer, Strategy};
pub use table::{
    embedded_source, generic_hypotheses, pinned_hash, read_pinned, sha256_hex, AbGroup, Hypothesis, SphereTable,
    TableIdentity, PINNED,
};
