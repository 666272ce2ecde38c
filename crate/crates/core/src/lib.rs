//! Exact algebra behind sphere fibrations `S^{n-1} → #^{k-1}(S^n × S^{2n-1}) → M_k`
//! over `(n-1)`-connected `2n`-dimensional Poincaré duality complexes.
//!
//! The crate is organised bottom-up:
//!
//! * [`ring`]: `Z[1/S]` scalars, integer matrices, Smith normal form, exact solves.
//! * [`tensorlie`]: the tensor algebra `T(V)` with its graded bracket and squaring,
//!   the quadratic quotient `T(V)/(ℒ)`, and Hilbert-series rank bookkeeping.
//! * [`forms`]: unimodular symmetric forms, primitive-vector searches, basis completion.
//! * [`homotopy`]: table-driven Whitehead-product rewriting to Hilton normal form.
//! * [`fibrations`]: the construction pipelines and their certificates.
//! * [`catalog`]: worked examples with known outcomes.
//! * [`problem`]: the problem-file schema shared with the command-line tool.

pub mod catalog;
pub mod error;
pub mod fibrations;
pub mod forms;
pub mod homotopy;
pub mod problem;
pub mod ring;
pub mod tensorlie;

pub use error::{Error, Result};
pub use ring::{IntMatrix, LocalScalar, PrimeSet};
