//! Exact arithmetic over localized integers `Z[1/S]` and integer matrix
//! normal forms.

pub mod decimal;
mod matrix;
mod scalar;
mod snf;
mod solve;

pub use matrix::IntMatrix;
pub use scalar::{LocalScalar, PrimeSet};
pub use snf::{smith_normal_form, Snf};
pub use solve::{integer_kernel, solve_linear, ScalarMatrix};
