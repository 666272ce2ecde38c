//! Integer symmetric bilinear forms: primitive-vector searches, basis
//! completion, diagonalization over `F_p`, and characteristic bases.
//!
//! Forms act as `⟨x,y⟩ = xᵗ g y` on column vectors; a basis change `P`
//! sends `g` to `Pᵗ g P`.

mod basis;
mod modp;
mod random;
mod search;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ring::IntMatrix;

pub use basis::{characteristic_basis, characteristic_vector, extend_to_basis, is_primitive};
pub use modp::{diagonalize_mod_p, solve_mod_p};
pub use random::{random_form, random_unimodular, SeedForm};
pub use search::{find_primitive_divisible, search_primitive, PrimitiveVector, SearchPath};

/// A symmetric integer matrix, read as a bilinear form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct SymForm {
    matrix: IntMatrix,
}

impl SymForm {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(SymForm { matrix })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(IntMatrix::from_i64(rows))
    }

    pub fn identity(k: usize) -> Self {
        SymForm { matrix: IntMatrix::identity(k) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.matrix[(i, j)]
    }

    pub fn is_unimodular(&self) -> bool {
        self.matrix.is_unimodular()
    }

    pub fn require_unimodular(&self) -> Result<()> {
        if self.is_unimodular() {
            Ok(())
        } else {
            Err(Error::NotInvertible)
        }
    }

    /// True when every diagonal entry is even.
    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| num_integer::Integer::is_even(&self.matrix[(i, i)]))
    }

    pub fn inner(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        self.matrix.bilinear(x, y)
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        self.inner(x, x)
    }

    /// `Pᵗ g P`.
    pub fn transform(&self, p: &BasisChange) -> SymForm {
        SymForm { matrix: self.matrix.congruence(p.matrix()) }
    }

    /// The inverse matrix, as a form. Requires unimodularity.
    pub fn inverse(&self) -> Result<SymForm> {
        Ok(SymForm { matrix: self.matrix.unimodular_inverse()? })
    }
}

impl TryFrom<IntMatrix> for SymForm {
    type Error = Error;
    fn try_from(m: IntMatrix) -> Result<Self> {
        SymForm::new(m)
    }
}

impl From<SymForm> for IntMatrix {
    fn from(f: SymForm) -> Self {
        f.matrix
    }
}

/// A unimodular integer matrix; its columns are the new basis vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "IntMatrix", into = "IntMatrix")]
pub struct BasisChange {
    matrix: IntMatrix,
}

impl BasisChange {
    pub fn new(matrix: IntMatrix) -> Result<Self> {
        if !matrix.is_unimodular() {
            return Err(Error::NotInvertible);
        }
        Ok(BasisChange { matrix })
    }

    pub fn identity(k: usize) -> Self {
        BasisChange { matrix: IntMatrix::identity(k) }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `self` followed by `next`: the matrix product `self · next`.
    pub fn then(&self, next: &BasisChange) -> BasisChange {
        BasisChange { matrix: &self.matrix * &next.matrix }
    }

    pub fn inverse(&self) -> BasisChange {
        BasisChange { matrix: self.matrix.unimodular_inverse().expect("unimodular by construction") }
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        self.matrix.column(j)
    }
}

impl TryFrom<IntMatrix> for BasisChange {
    type Error = Error;
    fn try_from(m: IntMatrix) -> Result<Self> {
        BasisChange::new(m)
    }
}

impl From<BasisChange> for IntMatrix {
    fn from(b: BasisChange) -> Self {
        b.matrix
    }
}
