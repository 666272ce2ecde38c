use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{BasisChange, SymForm};
use crate::homotopy::{
    attaching_data, attaching_expr, torsion_generator, vector_expr, Expr, HiltonVector, Normalizer, SphereTable,
    Strategy, Stratum,
};

/// The stable stem `π^s_{n−1}` with 2 inverted, as invariant factors
/// `a_1 | a_2 | … | a_r`, all odd and greater than one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StableModel {
    pub factors: Vec<u64>,
}

impl StableModel {
    pub fn new(factors: Vec<u64>) -> Result<Self> {
        for (i, &a) in factors.iter().enumerate() {
            if a < 3 || a % 2 == 0 {
                return Err(Error::Precondition(format!(
                    "invariant factor {a} must be odd and at least 3 (2 is inverted)"
                )));
            }
            if i > 0 && a % factors[i - 1] != 0 {
                return Err(Error::Precondition(format!("{} does not divide {a}", factors[i - 1])));
            }
        }
        Ok(StableModel { factors })
    }

    /// Number of cyclic summands.
    pub fn r(&self) -> usize {
        self.factors.len()
    }

    /// Reduces one class's coordinates into `[0, a_t)`.
    pub fn reduce(&self, x: &[BigInt]) -> Vec<BigInt> {
        x.iter().zip(&self.factors).map(|(c, &a)| c.mod_floor(&BigInt::from(a))).collect()
    }
}

/// Data of `L(M_k) = Σ_{i<j} g_ij[α_i,α_j] + Σ g_ii φ_i + torsion`.
///
/// `torsion[i]` is the coefficient of `α_i∘ψ` for the torsion generator `ψ`
/// of a table (`ν'` at `n = 4`, `σ'` at `n = 8`). `stable[i]` holds the
/// coordinates of `Σω_i` in a [`StableModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachingMap {
    pub n: u32,
    pub g: SymForm,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "crate::ring::decimal::vec")]
    pub torsion: Vec<BigInt>,
    #[serde(default, skip_serializing_if = "Vec::is_empty", with = "crate::ring::decimal::vec2")]
    pub stable: Vec<Vec<BigInt>>,
}

impl AttachingMap {
    pub fn new(n: u32, g: SymForm) -> Result<Self> {
        let m = AttachingMap { n, g, torsion: Vec::new(), stable: Vec::new() };
        m.check()?;
        Ok(m)
    }

    pub fn with_torsion(mut self, torsion: Vec<BigInt>) -> Result<Self> {
        self.torsion = torsion;
        self.check()?;
        Ok(self)
    }

    pub fn with_stable(mut self, stable: Vec<Vec<BigInt>>) -> Result<Self> {
        self.stable = stable;
        self.check()?;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.g.rank()
    }

    fn check(&self) -> Result<()> {
        if self.n < 2 || !self.n.is_multiple_of(2) {
            return Err(Error::Precondition(format!("n = {} must be even and positive", self.n)));
        }
        let k = self.k();
        if k < 2 {
            return Err(Error::RankTooSmall { rank: k, min: 2 });
        }
        self.g.require_unimodular()?;
        if !self.torsion.is_empty() && self.torsion.len() != k {
            return Err(Error::Dimension(format!("{} torsion coefficients for rank {k}", self.torsion.len())));
        }
        if !self.stable.is_empty() && self.stable.len() != k {
            return Err(Error::Dimension(format!("{} stable coordinates for rank {k}", self.stable.len())));
        }
        Ok(())
    }

    /// Torsion coefficients, zero-filled.
    pub fn torsion_or_zero(&self) -> Vec<BigInt> {
        if self.torsion.is_empty() {
            vec![BigInt::zero(); self.k()]
        } else {
            self.torsion.clone()
        }
    }

    /// Reduces torsion coefficients modulo the order of the table's torsion class.
    pub fn reduced(&self, table: &SphereTable) -> Result<AttachingMap> {
        self.require_table(table)?;
        let mut out = self.clone();
        match torsion_generator(table) {
            Some(t) => {
                let o = BigInt::from(table.mid.orders[t]);
                out.torsion = self.torsion_or_zero().iter().map(|x| x.mod_floor(&o)).collect();
            }
            None if self.torsion.iter().any(|x| !x.is_zero()) => {
                return Err(Error::Precondition(format!("table {} has no torsion class", table.name)));
            }
            None => out.torsion.clear(),
        }
        Ok(out)
    }

    fn require_table(&self, table: &SphereTable) -> Result<()> {
        if table.n != self.n {
            return Err(Error::Precondition(format!("table {} is for n = {}, not {}", table.name, table.n, self.n)));
        }
        Ok(())
    }

    pub fn expr(&self, table: &SphereTable) -> Result<Expr> {
        self.require_table(table)?;
        attaching_expr(table, &self.g, &self.torsion_or_zero())
    }

    pub fn normalized(&self, table: &SphereTable) -> Result<HiltonVector> {
        let e = self.expr(table)?;
        Normalizer::new(table, self.k(), Strategy::First).normalize_in(&e, Stratum::Mid)
    }

    /// Rewrites `L` after the substitution `α_i = Σ_j S_ij α'_j`, using the
    /// table's composition rules (torsion coefficients change nonlinearly).
    pub fn substitute_table(&self, table: &SphereTable, s: &BasisChange) -> Result<AttachingMap> {
        let k = self.k();
        if s.dim() != k {
            return Err(Error::Dimension("basis change of the wrong size".into()));
        }
        let images: Vec<Expr> = (0..k).map(|i| Expr::linear(s.matrix().row(i))).collect();
        let e = vector_expr(table, &self.normalized(table)?).substitute(&images)?;
        let v = Normalizer::new(table, k, Strategy::First).normalize_in(&e, Stratum::Mid)?;
        let (g, l) = attaching_data(table, &v)?;
        if g != self.g.transform(s) {
            return Err(Error::Verification("form after substitution disagrees with Sᵗ g S".into()));
        }
        let torsion = if torsion_generator(table).is_some() { l } else { Vec::new() };
        Ok(AttachingMap { n: self.n, g, torsion, stable: Vec::new() })
    }

    /// The same substitution with stable coordinates transforming linearly,
    /// `x' = Sᵗ x`.
    pub fn substitute_linear(&self, model: &StableModel, s: &BasisChange) -> Result<AttachingMap> {
        let k = self.k();
        if s.dim() != k {
            return Err(Error::Dimension("basis change of the wrong size".into()));
        }
        let x = self.stable_or_zero(model)?;
        let m = s.matrix();
        let stable = (0..k)
            .map(|j| {
                let col: Vec<BigInt> = (0..model.r())
                    .map(|t| (0..k).map(|i| &m[(i, j)] * &x[i][t]).sum())
                    .collect();
                model.reduce(&col)
            })
            .collect();
        Ok(AttachingMap { n: self.n, g: self.g.transform(s), torsion: Vec::new(), stable })
    }

    /// Stable coordinates checked against the model, zero-filled.
    pub fn stable_or_zero(&self, model: &StableModel) -> Result<Vec<Vec<BigInt>>> {
        if self.stable.is_empty() {
            return Ok(vec![vec![BigInt::zero(); model.r()]; self.k()]);
        }
        if self.stable.iter().any(|x| x.len() != model.r()) {
            return Err(Error::Dimension(format!("stable coordinates must have {} entries", model.r())));
        }
        Ok(self.stable.iter().map(|x| model.reduce(x)).collect())
    }
}

/// `T = (S⁻¹)ᵗ`: column `j` expresses the new class `α'_j` in the old basis.
pub fn new_classes(s: &BasisChange) -> BasisChange {
    BasisChange::new(s.inverse().matrix().transpose()).expect("transpose of a unimodular matrix")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn negating_the_last_class() {
        // l_k ↦ −l_k + g_kk
        let t = SphereTable::builtin("n4", None).unwrap();
        let g = SymForm::from_i64(&[&[1, 2], &[2, 3]]).unwrap();
        let m = AttachingMap::new(4, g).unwrap().with_torsion(big(&[5, 4])).unwrap();
        let s = BasisChange::new(crate::ring::IntMatrix::from_i64(&[&[1, 0], &[0, -1]])).unwrap();
        let m2 = m.substitute_table(&t, &s).unwrap();
        assert_eq!(m2.torsion[1], BigInt::from(-4 + 3).mod_floor(&BigInt::from(12)));
    }

    #[test]
    fn shear_moves() {
        // α_{k−1} ↦ α_{k−1} − c α_k, as substitution α_{k−1} = α'_{k−1} + c α'_k
        let t = SphereTable::builtin("n4", None).unwrap();
        let g = SymForm::from_i64(&[&[3, 2], &[2, 1]]).unwrap();
        let l = big(&[7, 2]);
        let m = AttachingMap::new(4, g.clone()).unwrap().with_torsion(l.clone()).unwrap();
        for (c, want) in [
            (1, &l[1] + &l[0] + g.entry(1, 0)),
            (2, &l[1] + 2 * &l[0] + g.entry(0, 0) + 2 * g.entry(1, 0)),
            (6, &l[1] + 6 * &l[0] + 15 * g.entry(0, 0) + 6 * g.entry(1, 0)),
        ] {
            let s = BasisChange::new(crate::ring::IntMatrix::from_i64(&[&[1, c], &[0, 1]])).unwrap();
            let m2 = m.substitute_table(&t, &s).unwrap();
            assert_eq!(m2.torsion[1], want.mod_floor(&BigInt::from(12)), "c = {c}");
        }
    }

    #[test]
    fn linear_stable_coordinates() {
        let model = StableModel::new(vec![5]).unwrap();
        let g = SymForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        let m = AttachingMap::new(10, g).unwrap().with_stable(vec![big(&[2]), big(&[4])]).unwrap();
        let s = BasisChange::new(crate::ring::IntMatrix::from_i64(&[&[1, -2], &[0, 1]])).unwrap();
        let m2 = m.substitute_linear(&model, &s).unwrap();
        assert_eq!(m2.stable, vec![big(&[2]), big(&[0])]);
        assert!(StableModel::new(vec![4]).is_err());
        assert!(StableModel::new(vec![3, 5]).is_err());
    }
}
