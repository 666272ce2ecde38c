//! The problem-file schema: one complex `M_k` and the regime to build a fibration in.
//!
//! ```toml
//! n = 4
//! k = 2
//! inverse = [[0, 1], [1, 0]]   # or `intersection = ...`, exactly one
//! torsion = [1, 1]
//! regime = "auto"
//! ```

use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fibrations::{
    construct_large_k, construct_localized, construct_n2, construct_n4, AttachingMap, FibrationCertificate,
    StableModel,
};
use crate::forms::SymForm;
use crate::ring::{IntMatrix, PrimeSet};

/// An integer written either as a TOML integer or as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Int {
    Small(i64),
    Text(String),
}

impl Int {
    fn value(&self, field: &str) -> Result<BigInt> {
        match self {
            Int::Small(x) => Ok(BigInt::from(*x)),
            Int::Text(s) => BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("{field}: `{s}` is not an integer"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeChoice {
    #[default]
    Auto,
    Localized,
    N2,
    N4,
    LargeK,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: u32,
    pub k: usize,
    /// The intersection form `Q` on `H_n(M_k)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intersection: Option<Vec<Vec<Int>>>,
    /// `g = Q⁻¹`, the matrix of the attaching map.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<Vec<Vec<Int>>>,
    /// Coefficients of `α_i∘ψ` for the torsion generator `ψ` (n = 4).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<Int>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub primes: Vec<u64>,
    /// Invariant factors of the stable stem with 2 inverted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_model: Option<Vec<u64>>,
    /// Stable coordinates of `Σω_i`, one row per class.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stable: Vec<Vec<Int>>,
    #[serde(default)]
    pub regime: RegimeChoice,
}

fn matrix(rows: &[Vec<Int>], field: &str, k: usize) -> Result<IntMatrix> {
    if rows.len() != k || rows.iter().any(|r| r.len() != k) {
        return Err(Error::Dimension(format!("{field}: expected a {k} x {k} matrix")));
    }
    let rows: Vec<Vec<BigInt>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, x)| x.value(&format!("{field}[{i}][{j}]"))).collect())
        .collect::<Result<_>>()?;
    IntMatrix::from_rows(&rows)
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem serializes")
    }

    /// The matrix `g` of `L`, computing it from `Q` when needed.
    pub fn form(&self) -> Result<SymForm> {
        let g = match (&self.intersection, &self.inverse) {
            (Some(q), None) => {
                let q = SymForm::new(matrix(q, "intersection", self.k)?)
                    .map_err(|e| Error::Data(format!("intersection: {e}")))?;
                q.require_unimodular().map_err(|e| Error::Data(format!("intersection: {e}")))?;
                q.inverse()?
            }
            (None, Some(g)) => {
                SymForm::new(matrix(g, "inverse", self.k)?).map_err(|e| Error::Data(format!("inverse: {e}")))?
            }
            _ => return Err(Error::Data("exactly one of `intersection` and `inverse` is required".into())),
        };
        g.require_unimodular().map_err(|e| Error::Data(format!("inverse: {e}")))?;
        Ok(g)
    }

    pub fn attaching_map(&self) -> Result<AttachingMap> {
        if self.k < 2 {
            return Err(Error::Precondition(format!("k: k >= 2 required (got {})", self.k)));
        }
        if !self.n.is_multiple_of(2) || self.n == 0 {
            return Err(Error::Precondition(format!("n: a positive even n is required (got {})", self.n)));
        }
        let mut m = AttachingMap::new(self.n, self.form()?)?;
        if !self.torsion.is_empty() {
            if self.torsion.len() != self.k {
                return Err(Error::Dimension(format!("torsion: expected {} entries", self.k)));
            }
            let t = self.torsion.iter().enumerate().map(|(i, x)| x.value(&format!("torsion[{i}]"))).collect::<Result<_>>()?;
            m = m.with_torsion(t)?;
        }
        if !self.stable.is_empty() {
            let x = self
                .stable
                .iter()
                .enumerate()
                .map(|(i, r)| r.iter().enumerate().map(|(j, x)| x.value(&format!("stable[{i}][{j}]"))).collect())
                .collect::<Result<Vec<Vec<BigInt>>>>()?;
            m = m.with_stable(x)?;
        }
        Ok(m)
    }

    /// The regime `auto` resolves to.
    pub fn resolved_regime(&self) -> Result<RegimeChoice> {
        Ok(match self.regime {
            RegimeChoice::Auto if self.stable_model.is_some() => RegimeChoice::LargeK,
            RegimeChoice::Auto if self.n == 2 => RegimeChoice::N2,
            RegimeChoice::Auto if self.n == 4 && self.primes.is_empty() => RegimeChoice::N4,
            RegimeChoice::Auto if !self.primes.is_empty() => RegimeChoice::Localized,
            RegimeChoice::Auto => {
                return Err(Error::Data(format!(
                    "regime: no integral pipeline for n = {}; give `primes` or `stable_model`",
                    self.n
                )))
            }
            r => r,
        })
    }

    pub fn solve(&self) -> Result<FibrationCertificate> {
        let m = self.attaching_map()?;
        match self.resolved_regime()? {
            RegimeChoice::N2 => construct_n2(&m),
            RegimeChoice::N4 => construct_n4(&m),
            RegimeChoice::Localized => construct_localized(&m, &PrimeSet::new(self.primes.iter().copied())?),
            RegimeChoice::LargeK => {
                let factors = self
                    .stable_model
                    .clone()
                    .ok_or_else(|| Error::Data("stable_model: required by the large_k regime".into()))?;
                construct_large_k(&m, &StableModel::new(factors)?)
            }
            RegimeChoice::Auto => unreachable!("resolved"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn intersection_is_inverted() {
        let p = ProblemFile::parse("n = 4\nk = 2\nintersection = [[2, 1], [1, 1]]\n").unwrap();
        assert_eq!(p.form().unwrap(), SymForm::from_i64(&[&[1, -1], &[-1, 2]]).unwrap());
        assert_eq!(p.resolved_regime().unwrap(), RegimeChoice::N4);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(ProblemFile::parse("n = 4\nk = 2\ninverse = [[0.5]]"), Err(Error::Parse(_))));
        assert!(matches!(ProblemFile::parse("n = 4\nk = 2\nbogus = 1"), Err(Error::Parse(_))));
        let both = ProblemFile::parse("n = 4\nk = 1\ninverse = [[1]]\nintersection = [[1]]").unwrap();
        assert!(matches!(both.attaching_map(), Err(Error::Precondition(_))));
        let p = ProblemFile::parse("n = 2\nk = 2\ninverse = [[1, 0], [0, 1]]\nintersection = [[1, 0], [0, 1]]").unwrap();
        assert!(matches!(p.form(), Err(Error::Data(_))));
    }

    #[test]
    fn big_entries_as_strings() {
        let p = ProblemFile::parse("n = 4\nk = 2\ninverse = [[0, 1], [1, 0]]\ntorsion = [\"120000000000000000001\", 1]").unwrap();
        let c = p.solve().unwrap();
        c.verify().unwrap();
    }

    #[test]
    fn round_trip() {
        let p = ProblemFile::parse("n = 10\nk = 2\ninverse = [[0, 1], [1, 0]]\nstable_model = [5]\nstable = [[1], [2]]\n").unwrap();
        assert_eq!(ProblemFile::parse(&p.to_toml()).unwrap(), p);
        assert_eq!(p.resolved_regime().unwrap(), RegimeChoice::LargeK);
        p.solve().unwrap().verify().unwrap();
    }
}
