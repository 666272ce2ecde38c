use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const N2: &str = include_str!("../../tables/n2.toml");
const N4: &str = include_str!("../../tables/n4.toml");
const N8: &str = include_str!("../../tables/n8.toml");
const GENERIC: &str = include_str!("../../tables/generic.toml");

/// Expected sha256 of each shipped table file.
pub const PINNED: &[(&str, &str)] = &[
    ("n2.toml", "303ee1976bc96a0dcee76b9958888ef97bc95dc965380ad9e1d123cbde1767f2"),
    ("n4.toml", "53d1fa1293f7b346d4838fa69ae747cfd1cdd5ed436eca4d845b3a4ab62e4bfd"),
    ("n8.toml", "a511a8deb3711c35f789c867fae982c109a40155d84e5b094865954f52da1fa3"),
    ("generic.toml", "d396e2df04b90064af2e9c076dc52586692ea0d49b4212cc06f9810f2a79a62a"),
];

pub fn embedded_source(file: &str) -> Option<&'static str> {
    match file {
        "n2.toml" => Some(N2),
        "n4.toml" => Some(N4),
        "n8.toml" => Some(N8),
        "generic.toml" => Some(GENERIC),
        _ => None,
    }
}

pub fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

pub fn pinned_hash(file: &str) -> Option<&'static str> {
    PINNED.iter().find(|(f, _)| *f == file).map(|(_, h)| *h)
}

/// Reads `file` from `dir` and checks it against its pin.
pub fn read_pinned(dir: &Path, file: &str) -> Result<String> {
    let path = dir.join(file);
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
    let want = pinned_hash(file).ok_or_else(|| Error::Table(format!("no pin for {file}")))?;
    let got = sha256_hex(&text);
    if got != want {
        return Err(Error::Table(format!("{file}: checksum {got} does not match pin {want}")));
    }
    Ok(text)
}

/// A finitely generated abelian group given by cyclic generators
/// (order 0 means infinite cyclic).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbGroup {
    pub names: Vec<String>,
    pub orders: Vec<u64>,
}

impl AbGroup {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn reduce(&self, v: &mut [BigInt]) {
        for (x, &o) in v.iter_mut().zip(&self.orders) {
            if o != 0 {
                *x = x.mod_floor(&BigInt::from(o));
            }
        }
    }

    pub fn is_zero(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(Zero::is_zero)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGen {
    name: String,
    order: u64,
    #[serde(default)]
    hopf: i64,
    #[serde(default)]
    suspension: Vec<i64>,
    #[serde(default)]
    suspension_name: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariant {
    name: String,
    triple: Vec<i64>,
    #[serde(default)]
    self_brackets: BTreeMap<String, Vec<i64>>,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TableIdentity {
    pub lhs: String,
    pub rhs: String,
    pub source: String,
    #[serde(default)]
    pub variant: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    format: u32,
    name: String,
    n: u32,
    whitehead_square: Vec<i64>,
    sources: Vec<String>,
    mid: Vec<RawGen>,
    top: Vec<RawGen>,
    high: Vec<RawGen>,
    compositions: BTreeMap<String, Vec<Vec<i64>>>,
    variant: Vec<RawVariant>,
    #[serde(default)]
    identity: Vec<TableIdentity>,
}

/// Whitehead-product data for one even sphere `S^n`, for one choice of the
/// unsettled signs.
///
/// * `mid` is `π_{2n−1}(S^n)`, `top` is `π_{3n−2}(S^{2n−1})`, `high` is `π_{3n−2}(S^n)`.
/// * `suspension[g]` is `Σ^{n−1} g` in `top`.
/// * `compositions[g][t]` is `g ∘ t` in `high`.
/// * `self_brackets[g]` is `[g, ι]` in `high`, when the table states it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereTable {
    pub name: String,
    pub variant: String,
    pub n: u32,
    pub sources: Vec<String>,
    pub mid: AbGroup,
    pub hopf: Vec<BigInt>,
    pub whitehead_square: Vec<BigInt>,
    pub top: AbGroup,
    pub suspension: Vec<Vec<BigInt>>,
    pub suspension_names: Vec<String>,
    pub high: AbGroup,
    pub compositions: Vec<Vec<Vec<BigInt>>>,
    pub triple: Vec<BigInt>,
    pub self_brackets: Vec<Option<Vec<BigInt>>>,
    pub identities: Vec<TableIdentity>,
    pub sha256: String,
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn group(gens: &[RawGen]) -> AbGroup {
    AbGroup {
        names: gens.iter().map(|g| g.name.clone()).collect(),
        orders: gens.iter().map(|g| g.order).collect(),
    }
}

fn check_len(what: &str, v: &[i64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(Error::Table(format!("{what}: expected {n} coordinates, got {}", v.len())));
    }
    Ok(())
}

impl SphereTable {
    /// Parses a table and selects `variant` (or the only one present).
    pub fn parse(text: &str, variant: Option<&str>) -> Result<Self> {
        let raw: RawTable = toml::from_str(text).map_err(|e| Error::Table(e.to_string()))?;
        if raw.format != 1 {
            return Err(Error::Table(format!("unknown table format {}", raw.format)));
        }
        if raw.n == 0 || !raw.n.is_multiple_of(2) {
            return Err(Error::Table(format!("sphere dimension {} must be even", raw.n)));
        }
        let chosen = match variant {
            Some(v) => raw.variant.iter().find(|x| x.name == v),
            None if raw.variant.len() == 1 => raw.variant.first(),
            None => {
                let names: Vec<_> = raw.variant.iter().map(|v| v.name.as_str()).collect();
                return Err(Error::Table(format!("table {} needs a variant, one of {names:?}", raw.name)));
            }
        }
        .ok_or_else(|| Error::Table(format!("table {} has no variant {variant:?}", raw.name)))?;

        let (mid, top, high) = (group(&raw.mid), group(&raw.top), group(&raw.high));
        check_len("whitehead_square", &raw.whitehead_square, mid.len())?;
        check_len("triple", &chosen.triple, high.len())?;
        let mut suspension = Vec::new();
        let mut suspension_names = Vec::new();
        let mut compositions = Vec::new();
        let mut self_brackets = Vec::new();
        for g in &raw.mid {
            check_len(&format!("suspension of {}", g.name), &g.suspension, top.len())?;
            suspension.push(big(&g.suspension));
            suspension_names.push(
                g.suspension_name.clone().ok_or_else(|| Error::Table(format!("{} lacks suspension_name", g.name)))?,
            );
            let rows = raw
                .compositions
                .get(&g.name)
                .ok_or_else(|| Error::Table(format!("no compositions for {}", g.name)))?;
            if rows.len() != top.len() {
                return Err(Error::Table(format!("compositions of {}: wrong row count", g.name)));
            }
            let mut cg = Vec::new();
            for r in rows {
                check_len(&format!("composition of {}", g.name), r, high.len())?;
                cg.push(big(r));
            }
            compositions.push(cg);
            let sb = chosen.self_brackets.get(&g.name);
            if let Some(v) = sb {
                check_len(&format!("[{}, iota]", g.name), v, high.len())?;
            }
            self_brackets.push(sb.map(|v| big(v)));
        }
        for key in raw.compositions.keys().chain(chosen.self_brackets.keys()) {
            if mid.index(key).is_none() {
                return Err(Error::Table(format!("unknown generator {key}")));
            }
        }
        let mut names: Vec<&String> = mid.names.iter().chain(&top.names).chain(&high.names).collect();
        names.extend(suspension_names.iter().filter(|s| top.index(s).is_none()));
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != names.len() {
            return Err(Error::Table("generator names must be distinct".into()));
        }
        let t = SphereTable {
            name: raw.name,
            variant: chosen.name.clone(),
            n: raw.n,
            sources: raw.sources,
            hopf: raw.mid.iter().map(|g| BigInt::from(g.hopf)).collect(),
            whitehead_square: big(&raw.whitehead_square),
            mid,
            top,
            suspension,
            suspension_names,
            high,
            compositions,
            triple: big(&chosen.triple),
            self_brackets,
            identities: raw
                .identity
                .into_iter()
                .filter(|i| i.variant.as_deref().is_none_or(|v| v == chosen.name))
                .collect(),
            sha256: sha256_hex(text),
        };
        t.validate()?;
        Ok(t)
    }

    /// A shipped table by name: `n2`, `n4`, `n8`.
    pub fn builtin(name: &str, variant: Option<&str>) -> Result<Self> {
        let src = embedded_source(&format!("{name}.toml"))
            .filter(|_| name != "generic")
            .ok_or_else(|| Error::Table(format!("no built-in table {name}")))?;
        Self::parse(src, variant)
    }

    pub fn for_dimension(n: u32, variant: Option<&str>) -> Result<Self> {
        match n {
            2 | 4 | 8 => Self::builtin(&format!("n{n}"), variant),
            _ => Err(Error::Unsupported(format!("no table for S^{n}"))),
        }
    }

    /// Names of the variants in a table source.
    pub fn variants(text: &str) -> Result<Vec<String>> {
        let raw: RawTable = toml::from_str(text).map_err(|e| Error::Table(e.to_string()))?;
        Ok(raw.variant.into_iter().map(|v| v.name).collect())
    }

    /// `Σ^{n−1} x` for `x` in `mid` coordinates.
    pub fn suspend(&self, x: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.top.len()];
        for (c, s) in x.iter().zip(&self.suspension) {
            for (o, v) in out.iter_mut().zip(s) {
                *o += c * v;
            }
        }
        out
    }

    /// `x ∘ θ` for `x` in `mid` and `θ` in `top` coordinates.
    pub fn compose(&self, x: &[BigInt], theta: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.high.len()];
        for (g, c) in x.iter().enumerate() {
            for (t, d) in theta.iter().enumerate() {
                let f = c * d;
                for (o, v) in out.iter_mut().zip(&self.compositions[g][t]) {
                    *o += &f * v;
                }
            }
        }
        out
    }

    /// Hopf invariant of `x` in `mid` coordinates.
    pub fn hopf_of(&self, x: &[BigInt]) -> BigInt {
        x.iter().zip(&self.hopf).map(|(a, b)| a * b).sum()
    }

    /// `[g, ι]` via `[ι,ι]∘Σ^{n−1}g − H(g)[[ι,ι],ι]`.
    pub fn derived_self_bracket(&self, g: usize) -> Vec<BigInt> {
        let mut out = self.compose(&self.whitehead_square, &self.suspension[g]);
        for (o, t) in out.iter_mut().zip(&self.triple) {
            *o -= &self.hopf[g] * t;
        }
        out
    }

    /// A named class in `top`: a generator or the suspension of a `mid` generator.
    pub fn top_class(&self, name: &str) -> Option<Vec<BigInt>> {
        if let Some(i) = self.top.index(name) {
            let mut v = vec![BigInt::zero(); self.top.len()];
            v[i] = BigInt::from(1);
            return Some(v);
        }
        self.suspension_names.iter().position(|s| s == name).map(|g| self.suspension[g].clone())
    }

    fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Table(format!("{}: {m}", self.name)));
        if !self.high.is_zero(&{
            let mut t = self.triple.clone();
            t.iter_mut().for_each(|x| *x *= 3);
            t
        }) {
            return err("3[[i,i],i] must vanish".into());
        }
        if !self.top.is_zero(&self.suspend(&self.whitehead_square)) {
            return err("the suspension of [i,i] must vanish".into());
        }
        if self.hopf_of(&self.whitehead_square) != BigInt::from(2) {
            return err("[i,i] must have Hopf invariant 2".into());
        }
        for g in 0..self.mid.len() {
            let o = BigInt::from(self.mid.orders[g]);
            if o.is_zero() {
                continue;
            }
            let scaled = |v: &[BigInt]| v.iter().map(|x| x * &o).collect::<Vec<_>>();
            if !self.hopf[g].is_zero() {
                return err(format!("torsion generator {} has nonzero Hopf invariant", self.mid.names[g]));
            }
            if !self.top.is_zero(&scaled(&self.suspension[g])) {
                return err(format!("suspension of {} ignores its order", self.mid.names[g]));
            }
            for t in 0..self.top.len() {
                if !self.high.is_zero(&scaled(&self.compositions[g][t])) {
                    return err(format!("compositions of {} ignore its order", self.mid.names[g]));
                }
            }
        }
        for t in 0..self.top.len() {
            let o = BigInt::from(self.top.orders[t]);
            for g in 0..self.mid.len() {
                let v: Vec<BigInt> = self.compositions[g][t].iter().map(|x| x * &o).collect();
                if !o.is_zero() && !self.high.is_zero(&v) {
                    return err(format!("composition with {} ignores its order", self.top.names[t]));
                }
            }
        }
        for (g, stated) in self.self_brackets.iter().enumerate() {
            if let Some(s) = stated {
                let d = self.derived_self_bracket(g);
                let diff: Vec<BigInt> = s.iter().zip(&d).map(|(a, b)| a - b).collect();
                if !self.high.is_zero(&diff) {
                    return err(format!("[{}, i] disagrees with the composition rule", self.mid.names[g]));
                }
            }
        }
        Ok(())
    }
}

/// An entry of the generic hypothesis table.
#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Hypothesis {
    pub id: String,
    pub statement: String,
    pub source: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneric {
    format: u32,
    name: String,
    hypothesis: Vec<Hypothesis>,
}

pub fn generic_hypotheses() -> Result<Vec<Hypothesis>> {
    let raw: RawGeneric = toml::from_str(GENERIC).map_err(|e| Error::Table(e.to_string()))?;
    if raw.format != 1 || raw.name != "generic" {
        return Err(Error::Table("malformed generic table".into()));
    }
    Ok(raw.hypothesis)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pins_match_embedded() {
        for (file, hash) in PINNED {
            assert_eq!(sha256_hex(embedded_source(file).unwrap()), *hash, "{file}");
        }
    }

    #[test]
    fn builtin_tables_load() {
        let t = SphereTable::builtin("n4", None).unwrap();
        assert_eq!(t.n, 4);
        assert_eq!(t.derived_self_bracket(0), big(&[2, 0]));
        assert_eq!(t.top_class("nup7"), Some(big(&[-2])));
        SphereTable::builtin("n2", None).unwrap();
        assert!(SphereTable::builtin("n8", None).is_err());
        for v in ["plus", "minus"] {
            assert_eq!(SphereTable::builtin("n8", Some(v)).unwrap().variant, v);
        }
        assert_eq!(generic_hypotheses().unwrap().len(), 4);
    }

    #[test]
    fn inconsistent_table_rejected() {
        let bad = N4.replace("self_brackets = { nu = [2, 0]", "self_brackets = { nu = [1, 0]");
        assert!(matches!(SphereTable::parse(&bad, None), Err(Error::Table(_))));
        let bad = N4.replace("triple = [0, 1]", "triple = [1, 0]");
        assert!(SphereTable::parse(&bad, None).is_err());
    }
}
