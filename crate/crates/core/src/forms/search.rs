use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{diagonalize_mod_p, SymForm};
use crate::error::{Error, Result};

/// How a primitive vector was found.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchPath {
    /// A standard basis vector already works.
    UnitVector,
    /// Diagonalize over `F_3` and combine at most three diagonal entries.
    Mod3Diagonal,
    /// Exhaustive search over residues mod 4 on the first `support` coordinates;
    /// `⟨v,v⟩ mod 8` only depends on `v mod 4`.
    Mod8Residues { support: usize },
    /// Bounded search over integer vectors, shell by shell.
    Bounded { bound: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitiveVector {
    pub vector: Vec<BigInt>,
    pub path: SearchPath,
}

fn small_form(g: &SymForm) -> Option<Vec<Vec<i128>>> {
    let k = g.rank();
    (0..k).map(|i| (0..k).map(|j| g.entry(i, j).to_i128()).collect()).collect()
}

fn norm(g: &[Vec<i128>], v: &[i64]) -> i128 {
    let mut s = 0i128;
    for (i, row) in g.iter().enumerate() {
        if v[i] == 0 {
            continue;
        }
        let mut t = 0i128;
        for (j, x) in row.iter().enumerate() {
            t += x * v[j] as i128;
        }
        s += t * v[i] as i128;
    }
    s
}

fn gcd_is_one(v: &[i64]) -> bool {
    v.iter().fold(0i64, |g, x| g.gcd(x)) == 1
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Values `0, 1, −1, 2, −2, …` up to `b`.
fn value_order(b: i64) -> Vec<i64> {
    let mut out = vec![0];
    for s in 1..=b {
        out.push(s);
        out.push(-s);
    }
    out
}

/// Odometer over `values^len`, first coordinate fastest. Stops early when
/// `visit` returns true.
fn odometer(values: &[i64], len: usize, mut visit: impl FnMut(&[i64]) -> bool) -> bool {
    let mut idx = vec![0usize; len];
    let mut v = vec![values[0]; len];
    loop {
        if visit(&v) {
            return true;
        }
        let mut i = 0;
        loop {
            if i == len {
                return false;
            }
            idx[i] += 1;
            if idx[i] < values.len() {
                v[i] = values[idx[i]];
                break;
            }
            idx[i] = 0;
            v[i] = values[0];
            i += 1;
        }
    }
}

/// The first primitive `v` with `max |v_i| ≤ bound` satisfying `pred(v, ⟨v,v⟩)`,
/// searching shells of increasing max-norm.
pub fn search_primitive(
    g: &SymForm,
    bound: i64,
    pred: impl Fn(&[i64], i128) -> bool,
) -> Result<Option<Vec<BigInt>>> {
    let small = small_form(g).ok_or_else(|| Error::Unsupported("form entries too large".into()))?;
    let k = g.rank();
    for shell in 1..=bound {
        let values = value_order(shell);
        let mut found = None;
        odometer(&values, k, |v| {
            if v.iter().any(|x| x.abs() == shell) && gcd_is_one(v) && pred(v, norm(&small, v)) {
                found = Some(to_big(v));
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

const MOD8_MAX_SUPPORT: usize = 10;

/// A primitive vector `v` with `m | ⟨v,v⟩` for `m ∈ {3, 8}`.
///
/// `bound` limits the final fallback search over integer vectors.
pub fn find_primitive_divisible(g: &SymForm, m: u32, bound: i64) -> Result<PrimitiveVector> {
    let k = g.rank();
    let min = match m {
        3 => 3,
        8 => 5,
        _ => return Err(Error::Precondition(format!("divisibility by {m} is not supported"))),
    };
    if k < min {
        return Err(Error::RankTooSmall { rank: k, min });
    }
    g.require_unimodular()?;
    let mb = BigInt::from(m);
    for i in 0..k {
        if g.entry(i, i).is_multiple_of(&mb) {
            let mut v = vec![BigInt::zero(); k];
            v[i] = BigInt::from(1);
            return Ok(PrimitiveVector { vector: v, path: SearchPath::UnitVector });
        }
    }
    let found = if m == 3 { mod3(g)? } else { mod8(g)? };
    if let Some(p) = found {
        return Ok(p);
    }
    let v = search_primitive(g, bound, |_, n| n % m as i128 == 0)?;
    match v {
        Some(vector) => Ok(PrimitiveVector { vector, path: SearchPath::Bounded { bound } }),
        None => Err(Error::SearchExhausted { bound, what: format!("no primitive vector of norm divisible by {m}") }),
    }
}

fn mod3(g: &SymForm) -> Result<Option<PrimitiveVector>> {
    let (q, d) = diagonalize_mod_p(g, 3)?;
    let k = g.rank();
    // Coefficients y in the diagonal basis with Σ d_i y_i² ≡ 0.
    let mut y = vec![0i64; k];
    if let Some(i) = d.iter().position(|&x| x == 0) {
        y[i] = 1;
    } else if let Some((i, j)) = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| d[i] != d[j])
    {
        y[i] = 1;
        y[j] = 1;
    } else {
        y[0] = 1;
        y[1] = 1;
        y[2] = 1;
    }
    let three = BigInt::from(3);
    let vector: Vec<BigInt> = (0..k)
        .map(|r| {
            let s: BigInt = (0..k).map(|c| &q[(r, c)] * y[c]).sum();
            let s = s.mod_floor(&three);
            if s == BigInt::from(2) {
                BigInt::from(-1)
            } else {
                s
            }
        })
        .collect();
    if !g.norm(&vector).is_multiple_of(&three) {
        return Ok(None);
    }
    Ok(Some(PrimitiveVector { vector, path: SearchPath::Mod3Diagonal }))
}

fn mod8(g: &SymForm) -> Result<Option<PrimitiveVector>> {
    let Some(small) = small_form(g) else { return Ok(None) };
    let k = g.rank();
    let values = [0i64, 1, -1, 2];
    for support in 5..=k.min(MOD8_MAX_SUPPORT) {
        let mut found = None;
        odometer(&values, support, |head| {
            let mut v = head.to_vec();
            v.resize(k, 0);
            if head.iter().any(|x| x % 2 != 0) && norm(&small, &v) % 8 == 0 {
                found = Some(v);
                true
            } else {
                false
            }
        });
        if let Some(v) = found {
            return Ok(Some(PrimitiveVector { vector: to_big(&v), path: SearchPath::Mod8Residues { support } }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::super::{random_form, SeedForm};
    use super::*;
    use rand::SeedableRng;

    fn v(x: &[i64]) -> Vec<BigInt> {
        to_big(x)
    }

    #[test]
    fn identity_examples() {
        let p = find_primitive_divisible(&SymForm::identity(3), 3, 4).unwrap();
        assert_eq!(p.vector, v(&[1, 1, 1]));
        assert_eq!(p.path, SearchPath::Mod3Diagonal);
        let p = find_primitive_divisible(&SymForm::identity(5), 8, 4).unwrap();
        assert_eq!(p.vector, v(&[2, 1, 1, 1, 1]));
    }

    #[test]
    fn isotropic_unit_vector() {
        let g = SymForm::from_i64(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]).unwrap();
        let p = find_primitive_divisible(&g, 3, 4).unwrap();
        assert_eq!(p.vector, v(&[1, 0, 0]));
        assert_eq!(p.path, SearchPath::UnitVector);
    }

    #[test]
    fn rank_threshold() {
        let err = find_primitive_divisible(&SymForm::identity(4), 8, 4).unwrap_err();
        assert_eq!(err, Error::RankTooSmall { rank: 4, min: 5 });
        assert!(find_primitive_divisible(&SymForm::identity(2), 3, 4).is_err());
    }

    #[test]
    fn random_forms() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in 3..=6 {
            for t in 0..100 {
                let seed = if t % 2 == 0 { SeedForm::Identity } else { SeedForm::OddIndefinite };
                let g = random_form(&mut rng, seed, k);
                for m in [3u32, 8] {
                    if m == 8 && k < 5 {
                        continue;
                    }
                    let p = find_primitive_divisible(&g, m, 4).unwrap();
                    assert!(super::super::is_primitive(&p.vector));
                    assert!(g.norm(&p.vector).is_multiple_of(&BigInt::from(m)));
                }
            }
        }
    }
}
