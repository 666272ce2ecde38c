use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::expr::Expr;
use super::hilton::{HiltonBasis, HiltonVector, Slot, Stratum};
use super::table::SphereTable;
use crate::error::{Error, Result};

/// Order in which alternative rewrite rules are tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Always the first applicable rule, left to right.
    First,
    /// Rules and summation order drawn from a seeded generator.
    Random(u64),
}

/// A normalized value: a linear combination of the `α_i`, or a Hilton vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normal {
    Zero,
    Low(Vec<BigInt>),
    Mid(HiltonVector),
    High(HiltonVector),
}

#[derive(Clone, Debug)]
enum Value {
    Zero,
    Low(Vec<BigInt>),
    Mid(Vec<BigInt>),
    High(Vec<BigInt>),
}

pub struct Normalizer<'t> {
    table: &'t SphereTable,
    k: usize,
    mid: Arc<HiltonBasis>,
    high: Arc<HiltonBasis>,
    rng: Option<ChaCha8Rng>,
}

fn binom2(c: &BigInt) -> BigInt {
    c * (c - BigInt::one()) / 2
}

impl<'t> Normalizer<'t> {
    pub fn new(table: &'t SphereTable, k: usize, strategy: Strategy) -> Self {
        Normalizer {
            table,
            k,
            mid: HiltonBasis::new(table, k, Stratum::Mid),
            high: HiltonBasis::new(table, k, Stratum::High),
            rng: match strategy {
                Strategy::First => None,
                Strategy::Random(s) => Some(ChaCha8Rng::seed_from_u64(s)),
            },
        }
    }

    pub fn mid_basis(&self) -> &Arc<HiltonBasis> {
        &self.mid
    }

    pub fn high_basis(&self) -> &Arc<HiltonBasis> {
        &self.high
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn pick(&mut self, n: usize) -> usize {
        match &mut self.rng {
            None => 0,
            Some(r) => r.gen_range(0..n),
        }
    }

    pub fn normalize(&mut self, e: &Expr) -> Result<Normal> {
        Ok(match self.eval(e)? {
            Value::Zero => Normal::Zero,
            Value::Low(v) => Normal::Low(v),
            Value::Mid(v) => Normal::Mid(HiltonVector::new(self.mid.clone(), v)?),
            Value::High(v) => Normal::High(HiltonVector::new(self.high.clone(), v)?),
        })
    }

    /// Normalizes into a given stratum; a zero expression gives the zero vector.
    pub fn normalize_in(&mut self, e: &Expr, stratum: Stratum) -> Result<HiltonVector> {
        let basis = match stratum {
            Stratum::Mid => self.mid.clone(),
            Stratum::High => self.high.clone(),
        };
        match (self.normalize(e)?, stratum) {
            (Normal::Zero, _) => Ok(HiltonVector::zero(basis)),
            (Normal::Mid(v), Stratum::Mid) | (Normal::High(v), Stratum::High) => Ok(v),
            _ => Err(Error::Degree(format!("`{e}` does not lie in the {stratum:?} stratum"))),
        }
    }

    fn eval(&mut self, e: &Expr) -> Result<Value> {
        match e {
            Expr::Gen(i) => {
                if *i >= self.k {
                    return Err(Error::Degree(format!("generator a{} outside a wedge of {}", i + 1, self.k)));
                }
                let mut v = vec![BigInt::zero(); self.k];
                v[*i] = BigInt::one();
                Ok(Value::Low(v))
            }
            Expr::Scale(c, x) => Ok(scale(self.eval(x)?, c)),
            Expr::Sum(terms) => {
                let mut order: Vec<usize> = (0..terms.len()).collect();
                if let Some(r) = &mut self.rng {
                    order.shuffle(r);
                }
                let mut acc = Value::Zero;
                for i in order {
                    let v = self.eval(&terms[i])?;
                    acc = add(acc, v).ok_or_else(|| Error::Degree(format!("sum of mixed degrees in `{e}`")))?;
                }
                Ok(acc)
            }
            Expr::Bracket(a, b) => {
                let (x, y) = (self.eval(a)?, self.eval(b)?);
                let (x, y) = if self.pick(2) == 1 { (y, x) } else { (x, y) };
                match (x, y) {
                    (Value::Zero, _) | (_, Value::Zero) => Ok(Value::Zero),
                    (Value::Low(u), Value::Low(v)) => Ok(Value::Mid(self.bracket_low_low(&u, &v))),
                    (Value::Low(u), Value::Mid(m)) | (Value::Mid(m), Value::Low(u)) => {
                        Ok(Value::High(self.bracket_low_mid(&u, &m)))
                    }
                    _ => Err(Error::NoApplicableRule(e.to_string())),
                }
            }
            Expr::Compose(x, name) => match self.eval(x)? {
                Value::Zero => Ok(Value::Zero),
                Value::Low(u) => {
                    if let Some(g) = self.table.mid.index(name) {
                        Ok(Value::Mid(self.compose_low_mid(&u, g)))
                    } else if let Some(g) = self.table.high.index(name) {
                        let nz: Vec<usize> = (0..self.k).filter(|&i| !u[i].is_zero()).collect();
                        match nz.as_slice() {
                            [] => Ok(Value::Zero),
                            [i] if u[*i].is_one() => {
                                let mut v = vec![BigInt::zero(); self.high.len()];
                                v[self.pos_high(&Slot::SelfHigh(*i, g))] = BigInt::one();
                                Ok(Value::High(v))
                            }
                            _ => Err(Error::NoApplicableRule(e.to_string())),
                        }
                    } else if self.table.top_class(name).is_some() {
                        Err(Error::NoApplicableRule(e.to_string()))
                    } else {
                        Err(Error::Parse(format!("unknown class `{name}` for table {}", self.table.name)))
                    }
                }
                Value::Mid(m) => match self.table.top_class(name) {
                    Some(theta) => Ok(Value::High(self.compose_mid_top(&m, &theta))),
                    None if self.table.mid.index(name).is_some() || self.table.high.index(name).is_some() => {
                        Err(Error::NoApplicableRule(e.to_string()))
                    }
                    None => Err(Error::Parse(format!("unknown class `{name}` for table {}", self.table.name))),
                },
                Value::High(_) => Err(Error::NoApplicableRule(e.to_string())),
            },
        }
    }

    fn pos_mid(&self, s: &Slot) -> usize {
        self.mid.position(s).expect("slot in basis")
    }

    fn pos_high(&self, s: &Slot) -> usize {
        self.high.position(s).expect("slot in basis")
    }

    /// `c·α_i ∘ [ι,ι]`, i.e. `c[α_i, α_i]`, into `out`.
    fn add_square(&self, out: &mut [BigInt], i: usize, c: &BigInt) {
        for (g, w) in self.table.whitehead_square.iter().enumerate() {
            out[self.pos_mid(&Slot::SelfMid(i, g))] += c * w;
        }
    }

    fn bracket_low_low(&self, u: &[BigInt], v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.mid.len()];
        for a in 0..self.k {
            for b in 0..self.k {
                let c = &u[a] * &v[b];
                if c.is_zero() {
                    continue;
                }
                if a == b {
                    self.add_square(&mut out, a, &c);
                } else {
                    out[self.pos_mid(&Slot::Pair(a.min(b), a.max(b)))] += c;
                }
            }
        }
        out
    }

    /// `(c α_a) ∘ g = c(α_a ∘ g) + C(c,2) H(g) [α_a, α_a]`.
    fn compose_single(&self, out: &mut [BigInt], a: usize, c: &BigInt, g: usize) {
        out[self.pos_mid(&Slot::SelfMid(a, g))] += c;
        let h = &self.table.hopf[g] * binom2(c);
        if !h.is_zero() {
            self.add_square(out, a, &h);
        }
    }

    /// `(Σ u_a α_a) ∘ g`, using `(x + y) ∘ g = x∘g + y∘g + H(g)[x, y]`.
    fn compose_low_mid(&mut self, u: &[BigInt], g: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.mid.len()];
        let mut terms: Vec<usize> = (0..self.k).filter(|&a| !u[a].is_zero()).collect();
        let h = self.table.hopf[g].clone();
        if self.pick(2) == 0 {
            for &a in &terms {
                self.compose_single(&mut out, a, &u[a], g);
            }
            for (x, &a) in terms.iter().enumerate() {
                for &b in &terms[x + 1..] {
                    out[self.pos_mid(&Slot::Pair(a.min(b), a.max(b)))] += &h * &u[a] * &u[b];
                }
            }
        } else {
            if let Some(r) = &mut self.rng {
                terms.shuffle(r);
            }
            let mut partial = vec![BigInt::zero(); self.k];
            for a in terms {
                self.compose_single(&mut out, a, &u[a], g);
                let mut y = vec![BigInt::zero(); self.k];
                y[a] = u[a].clone();
                let cross = self.bracket_low_low(&partial, &y);
                for (o, c) in out.iter_mut().zip(cross) {
                    *o += &h * c;
                }
                partial[a] = u[a].clone();
            }
        }
        out
    }

    fn compose_mid_top(&self, m: &[BigInt], theta: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.high.len()];
        for (s, c) in m.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match self.mid.slots()[s] {
                Slot::SelfMid(i, g) => {
                    let mut e = vec![BigInt::zero(); self.table.mid.len()];
                    e[g] = c.clone();
                    let v = self.table.compose(&e, theta);
                    for (h, x) in v.into_iter().enumerate() {
                        out[self.pos_high(&Slot::SelfHigh(i, h))] += x;
                    }
                }
                Slot::Pair(i, j) => {
                    for (t, x) in theta.iter().enumerate() {
                        out[self.pos_high(&Slot::PairTop(i, j, t))] += c * x;
                    }
                }
                _ => unreachable!("mid basis holds mid slots"),
            }
        }
        out
    }

    fn bracket_low_mid(&mut self, u: &[BigInt], m: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.high.len()];
        for a in 0..self.k {
            if u[a].is_zero() {
                continue;
            }
            for s in 0..m.len() {
                if m[s].is_zero() {
                    continue;
                }
                let c = &u[a] * &m[s];
                match self.mid.slots()[s].clone() {
                    Slot::Pair(i, j) => self.triple(&mut out, i, j, a, &c),
                    Slot::SelfMid(j, g) => self.bracket_gen_self(&mut out, a, j, g, &c),
                    _ => unreachable!("mid basis holds mid slots"),
                }
            }
        }
        out
    }

    /// `c[α_a, α_j ∘ g]` via `[α∘γ, β] = [α,β]∘Σγ − H(γ)[[α,β],α]`.
    fn bracket_gen_self(&mut self, out: &mut [BigInt], a: usize, j: usize, g: usize, c: &BigInt) {
        if a != j {
            let (lo, hi) = (a.min(j), a.max(j));
            for (t, x) in self.table.suspension[g].iter().enumerate() {
                out[self.pos_high(&Slot::PairTop(lo, hi, t))] += c * x;
            }
            let h = &self.table.hopf[g] * c;
            if !h.is_zero() {
                self.triple(out, j, a, j, &-h);
            }
            return;
        }
        let stated = self.table.self_brackets[g].clone();
        let v = match stated {
            Some(s) if self.pick(2) == 0 => s,
            _ => self.table.derived_self_bracket(g),
        };
        for (h, x) in v.iter().enumerate() {
            out[self.pos_high(&Slot::SelfHigh(j, h))] += c * x;
        }
    }

    /// `c[[α_a, α_b], α_l]` straightened into the Hall basis.
    fn triple(&mut self, out: &mut [BigInt], a: usize, b: usize, l: usize, c: &BigInt) {
        if a == b {
            if l == a {
                let v = match self.pick(2) {
                    0 => self.table.triple.clone(),
                    _ => {
                        // [α_a ∘ [ι,ι], α_a] through the stated or derived [g, ι].
                        let mut v = vec![BigInt::zero(); self.table.high.len()];
                        for (g, w) in self.table.whitehead_square.clone().iter().enumerate() {
                            let sb = match self.table.self_brackets[g].clone() {
                                Some(s) if self.pick(2) == 0 => s,
                                _ => self.table.derived_self_bracket(g),
                            };
                            for (o, x) in v.iter_mut().zip(sb) {
                                *o += w * x;
                            }
                        }
                        v
                    }
                };
                for (h, x) in v.iter().enumerate() {
                    out[self.pos_high(&Slot::SelfHigh(a, h))] += c * x;
                }
            } else if self.pick(2) == 0 {
                // Jacobi: [[a,a],l] = −2[[a,l],a].
                self.triple(out, a, l, a, &(c * -2));
            } else {
                for (g, w) in self.table.whitehead_square.clone().iter().enumerate() {
                    self.bracket_gen_self(out, l, a, g, &(c * w));
                }
            }
            return;
        }
        let (a, b) = (a.min(b), a.max(b));
        if l >= a {
            out[self.pos_high(&Slot::Triple(a, b, l))] += c;
        } else {
            // Jacobi: [[a,b],l] = −[[l,b],a] − [[l,a],b].
            let m = -c;
            self.triple(out, l, b, a, &m);
            self.triple(out, l, a, b, &m);
        }
    }
}

fn scale(v: Value, c: &BigInt) -> Value {
    let s = |x: Vec<BigInt>| x.into_iter().map(|y| y * c).collect();
    match v {
        Value::Zero => Value::Zero,
        Value::Low(x) => Value::Low(s(x)),
        Value::Mid(x) => Value::Mid(s(x)),
        Value::High(x) => Value::High(s(x)),
    }
}

fn add(a: Value, b: Value) -> Option<Value> {
    let s = |x: Vec<BigInt>, y: Vec<BigInt>| x.into_iter().zip(y).map(|(p, q)| p + q).collect();
    Some(match (a, b) {
        (Value::Zero, v) | (v, Value::Zero) => v,
        (Value::Low(x), Value::Low(y)) => Value::Low(s(x, y)),
        (Value::Mid(x), Value::Mid(y)) => Value::Mid(s(x, y)),
        (Value::High(x), Value::High(y)) => Value::High(s(x, y)),
        _ => return None,
    })
}

/// Normalizes `e` in a wedge of `k` spheres with the first-rule strategy.
pub fn normalize(table: &SphereTable, k: usize, e: &Expr) -> Result<Normal> {
    Normalizer::new(table, k, Strategy::First).normalize(e)
}

/// Checks every identity listed in the table, for each strategy seed.
pub fn check_table_identities(table: &SphereTable, seeds: &[u64]) -> Result<()> {
    let strategies =
        std::iter::once(Strategy::First).chain(seeds.iter().map(|&s| Strategy::Random(s))).collect::<Vec<_>>();
    for id in &table.identities {
        let lhs = Expr::parse(&id.lhs)?;
        let rhs = Expr::parse(&id.rhs)?;
        let k = lhs.rank_hint().max(rhs.rank_hint()).max(1);
        for &st in &strategies {
            let mut nz = Normalizer::new(table, k, st);
            let diff = nz.normalize(&(lhs.clone() - rhs.clone()))?;
            let zero = match &diff {
                Normal::Zero => true,
                Normal::Low(v) => v.iter().all(Zero::is_zero),
                Normal::Mid(v) | Normal::High(v) => v.is_zero(),
            };
            if !zero {
                return Err(Error::Verification(format!(
                    "table {} ({}): {} = {} fails, difference {diff:?}",
                    table.name, table.variant, id.lhs, id.rhs
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(name: &str, v: Option<&str>) -> SphereTable {
        SphereTable::builtin(name, v).unwrap()
    }

    fn high(t: &SphereTable, k: usize, s: &str) -> HiltonVector {
        Normalizer::new(t, k, Strategy::First).normalize_in(&Expr::parse(s).unwrap(), Stratum::High).unwrap()
    }

    #[test]
    fn shipped_identities_hold() {
        let seeds: Vec<u64> = (0..20).collect();
        for (n, v) in [("n2", None), ("n4", None), ("n8", Some("plus")), ("n8", Some("minus"))] {
            check_table_identities(&table(n, v), &seeds).unwrap();
        }
    }

    #[test]
    fn bracket_with_composite_has_weight_three_term() {
        let t = table("n4", None);
        let v = high(&t, 2, "[a2, a1.nu]");
        assert_eq!(v.to_string(), "[a1,a2].nu7 - [[a1,a2],a1]");
    }

    #[test]
    fn composition_of_sums() {
        let t = table("n4", None);
        let mut nz = Normalizer::new(&t, 2, Strategy::First);
        let Normal::Mid(v) = nz.normalize(&Expr::parse("(a1 + a2).nu").unwrap()).unwrap() else { panic!() };
        assert_eq!(v.to_string(), "a1.nu + a2.nu + [a1,a2]");
        let Normal::Mid(v) = nz.normalize(&Expr::parse("(-a1).nu").unwrap()).unwrap() else { panic!() };
        assert_eq!(v.to_string(), "a1.nu + a1.nup");
    }

    #[test]
    fn unsupported_terms_are_reported() {
        let t = table("n4", None);
        let mut nz = Normalizer::new(&t, 2, Strategy::First);
        for s in ["[[a1,a2],[a1,a2]]", "(2 a1).x", "[a1, a2.x]", "a1.x.nu7"] {
            assert!(matches!(nz.normalize(&Expr::parse(s).unwrap()), Err(Error::NoApplicableRule(_))), "{s}");
        }
        assert!(matches!(nz.normalize(&Expr::parse("a1.foo").unwrap()), Err(Error::Parse(_))));
        assert!(matches!(nz.normalize(&Expr::parse("a3").unwrap()), Err(Error::Degree(_))));
    }

    #[test]
    fn random_orders_agree() {
        let t = table("n4", None);
        let e = Expr::parse("[3 a1 - a2 + a3, [a1, a3] + 2 (a2 - a1).nu - a3.nup] + [[a2,a2],a1] + [[a3,a3],a3]")
            .unwrap();
        let want = Normalizer::new(&t, 3, Strategy::First).normalize(&e).unwrap();
        for s in 0..200 {
            assert_eq!(Normalizer::new(&t, 3, Strategy::Random(s)).normalize(&e).unwrap(), want);
        }
    }
}
