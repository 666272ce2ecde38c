use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::table::SphereTable;
use crate::error::{Error, Result};

/// Which homotopy group of the wedge `∨_k S^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// `π_{2n−1}`
    Mid,
    /// `π_{3n−2}`
    High,
}

/// A cyclic summand of the Hilton–Milnor decomposition. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    /// `α_i ∘ g`, `g` a generator of `π_{2n−1}(S^n)`.
    SelfMid(usize, usize),
    /// `[α_i, α_j]`, `i < j`.
    Pair(usize, usize),
    /// `α_i ∘ g`, `g` a generator of `π_{3n−2}(S^n)`.
    SelfHigh(usize, usize),
    /// `[α_i, α_j] ∘ t`, `i < j`, `t` a generator of `π_{3n−2}(S^{2n−1})`.
    PairTop(usize, usize, usize),
    /// `[[α_i, α_j], α_l]` with `i < j`, `l ≥ i`.
    Triple(usize, usize, usize),
}

/// The cyclic summands of one stratum, in a fixed order.
#[derive(Debug, PartialEq, Eq)]
pub struct HiltonBasis {
    pub stratum: Stratum,
    pub k: usize,
    slots: Vec<Slot>,
    orders: Vec<u64>,
    names: Vec<String>,
    index: HashMap<Slot, usize>,
}

impl HiltonBasis {
    pub fn new(table: &SphereTable, k: usize, stratum: Stratum) -> Arc<Self> {
        let mut slots = Vec::new();
        let mut orders = Vec::new();
        let mut names = Vec::new();
        let a = |i: usize| format!("a{}", i + 1);
        match stratum {
            Stratum::Mid => {
                for i in 0..k {
                    for (g, name) in table.mid.names.iter().enumerate() {
                        slots.push(Slot::SelfMid(i, g));
                        orders.push(table.mid.orders[g]);
                        names.push(format!("{}.{name}", a(i)));
                    }
                }
                for i in 0..k {
                    for j in i + 1..k {
                        slots.push(Slot::Pair(i, j));
                        orders.push(0);
                        names.push(format!("[{},{}]", a(i), a(j)));
                    }
                }
            }
            Stratum::High => {
                for i in 0..k {
                    for (g, name) in table.high.names.iter().enumerate() {
                        slots.push(Slot::SelfHigh(i, g));
                        orders.push(table.high.orders[g]);
                        names.push(format!("{}.{name}", a(i)));
                    }
                }
                for i in 0..k {
                    for j in i + 1..k {
                        for (t, name) in table.top.names.iter().enumerate() {
                            slots.push(Slot::PairTop(i, j, t));
                            orders.push(table.top.orders[t]);
                            names.push(format!("[{},{}].{name}", a(i), a(j)));
                        }
                    }
                }
                for i in 0..k {
                    for j in i + 1..k {
                        for l in i..k {
                            slots.push(Slot::Triple(i, j, l));
                            orders.push(0);
                            names.push(format!("[[{},{}],{}]", a(i), a(j), a(l)));
                        }
                    }
                }
            }
        }
        let index = slots.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Arc::new(HiltonBasis { stratum, k, slots, orders, names, index })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn position(&self, slot: &Slot) -> Option<usize> {
        self.index.get(slot).copied()
    }
}

/// Coordinates in a [`HiltonBasis`], reduced modulo the slot orders.
#[derive(Clone, Debug)]
pub struct HiltonVector {
    basis: Arc<HiltonBasis>,
    coords: Vec<BigInt>,
}

impl PartialEq for HiltonVector {
    fn eq(&self, other: &Self) -> bool {
        *self.basis == *other.basis && self.coords == other.coords
    }
}

impl Eq for HiltonVector {}

impl HiltonVector {
    pub fn new(basis: Arc<HiltonBasis>, mut coords: Vec<BigInt>) -> Result<Self> {
        if coords.len() != basis.len() {
            return Err(Error::Dimension(format!("{} coordinates for {} slots", coords.len(), basis.len())));
        }
        for (x, &o) in coords.iter_mut().zip(&basis.orders) {
            if o != 0 {
                *x = x.mod_floor(&BigInt::from(o));
            }
        }
        Ok(HiltonVector { basis, coords })
    }

    pub fn zero(basis: Arc<HiltonBasis>) -> Self {
        let n = basis.len();
        HiltonVector { basis, coords: vec![BigInt::zero(); n] }
    }

    pub fn basis(&self) -> &Arc<HiltonBasis> {
        &self.basis
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn get(&self, slot: &Slot) -> BigInt {
        self.basis.position(slot).map_or_else(BigInt::zero, |i| self.coords[i].clone())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if *self.basis != *other.basis {
            return Err(Error::AmbientMismatch);
        }
        let c = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Self::new(self.basis.clone(), c)
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let v = self.coords.iter().map(|x| x * c).collect();
        Self::new(self.basis.clone(), v).expect("same length")
    }

    /// Nonzero coordinates as `(slot name, value)`, with torsion values shown
    /// in the symmetric range.
    pub fn terms(&self) -> Vec<(String, BigInt)> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.basis.names[i].clone(), symmetric(c, self.basis.orders[i])))
            .collect()
    }
}

fn symmetric(c: &BigInt, order: u64) -> BigInt {
    if order == 0 {
        return c.clone();
    }
    let o = BigInt::from(order);
    if c * 2 > o {
        c - o
    } else {
        c.clone()
    }
}

impl fmt::Display for HiltonVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (name, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            if a.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{a} {name}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slot_counts() {
        let t = SphereTable::builtin("n4", None).unwrap();
        for k in 1..6 {
            let mid = HiltonBasis::new(&t, k, Stratum::Mid);
            assert_eq!(mid.len(), 2 * k + k * (k - 1) / 2);
            let high = HiltonBasis::new(&t, k, Stratum::High);
            let triples = (k * k * k - k) / 3;
            assert_eq!(high.len(), 2 * k + k * (k - 1) / 2 + triples);
        }
    }

    #[test]
    fn display_and_reduction() {
        let t = SphereTable::builtin("n4", None).unwrap();
        let b = HiltonBasis::new(&t, 2, Stratum::Mid);
        let v = HiltonVector::new(b.clone(), [1, 11, 0, 0, -3].map(BigInt::from).to_vec()).unwrap();
        assert_eq!(v.to_string(), "a1.nu - a1.nup - 3 [a1,a2]");
        assert_eq!(v.get(&Slot::SelfMid(0, 1)), BigInt::from(11));
        assert!(v.scale(&BigInt::from(12)).try_add(&v.scale(&BigInt::from(-12))).unwrap().is_zero());
    }
}
