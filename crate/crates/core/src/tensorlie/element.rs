use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::LocalScalar;

/// Named generators with positive degrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedBasis {
    generators: Vec<(String, u32)>,
}

impl GradedBasis {
    pub fn new(generators: Vec<(String, u32)>) -> Result<Arc<Self>> {
        for (i, (name, d)) in generators.iter().enumerate() {
            if *d == 0 {
                return Err(Error::Degree(format!("generator `{name}` has degree 0")));
            }
            if generators[..i].iter().any(|(other, _)| other == name) {
                return Err(Error::Parse(format!("duplicate generator `{name}`")));
            }
        }
        Ok(Arc::new(GradedBasis { generators }))
    }

    /// `k` generators `v1..vk`, all of the given degree.
    pub fn uniform(k: usize, degree: u32) -> Arc<Self> {
        let gens = (1..=k).map(|i| (format!("v{i}"), degree)).collect();
        GradedBasis::new(gens).expect("uniform basis is valid")
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.generators[i].0
    }

    pub fn degree_of(&self, i: usize) -> u32 {
        self.generators[i].1
    }

    /// The common degree when every generator has the same one.
    pub fn single_degree(&self) -> Option<u32> {
        let d = self.generators.first()?.1;
        self.generators.iter().all(|g| g.1 == d).then_some(d)
    }

    pub fn word(&self, letters: Vec<usize>) -> Word {
        let degree = letters.iter().map(|&i| self.degree_of(i)).sum();
        Word { degree, len: letters.len(), letters }
    }

    /// Every word of total degree `d`, in canonical order.
    pub fn words_of_degree(&self, d: u32) -> Vec<Word> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), 0u32)];
        while let Some((letters, deg)) = stack.pop() {
            if deg == d {
                out.push(self.word(letters));
                continue;
            }
            for i in 0..self.len() {
                let nd = deg + self.degree_of(i);
                if nd <= d {
                    let mut l = letters.clone();
                    l.push(i);
                    stack.push((l, nd));
                }
            }
        }
        out.sort();
        out
    }
}

/// A word in the generators. Ordered by degree, then length, then
/// lexicographically by generator index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    degree: u32,
    len: usize,
    letters: Vec<usize>,
}

impl Word {
    pub fn empty() -> Self {
        Word { degree: 0, len: 0, letters: Vec::new() }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { degree: self.degree + other.degree, len: letters.len(), letters }
    }
}

/// An element of the tensor algebra `T(V)` over `Z[1/S]`.
#[derive(Clone, PartialEq, Eq)]
pub struct TensorElement {
    basis: Arc<GradedBasis>,
    terms: BTreeMap<Word, LocalScalar>,
}

impl TensorElement {
    pub fn zero(basis: &Arc<GradedBasis>) -> Self {
        TensorElement { basis: Arc::clone(basis), terms: BTreeMap::new() }
    }

    pub fn one(basis: &Arc<GradedBasis>) -> Self {
        Self::monomial(basis, Word::empty(), LocalScalar::one())
    }

    pub fn generator(basis: &Arc<GradedBasis>, i: usize) -> Self {
        Self::monomial(basis, basis.word(vec![i]), LocalScalar::one())
    }

    pub fn monomial(basis: &Arc<GradedBasis>, word: Word, c: LocalScalar) -> Self {
        let mut e = Self::zero(basis);
        e.add_term(word, c);
        e
    }

    pub fn from_letters(basis: &Arc<GradedBasis>, letters: Vec<usize>, c: LocalScalar) -> Self {
        Self::monomial(basis, basis.word(letters), c)
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        &self.basis
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &LocalScalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> LocalScalar {
        self.terms.get(w).cloned().unwrap_or_else(LocalScalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: Word, c: LocalScalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w.clone()).or_insert_with(LocalScalar::zero);
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.remove(&w);
        }
    }

    /// The degree when homogeneous; `None` for zero or mixed elements.
    pub fn degree(&self) -> Option<u32> {
        let d = self.terms.keys().next()?.degree;
        self.terms.keys().all(|w| w.degree == d).then_some(d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    pub fn scale(&self, c: &LocalScalar) -> Self {
        let mut out = Self::zero(&self.basis);
        for (w, x) in &self.terms {
            out.add_term(w.clone(), x * c);
        }
        out
    }

    fn check_ambient(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis {
            Ok(())
        } else {
            Err(Error::AmbientMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = self.clone();
        for (w, x) in &other.terms {
            out.add_term(w.clone(), x.clone());
        }
        Ok(out)
    }

    /// Tensor (concatenation) product.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_ambient(other)?;
        let mut out = Self::zero(&self.basis);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        Ok(out)
    }

    /// Homogeneous components, keyed by degree.
    pub fn components(&self) -> BTreeMap<u32, TensorElement> {
        let mut out: BTreeMap<u32, TensorElement> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.degree)
                .or_insert_with(|| Self::zero(&self.basis))
                .add_term(w.clone(), c.clone());
        }
        out
    }
}

fn sign(p: u32, q: u32) -> LocalScalar {
    if p % 2 == 1 && q % 2 == 1 {
        -LocalScalar::one()
    } else {
        LocalScalar::one()
    }
}

/// Graded commutator `[u,v] = uv − (−1)^{|u||v|} vu`, extended bilinearly
/// over homogeneous components.
pub fn bracket(a: &TensorElement, b: &TensorElement) -> Result<TensorElement> {
    a.check_ambient(b)?;
    let mut out = TensorElement::zero(&a.basis);
    for (u, x) in &a.terms {
        for (v, y) in &b.terms {
            let c = x * y;
            out.add_term(u.concat(v), c.clone());
            out.add_term(v.concat(u), -(c * sign(u.degree, v.degree)));
        }
    }
    Ok(out)
}

/// `a ⊗ a` for homogeneous `a` of odd degree.
pub fn square(a: &TensorElement) -> Result<TensorElement> {
    if a.is_zero() {
        return Ok(a.clone());
    }
    let d = a.degree().ok_or(Error::NotHomogeneous)?;
    if d % 2 == 0 {
        return Err(Error::EvenSquare(d));
    }
    a.try_mul(a)
}

impl Add for &TensorElement {
    type Output = TensorElement;
    fn add(self, rhs: &TensorElement) -> TensorElement {
        self.try_add(rhs).expect("ambient bases agree")
    }
}

impl Sub for &TensorElement {
    type Output = TensorElement;
    fn sub(self, rhs: &TensorElement) -> TensorElement {
        self.try_add(&-rhs).expect("ambient bases agree")
    }
}

impl Mul for &TensorElement {
    type Output = TensorElement;
    fn mul(self, rhs: &TensorElement) -> TensorElement {
        self.try_mul(rhs).expect("ambient bases agree")
    }
}

impl Neg for &TensorElement {
    type Output = TensorElement;
    fn neg(self) -> TensorElement {
        self.scale(&-LocalScalar::one())
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word = if w.letters.is_empty() {
                    "1".to_string()
                } else {
                    w.letters.iter().map(|&i| self.basis.name(i)).collect::<Vec<_>>().join("⊗")
                };
                format!("{c}·{word}")
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
