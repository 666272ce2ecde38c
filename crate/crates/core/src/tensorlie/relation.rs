use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use super::element::{bracket, GradedBasis, TensorElement, Word};
use crate::error::{Error, Result};
use crate::ring::{smith_normal_form, solve_linear, IntMatrix, LocalScalar, PrimeSet};

/// The quadratic element `ℒ = Σ g_ij v_i ⊗ v_j` together with the form it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticRelation {
    element: TensorElement,
    form: IntMatrix,
}

impl QuadraticRelation {
    pub fn from_form(g: &IntMatrix, basis: &Arc<GradedBasis>) -> Result<Self> {
        if !g.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if g.rows() != basis.len() {
            return Err(Error::Dimension(format!(
                "form of size {} over {} generators",
                g.rows(),
                basis.len()
            )));
        }
        let k = g.rows();
        if k == 0 {
            return Err(Error::RankTooSmall { rank: 0, min: 1 });
        }
        let degrees: Vec<u32> = (0..k).map(|i| basis.degree_of(i)).collect();
        if degrees.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Unsupported("relation over a basis of mixed degree".into()));
        }
        let mut element = TensorElement::zero(basis);
        for i in 0..k {
            for j in 0..k {
                element.add_term(basis.word(vec![i, j]), LocalScalar::from_int(g[(i, j)].clone()));
            }
        }
        Ok(QuadraticRelation { element, form: g.clone() })
    }

    pub fn element(&self) -> &TensorElement {
        &self.element
    }

    pub fn form(&self) -> &IntMatrix {
        &self.form
    }

    pub fn basis(&self) -> &Arc<GradedBasis> {
        self.element.basis()
    }

    /// Degree of `ℒ`, twice the generator degree.
    pub fn degree(&self) -> u32 {
        2 * self.basis().degree_of(0)
    }

    /// The loop-homology relation `l = −ℒ`.
    pub fn loop_relation(&self) -> TensorElement {
        -&self.element
    }
}

fn check_invertible(g: &IntMatrix, ring: &PrimeSet) -> Result<()> {
    let det = g.determinant()?;
    if ring.is_unit_integer(&det) {
        Ok(())
    } else {
        Err(Error::NotInvertible)
    }
}

/// `w_i = Σ_{j<k} g_ij [v_j, v_k] + g_ik v_k ⊗ v_k` for `i = 1..k−1`.
pub fn construct_w(
    g: &IntMatrix,
    basis: &Arc<GradedBasis>,
    ring: &PrimeSet,
) -> Result<Vec<TensorElement>> {
    let rel = QuadraticRelation::from_form(g, basis)?;
    let k = g.rows();
    if k < 2 {
        return Err(Error::RankTooSmall { rank: k, min: 2 });
    }
    let m = rel.basis().degree_of(0);
    if m % 2 == 0 {
        return Err(Error::Unsupported("generators of even degree".into()));
    }
    check_invertible(g, ring)?;
    let v: Vec<TensorElement> = (0..k).map(|i| TensorElement::generator(basis, i)).collect();
    let vk = &v[k - 1];
    let vkvk = vk * vk;
    let mut ws = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        let mut w = vkvk.scale(&LocalScalar::from_int(g[(i, k - 1)].clone()));
        for (j, vj) in v.iter().enumerate().take(k - 1) {
            let b = bracket(vj, vk)?;
            w = &w + &b.scale(&LocalScalar::from_int(g[(i, j)].clone()));
        }
        ws.push(w);
    }
    Ok(ws)
}

/// `Σ_{i<k} [v_i, w_i] − [ℒ, v_k]`; zero exactly when the construction is sound.
pub fn w_identity_defect(rel: &QuadraticRelation, ws: &[TensorElement]) -> Result<TensorElement> {
    let basis = rel.basis();
    let k = basis.len();
    if ws.len() + 1 != k {
        return Err(Error::Dimension(format!("{} classes for rank {k}", ws.len())));
    }
    let mut lhs = TensorElement::zero(basis);
    for (i, w) in ws.iter().enumerate() {
        lhs = &lhs + &bracket(&TensorElement::generator(basis, i), w)?;
    }
    let rhs = bracket(rel.element(), &TensorElement::generator(basis, k - 1))?;
    Ok(&lhs - &rhs)
}

/// Coefficient columns of `elements` over the listed words.
pub fn coefficient_columns(elements: &[TensorElement], words: &[Word]) -> Vec<Vec<LocalScalar>> {
    elements.iter().map(|e| words.iter().map(|w| e.coefficient(w)).collect()).collect()
}

/// Determinant of a square matrix given by rational columns.
pub fn column_determinant(cols: &[Vec<LocalScalar>]) -> Result<LocalScalar> {
    let n = cols.len();
    if cols.iter().any(|c| c.len() != n) {
        return Err(Error::Dimension("determinant of a non-square system".into()));
    }
    let mut m = IntMatrix::zeros(n, n);
    let mut scale = BigInt::one();
    for (j, col) in cols.iter().enumerate() {
        let l = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denominator()));
        for (i, x) in col.iter().enumerate() {
            m[(i, j)] = (x.as_rational() * &l).to_integer();
        }
        scale *= l;
    }
    Ok(LocalScalar::new(m.determinant()?, scale))
}

/// Checks that `V ⊗ Ker(α)`, `ℒ` and the `w_i` together span `V ⊗ V` over the
/// working ring, where `α` reads off the `v_k` coefficient.
pub fn w_span_is_basis(
    rel: &QuadraticRelation,
    ws: &[TensorElement],
    ring: &PrimeSet,
) -> Result<bool> {
    let basis = rel.basis();
    let k = basis.len();
    let mut gens = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k - 1 {
            gens.push(TensorElement::from_letters(basis, vec![i, j], LocalScalar::one()));
        }
    }
    gens.push(rel.element().clone());
    gens.extend(ws.iter().cloned());
    let words = basis.words_of_degree(rel.degree());
    let det = column_determinant(&coefficient_columns(&gens, &words))?;
    Ok(ring.is_unit(&det))
}

/// A witness `x = Σ c · m₁ ⊗ ℒ ⊗ m₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealWitness {
    pub terms: Vec<(Word, Word, LocalScalar)>,
}

fn ideal_generators(rel: &QuadraticRelation, degree: u32) -> Vec<(Word, Word, TensorElement)> {
    let basis = rel.basis();
    let r = rel.degree();
    let mut out = Vec::new();
    if degree < r {
        return out;
    }
    let rest = degree - r;
    for a in 0..=rest {
        let lefts = if a == 0 { vec![Word::empty()] } else { basis.words_of_degree(a) };
        let rights = if a == rest { vec![Word::empty()] } else { basis.words_of_degree(rest - a) };
        for m1 in &lefts {
            for m2 in &rights {
                let e1 = TensorElement::monomial(basis, m1.clone(), LocalScalar::one());
                let e2 = TensorElement::monomial(basis, m2.clone(), LocalScalar::one());
                let col = &(&e1 * rel.element()) * &e2;
                out.push((m1.clone(), m2.clone(), col));
            }
        }
    }
    out
}

fn words_in_degree(basis: &Arc<GradedBasis>, degree: u32) -> Vec<Word> {
    if degree == 0 {
        vec![Word::empty()]
    } else {
        basis.words_of_degree(degree)
    }
}

/// Decides membership of `x` in the two-sided ideal `(ℒ)` in one degree.
pub fn ideal_membership(
    x: &TensorElement,
    rel: &QuadraticRelation,
    degree: u32,
    ring: &PrimeSet,
) -> Result<Option<IdealWitness>> {
    if !x.is_zero() && x.degree() != Some(degree) {
        return Err(Error::NotHomogeneous);
    }
    let gens = ideal_generators(rel, degree);
    if gens.is_empty() {
        return Ok(x.is_zero().then(|| IdealWitness { terms: Vec::new() }));
    }
    let words = words_in_degree(rel.basis(), degree);
    let cols: Vec<TensorElement> = gens.iter().map(|g| g.2.clone()).collect();
    let cols = coefficient_columns(&cols, &words);
    let a: Vec<Vec<LocalScalar>> =
        (0..words.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
    let b: Vec<LocalScalar> = words.iter().map(|w| x.coefficient(w)).collect();
    let Some(sol) = solve_linear(&a, &b, ring)? else { return Ok(None) };
    let terms = gens
        .into_iter()
        .zip(sol)
        .filter(|(_, c)| !c.is_zero())
        .map(|((m1, m2, _), c)| (m1, m2, c))
        .collect();
    Ok(Some(IdealWitness { terms }))
}

/// Rank of the degree-`d` part of `T(V)/(ℒ)` by brute force over all words.
/// The default degree bound is twice the degree of `ℒ`.
pub fn rank_oracle(rel: &QuadraticRelation, degree: u32, bound: Option<u32>) -> Result<usize> {
    let bound = bound.unwrap_or(2 * rel.degree());
    if degree > bound {
        return Err(Error::DegreeOverBound { degree, bound });
    }
    let words = words_in_degree(rel.basis(), degree);
    let gens: Vec<TensorElement> =
        ideal_generators(rel, degree).into_iter().map(|g| g.2).collect();
    if gens.is_empty() {
        return Ok(words.len());
    }
    let cols = coefficient_columns(&gens, &words);
    let mut m = IntMatrix::zeros(words.len(), cols.len());
    for (j, col) in cols.iter().enumerate() {
        let l = col.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denominator()));
        for (i, x) in col.iter().enumerate() {
            m[(i, j)] = (x.as_rational() * &l).to_integer();
        }
    }
    Ok(words.len() - smith_normal_form(&m).rank())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(rows: &[&[i64]], m: u32) -> (Arc<GradedBasis>, QuadraticRelation) {
        let g = IntMatrix::from_i64(rows);
        let b = GradedBasis::uniform(g.rows(), m);
        let rel = QuadraticRelation::from_form(&g, &b).unwrap();
        (b, rel)
    }

    #[test]
    fn hyperbolic_w() {
        let (b, rel) = setup(&[&[0, 1], &[1, 0]], 1);
        let ws = construct_w(rel.form(), &b, &PrimeSet::empty()).unwrap();
        let v2 = TensorElement::generator(&b, 1);
        assert_eq!(ws, vec![&v2 * &v2]);
        assert!(w_identity_defect(&rel, &ws).unwrap().is_zero());
        assert!(w_span_is_basis(&rel, &ws, &PrimeSet::empty()).unwrap());
    }

    #[test]
    fn diagonal_w() {
        let (b, rel) = setup(&[&[1, 0], &[0, -1]], 3);
        let ws = construct_w(rel.form(), &b, &PrimeSet::empty()).unwrap();
        let v1 = TensorElement::generator(&b, 0);
        let v2 = TensorElement::generator(&b, 1);
        assert_eq!(ws, vec![bracket(&v1, &v2).unwrap()]);
        let lhs = bracket(&v1, &ws[0]).unwrap();
        let l = &(&v1 * &v1) - &(&v2 * &v2);
        assert_eq!(lhs, bracket(&l, &v2).unwrap());
    }

    #[test]
    fn identity_three() {
        let (b, rel) = setup(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], 1);
        let ws = construct_w(rel.form(), &b, &PrimeSet::empty()).unwrap();
        let v: Vec<_> = (0..3).map(|i| TensorElement::generator(&b, i)).collect();
        assert_eq!(ws[0], bracket(&v[0], &v[2]).unwrap());
        assert_eq!(ws[1], bracket(&v[1], &v[2]).unwrap());
        assert!(w_identity_defect(&rel, &ws).unwrap().is_zero());
        assert!(w_span_is_basis(&rel, &ws, &PrimeSet::empty()).unwrap());
    }

    #[test]
    fn construct_w_preconditions() {
        let g = IntMatrix::from_i64(&[&[2, 0], &[0, 1]]);
        let b = GradedBasis::uniform(2, 1);
        assert_eq!(construct_w(&g, &b, &PrimeSet::empty()), Err(Error::NotInvertible));
        assert!(construct_w(&g, &b, &PrimeSet::new([2]).unwrap()).is_ok());
        let g1 = IntMatrix::from_i64(&[&[1]]);
        let b1 = GradedBasis::uniform(1, 1);
        assert!(matches!(construct_w(&g1, &b1, &PrimeSet::empty()), Err(Error::RankTooSmall { .. })));
    }

    #[test]
    fn membership_examples() {
        let (b, rel) = setup(&[&[0, 1], &[1, 0]], 1);
        let ring = PrimeSet::empty();
        let w = ideal_membership(rel.element(), &rel, 2, &ring).unwrap().unwrap();
        assert_eq!(w.terms, vec![(Word::empty(), Word::empty(), LocalScalar::one())]);
        let v1 = TensorElement::generator(&b, 0);
        assert!(ideal_membership(&(&v1 * &v1), &rel, 2, &ring).unwrap().is_none());
        let ws = construct_w(rel.form(), &b, &ring).unwrap();
        let sum = bracket(&v1, &ws[0]).unwrap();
        assert!(ideal_membership(&sum, &rel, 3, &ring).unwrap().is_some());
        assert!(ideal_membership(&v1, &rel, 2, &ring).is_err());
    }

    #[test]
    fn oracle_examples() {
        let (_, rel) = setup(&[&[0, 1], &[1, 0]], 1);
        assert_eq!(rank_oracle(&rel, 0, None).unwrap(), 1);
        assert_eq!(rank_oracle(&rel, 2, None).unwrap(), 3);
        assert!(rank_oracle(&rel, 5, None).is_err());
        let (_, rel3) = setup(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], 1);
        assert_eq!(rank_oracle(&rel3, 2, None).unwrap(), 8);
    }
}
