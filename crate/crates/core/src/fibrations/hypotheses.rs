use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::SymForm;
use crate::ring::{smith_normal_form, IntMatrix, LocalScalar, PrimeSet};
use crate::tensorlie::{
    coefficient_columns, column_determinant, rank_oracle, GradedBasis, QuadraticRelation, TensorElement,
};

/// Outcome of the two homology conditions on `f: #^{k−1}(S^n × S^{2n−1}) → M_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    /// Invariant factors of the `k × (k−1)` matrix of the `μ_i`.
    #[serde(with = "crate::ring::decimal::vec")]
    pub invariant_factors: Vec<BigInt>,
    /// A vector completing the `μ_i` to a basis over the working ring.
    #[serde(with = "crate::ring::decimal::vec")]
    pub complement: Vec<BigInt>,
    pub injective: bool,
    /// Rank of the degree `2n−2` part of `T(a)/(ℒ)`.
    pub ambient_rank: usize,
    /// Rank of the quotient by `W·H_{n−1}`.
    pub quotient_rank: usize,
    /// Determinant of `[W⊗V | ℒ | ρ(β_i)]` over the words of degree `2n−2`.
    pub determinant: LocalScalar,
    pub basis_hit: bool,
}

impl FiberReport {
    pub fn ok(&self) -> bool {
        self.injective && self.basis_hit
    }
}

/// Checks (1) the `μ_i` span a summand of rank `k−1` of `H_n`, and (2) the
/// `ρ(β_i)` project to a basis of `H_{2n−2}(ΩM_k) / (W·H_{n−1})`, both over
/// `Z[1/primes]`.
pub fn verify_fiber_hypotheses(
    n: u32,
    g: &SymForm,
    mus: &[Vec<BigInt>],
    rho_betas: &[TensorElement],
    primes: &PrimeSet,
) -> Result<FiberReport> {
    let k = g.rank();
    if k < 2 {
        return Err(Error::RankTooSmall { rank: k, min: 2 });
    }
    if mus.len() + 1 != k || rho_betas.len() + 1 != k {
        return Err(Error::Dimension(format!(
            "{} classes μ and {} classes β for rank {k}",
            mus.len(),
            rho_betas.len()
        )));
    }
    if mus.iter().any(|m| m.len() != k) {
        return Err(Error::Dimension("μ coordinates".into()));
    }
    let basis = GradedBasis::uniform(k, n - 1);
    if rho_betas.iter().any(|b| **b.basis() != *basis) {
        return Err(Error::AmbientMismatch);
    }

    let mut m = IntMatrix::zeros(k, k - 1);
    for (j, mu) in mus.iter().enumerate() {
        for (i, x) in mu.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
    }
    let snf = smith_normal_form(&m);
    let invariant_factors = snf.invariant_factors();
    let injective = invariant_factors.len() == k - 1 && invariant_factors.iter().all(|d| primes.is_unit_integer(d));
    let complement = snf.u.unimodular_inverse()?.column(k - 1);

    let rel = QuadraticRelation::from_form(g.matrix(), &basis)?;
    let degree = rel.degree();
    let ambient_rank = rank_oracle(&rel, degree, None)?;
    let mut cols = Vec::with_capacity(k * k);
    for mu in mus {
        for j in 0..k {
            let mut t = TensorElement::zero(&basis);
            for (a, c) in mu.iter().enumerate() {
                t.add_term(basis.word(vec![a, j]), LocalScalar::from_int(c.clone()));
            }
            cols.push(t);
        }
    }
    let w_rank = k * (k - 1);
    cols.push(rel.element().clone());
    cols.extend(rho_betas.iter().cloned());
    let words = basis.words_of_degree(degree);
    let determinant = column_determinant(&coefficient_columns(&cols, &words))?;
    let basis_hit = primes.is_unit(&determinant);
    Ok(FiberReport {
        invariant_factors,
        complement,
        injective,
        ambient_rank,
        quotient_rank: ambient_rank.saturating_sub(w_rank),
        determinant,
        basis_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensorlie::construct_w;

    fn e(k: usize, i: usize) -> Vec<BigInt> {
        (0..k).map(|j| BigInt::from((i == j) as i64)).collect()
    }

    #[test]
    fn hyperbolic_at_n4() {
        let g = SymForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        let basis = GradedBasis::uniform(2, 3);
        // ρ(ν_2) = −a_2 a_2
        let b = TensorElement::from_letters(&basis, vec![1, 1], LocalScalar::from_int(-1));
        let r = verify_fiber_hypotheses(4, &g, &[e(2, 0)], &[b], &PrimeSet::empty()).unwrap();
        assert_eq!(r.ambient_rank, 3);
        assert_eq!(r.quotient_rank, 1);
        assert!(r.ok());
        let z = TensorElement::zero(&basis);
        let r = verify_fiber_hypotheses(4, &g, &[e(2, 0)], &[z], &PrimeSet::empty()).unwrap();
        assert!(r.injective && !r.basis_hit);
    }

    #[test]
    fn construct_w_classes_pass() {
        let g = SymForm::from_i64(&[&[2, 1, 0], &[1, 1, 1], &[0, 1, 1]]).unwrap();
        let basis = GradedBasis::uniform(3, 5);
        let ws = construct_w(g.matrix(), &basis, &PrimeSet::empty()).unwrap();
        let rho: Vec<_> = ws.iter().map(|w| w.scale(&LocalScalar::from_int(-1))).collect();
        let r = verify_fiber_hypotheses(6, &g, &[e(3, 0), e(3, 1)], &rho, &PrimeSet::empty()).unwrap();
        assert!(r.ok(), "{r:?}");
        assert_eq!(r.complement, e(3, 2));
    }

    #[test]
    fn non_summand_fails_condition_one() {
        let g = SymForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        let basis = GradedBasis::uniform(2, 1);
        let b = TensorElement::from_letters(&basis, vec![1, 1], LocalScalar::one());
        let mu = vec![BigInt::from(2), BigInt::from(0)];
        let r = verify_fiber_hypotheses(2, &g, std::slice::from_ref(&mu), std::slice::from_ref(&b), &PrimeSet::empty()).unwrap();
        assert!(!r.injective);
        let r = verify_fiber_hypotheses(2, &g, &[mu], &[b], &PrimeSet::new([2]).unwrap()).unwrap();
        assert!(r.injective);
    }
}
