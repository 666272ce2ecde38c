use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::assemble::{assemble, standard_mus, Choice};
use super::attaching::AttachingMap;
use super::certificate::{BetaMethod, FibrationCertificate};
use crate::error::{Error, Result};
use crate::forms::{characteristic_basis, characteristic_vector, extend_to_basis, BasisChange};
use crate::homotopy::{Expr, SphereTable};
use crate::ring::PrimeSet;

/// Which `β` formula to use at `n = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum N2Formula {
    /// The short formula for odd forms, the full one for even forms.
    Auto,
    /// `β_i = Σ_{j<k} g_ij[α_j,α_k] + Σ_{j<i} g_ij[α_i,α_j] + Σ_{j>i} g_ij η_j`.
    Full,
    /// `β_i = Σ_{j<k} g_ij[α_j,α_k] + g_ik η_k`.
    Simple,
}

pub(crate) fn push(terms: &mut Vec<Expr>, c: &BigInt, e: Expr) {
    if c.is_zero() {
        return;
    }
    terms.push(if c.is_one() { e } else { Expr::scale(c.clone(), e) });
}

pub(crate) fn a(i: usize) -> Expr {
    Expr::Gen(i)
}

pub(crate) fn br(i: usize, j: usize) -> Expr {
    Expr::bracket(a(i), a(j))
}

pub(crate) fn at(i: usize, name: &str) -> Expr {
    Expr::compose(a(i), name)
}

pub(crate) fn vec_text(v: &[BigInt]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(", "))
}

pub fn construct_n2(m: &AttachingMap) -> Result<FibrationCertificate> {
    construct_n2_with(m, N2Formula::Auto)
}

pub fn construct_n2_with(m: &AttachingMap, formula: N2Formula) -> Result<FibrationCertificate> {
    if m.n != 2 {
        return Err(Error::Precondition(format!("n = {} is not 2", m.n)));
    }
    let table = SphereTable::builtin("n2", None)?;
    let input = m.reduced(&table)?;
    let k = m.k();
    let w = characteristic_vector(&m.g)?;
    let odd = w.iter().any(|x| !x.is_zero());
    let formula = match formula {
        N2Formula::Auto if odd => N2Formula::Simple,
        N2Formula::Auto => N2Formula::Full,
        f => f,
    };
    let mut transcript = vec![format!("characteristic vector w = {}", vec_text(&w))];
    let substitution = match formula {
        N2Formula::Simple => {
            if !odd {
                return Err(Error::Precondition("the short formula needs an odd form".into()));
            }
            transcript.push("last basis column is w, so g_ii = g_ik mod 2".into());
            characteristic_basis(&m.g)?
        }
        _ if !odd => {
            transcript.push("even form: g_ii even already".into());
            BasisChange::identity(k)
        }
        _ => {
            // Sᵗ(g w) = e_k makes the first k−1 columns orthogonal to w mod 2.
            let u = m.g.matrix().mul_vec(&w);
            let p = extend_to_basis(&u)?;
            transcript.push(format!("first k-1 columns span the kernel of g w = {} mod 2", vec_text(&u)));
            BasisChange::new(p.inverse().matrix().transpose())?
        }
    };
    let t = input.substitute_table(&table, &substitution)?;
    let g = &t.g;
    let mut betas = Vec::with_capacity(k - 1);
    for i in 0..k - 1 {
        let mut terms = Vec::new();
        for j in 0..k - 1 {
            push(&mut terms, g.entry(i, j), br(j, k - 1));
        }
        match formula {
            N2Formula::Simple => push(&mut terms, g.entry(i, k - 1), at(k - 1, "eta")),
            _ => {
                for j in 0..i {
                    push(&mut terms, g.entry(i, j), br(i, j));
                }
                for j in i + 1..k {
                    push(&mut terms, g.entry(i, j), at(j, "eta"));
                }
            }
        }
        betas.push(Expr::Sum(terms).to_string());
    }
    let method = if formula == N2Formula::Simple { BetaMethod::N2Simple } else { BetaMethod::N2Full };
    assemble(Choice {
        input,
        primes: PrimeSet::empty(),
        stable_model: None,
        substitution,
        transcript,
        method,
        mus: standard_mus(k),
        betas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::SymForm;

    fn map(rows: &[&[i64]]) -> AttachingMap {
        AttachingMap::new(2, SymForm::from_i64(rows).unwrap()).unwrap()
    }

    #[test]
    fn hyperbolic_full() {
        let c = construct_n2(&map(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(c.betas.method, BetaMethod::N2Full);
        c.verify().unwrap();
    }

    #[test]
    fn identity_rank_three() {
        let c = construct_n2(&map(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap();
        assert_eq!(c.substitution.column(2), vec![BigInt::one(); 3]);
        c.verify().unwrap();
    }

    #[test]
    fn full_formula_on_odd_forms_misses_eta_squared() {
        // The odd g_kk leaves g_kk a_k.eta.eta3, which no bracket with a_i (i < k) produces.
        for rows in [&[&[1, 0][..], &[0, -1]][..], &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]] {
            let err = construct_n2_with(&map(rows), N2Formula::Full).unwrap_err();
            let k = rows.len();
            assert_eq!(
                err,
                Error::NoConstruction(format!(
                    "`sum [a_i, b_i] = -[L, a_k] + L.eta3` leaves residual a{k}.etaeta3"
                ))
            );
            construct_n2_with(&map(rows), N2Formula::Simple).unwrap().verify().unwrap();
        }
    }
}
