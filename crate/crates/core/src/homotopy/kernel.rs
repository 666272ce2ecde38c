use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::expr::Expr;
use super::hilton::{HiltonBasis, HiltonVector, Slot, Stratum};
use super::normalize::{Normalizer, Strategy};
use super::table::SphereTable;
use crate::error::{Error, Result};
use crate::forms::SymForm;
use crate::ring::{smith_normal_form, IntMatrix};
use crate::tensorlie::{GradedBasis, TensorElement};

/// Index of the generator of `π_{2n−1}(S^n)` with Hopf invariant one.
pub fn hopf_generator(table: &SphereTable) -> Result<usize> {
    (0..table.mid.len())
        .find(|&g| table.mid.orders[g] == 0 && table.hopf[g].is_one())
        .ok_or_else(|| Error::Table(format!("{}: no Hopf invariant one generator", table.name)))
}

/// Index of the torsion generator of `π_{2n−1}(S^n)`, if any.
pub fn torsion_generator(table: &SphereTable) -> Option<usize> {
    (0..table.mid.len()).find(|&g| table.mid.orders[g] != 0)
}

/// `L = Σ_{i<j} g_ij[α_i,α_j] + Σ g_ii α_i∘φ + Σ l_i α_i∘ψ`, with `φ` of Hopf
/// invariant one and `ψ` the torsion generator.
pub fn attaching_expr(table: &SphereTable, g: &SymForm, l: &[BigInt]) -> Result<Expr> {
    let k = g.rank();
    if l.len() != k {
        return Err(Error::Dimension(format!("{} stable coordinates for rank {k}", l.len())));
    }
    let phi = &table.mid.names[hopf_generator(table)?];
    let psi = torsion_generator(table).map(|t| table.mid.names[t].clone());
    let mut terms = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let c = g.entry(i, j);
            if !c.is_zero() {
                terms.push(Expr::scale(c.clone(), Expr::bracket(Expr::Gen(i), Expr::Gen(j))));
            }
        }
    }
    for i in 0..k {
        let c = g.entry(i, i);
        if !c.is_zero() {
            terms.push(Expr::scale(c.clone(), Expr::compose(Expr::Gen(i), phi)));
        }
    }
    for (i, c) in l.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let psi = psi.as_ref().ok_or_else(|| {
            Error::Precondition(format!("table {} has no torsion class for stable coordinates", table.name))
        })?;
        terms.push(Expr::scale(c.clone(), Expr::compose(Expr::Gen(i), psi)));
    }
    Ok(Expr::Sum(terms))
}

/// Reads `(g, l)` back from a normalized attaching map.
pub fn attaching_data(table: &SphereTable, v: &HiltonVector) -> Result<(SymForm, Vec<BigInt>)> {
    let k = v.basis().k;
    let phi = hopf_generator(table)?;
    let psi = torsion_generator(table);
    let mut m = IntMatrix::zeros(k, k);
    let mut l = vec![BigInt::zero(); k];
    for i in 0..k {
        m[(i, i)] = v.get(&Slot::SelfMid(i, phi));
        if let Some(t) = psi {
            l[i] = v.get(&Slot::SelfMid(i, t));
        }
        for j in i + 1..k {
            let c = v.get(&Slot::Pair(i, j));
            m[(i, j)] = c.clone();
            m[(j, i)] = c;
        }
    }
    Ok((SymForm::new(m)?, l))
}

/// Reads a Hilton vector back as an expression, one term per nonzero slot.
pub fn vector_expr(table: &SphereTable, v: &HiltonVector) -> Expr {
    let mut terms = Vec::new();
    for (s, c) in v.basis().slots().iter().zip(v.coords()) {
        if c.is_zero() {
            continue;
        }
        let t = match *s {
            Slot::SelfMid(i, g) => Expr::compose(Expr::Gen(i), &table.mid.names[g]),
            Slot::Pair(i, j) => Expr::bracket(Expr::Gen(i), Expr::Gen(j)),
            Slot::SelfHigh(i, g) => Expr::compose(Expr::Gen(i), &table.high.names[g]),
            Slot::PairTop(i, j, t) => {
                Expr::compose(Expr::bracket(Expr::Gen(i), Expr::Gen(j)), &table.top.names[t])
            }
            Slot::Triple(i, j, l) => {
                Expr::bracket(Expr::bracket(Expr::Gen(i), Expr::Gen(j)), Expr::Gen(l))
            }
        };
        terms.push(if c.is_one() { t } else { Expr::scale(c.clone(), t) });
    }
    Expr::Sum(terms)
}

/// `ρ: π_{2n−1}(∨S^n) → H_{2n−2}(Ω∨S^n)`, the Samelson–Hurewicz map, with
/// `ρ[α_i,α_j] = −[a_i,a_j]` and `ρ(α_i∘g) = −H(g) a_i a_i`.
pub fn rho(table: &SphereTable, v: &HiltonVector) -> Result<TensorElement> {
    if v.basis().stratum != Stratum::Mid {
        return Err(Error::Degree("rho is defined on the middle stratum".into()));
    }
    let k = v.basis().k;
    let basis = GradedBasis::uniform(k, table.n - 1);
    let mut out = TensorElement::zero(&basis);
    for (s, c) in v.basis().slots().iter().zip(v.coords()) {
        if c.is_zero() {
            continue;
        }
        let c = crate::ring::LocalScalar::from_int(-c.clone());
        match *s {
            Slot::SelfMid(i, g) => {
                let h = crate::ring::LocalScalar::from_int(table.hopf[g].clone());
                out.add_term(basis.word(vec![i, i]), c * h);
            }
            Slot::Pair(i, j) => {
                out.add_term(basis.word(vec![i, j]), c.clone());
                out.add_term(basis.word(vec![j, i]), c);
            }
            _ => unreachable!("middle stratum"),
        }
    }
    Ok(out)
}

/// The subgroup of `π_{3n−2}(∨S^n)` generated by `[L, α_i]` and `L∘θ`, the
/// image of the relative classes of the top cell.
#[derive(Clone, Debug)]
pub struct KernelSubgroup {
    pub basis: Arc<HiltonBasis>,
    pub labels: Vec<String>,
    pub generators: Vec<HiltonVector>,
}

impl KernelSubgroup {
    pub fn new(table: &SphereTable, k: usize, l: &Expr) -> Result<Self> {
        let mut nz = Normalizer::new(table, k, Strategy::First);
        let mut labels = Vec::new();
        let mut generators = Vec::new();
        for i in 0..k {
            let e = Expr::bracket(l.clone(), Expr::Gen(i));
            generators.push(nz.normalize_in(&e, Stratum::High)?);
            labels.push(format!("[L, a{}]", i + 1));
        }
        for name in &table.top.names {
            let e = Expr::compose(l.clone(), name);
            generators.push(nz.normalize_in(&e, Stratum::High)?);
            labels.push(format!("L.{name}"));
        }
        Ok(KernelSubgroup { basis: nz.high_basis().clone(), labels, generators })
    }

    /// Integer coefficients `c` with `v = Σ c_i gen_i` modulo slot orders.
    pub fn witness(&self, v: &HiltonVector) -> Result<Option<Vec<BigInt>>> {
        if **v.basis() != *self.basis {
            return Err(Error::AmbientMismatch);
        }
        let a = relation_matrix(&self.basis, &self.generators);
        let x = solve_integer(&a, v.coords())?;
        Ok(x.map(|x| x[..self.generators.len()].to_vec()))
    }

    pub fn contains(&self, v: &HiltonVector) -> Result<bool> {
        Ok(self.witness(v)?.is_some())
    }
}

/// Columns: the given vectors, then `order·e_s` for each torsion slot.
pub(crate) fn relation_matrix(basis: &HiltonBasis, gens: &[HiltonVector]) -> IntMatrix {
    let mut cols: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords().to_vec()).collect();
    for (s, &o) in basis.orders().iter().enumerate() {
        if o != 0 {
            let mut c = vec![BigInt::zero(); basis.len()];
            c[s] = BigInt::from(o);
            cols.push(c);
        }
    }
    let mut m = IntMatrix::zeros(basis.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        for (i, x) in c.iter().enumerate() {
            m[(i, j)] = x.clone();
        }
    }
    m
}

/// One integer solution of `a·x = b`, or `None`.
pub(crate) fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if a.rows() != b.len() {
        return Err(Error::Dimension("right-hand side length".into()));
    }
    let n = a.cols();
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b);
    let d = snf.invariant_factors();
    let mut y = vec![BigInt::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        match d.get(i) {
            Some(di) if !di.is_zero() => {
                if !(ci % di).is_zero() {
                    return Ok(None);
                }
                y[i] = ci / di;
            }
            _ => {
                if !ci.is_zero() {
                    return Ok(None);
                }
            }
        }
    }
    Ok(Some(snf.v.mul_vec(&y)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n4() -> SphereTable {
        SphereTable::builtin("n4", None).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn attaching_round_trip() {
        let t = n4();
        let g = SymForm::from_i64(&[&[2, 1, 0], &[1, -3, 5], &[0, 5, 4]]).unwrap();
        let l = big(&[1, 0, -7]);
        let e = attaching_expr(&t, &g, &l).unwrap();
        let v = Normalizer::new(&t, 3, Strategy::First).normalize_in(&e, Stratum::Mid).unwrap();
        let (g2, l2) = attaching_data(&t, &v).unwrap();
        assert_eq!(g2, g);
        assert_eq!(l2, big(&[1, 0, 5]));
    }

    #[test]
    fn rho_of_attaching_map_is_minus_relation() {
        let t = n4();
        let g = SymForm::from_i64(&[&[1, 2], &[2, 3]]).unwrap();
        let e = attaching_expr(&t, &g, &big(&[5, 1])).unwrap();
        let v = Normalizer::new(&t, 2, Strategy::First).normalize_in(&e, Stratum::Mid).unwrap();
        let r = rho(&t, &v).unwrap();
        let rel = crate::tensorlie::QuadraticRelation::from_form(g.matrix(), r.basis()).unwrap();
        assert_eq!(r, rel.loop_relation());
    }

    #[test]
    fn integer_solver() {
        let a = IntMatrix::from_i64(&[&[2, 0], &[0, 3]]);
        assert_eq!(solve_integer(&a, &big(&[4, 9])).unwrap(), Some(big(&[2, 3])));
        assert_eq!(solve_integer(&a, &big(&[1, 0])).unwrap(), None);
    }
}
