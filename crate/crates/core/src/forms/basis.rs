use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{solve_mod_p, BasisChange, SymForm};
use crate::error::{Error, Result};
use crate::ring::IntMatrix;

pub fn is_primitive(v: &[BigInt]) -> bool {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).is_one()
}

/// A unimodular matrix whose last column is `v`.
pub fn extend_to_basis(v: &[BigInt]) -> Result<BasisChange> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_one() {
        return Err(Error::NotPrimitive(g.to_string()));
    }
    let k = v.len();
    let mut a = v.to_vec();
    // Row operations E on `a` are mirrored as p ← p·E⁻¹, keeping p·a = v.
    let mut p = IntMatrix::identity(k);
    loop {
        let pivot = (0..k)
            .filter(|&i| !a[i].is_zero())
            .min_by(|&x, &y| a[x].abs().cmp(&a[y].abs()).then(x.cmp(&y)))
            .expect("primitive vector is nonzero");
        if pivot != 0 {
            a.swap(0, pivot);
            p.swap_cols(0, pivot);
        }
        let mut done = true;
        for i in 1..k {
            if a[i].is_zero() {
                continue;
            }
            let q = a[i].div_floor(&a[0]);
            let t = &q * &a[0];
            a[i] -= t;
            p.add_col_multiple(0, i, &q);
            done &= a[i].is_zero();
        }
        if done {
            break;
        }
    }
    if a[0].is_negative() {
        p.negate_col(0);
    }
    let mut out = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            out[(i, (j + k - 1) % k)] = p[(i, j)].clone();
        }
    }
    BasisChange::new(out)
}

/// A vector `w` with `⟨x,w⟩ ≡ ⟨x,x⟩ (mod 2)` for all `x`, entries in `{0,1}`.
pub fn characteristic_vector(g: &SymForm) -> Result<Vec<BigInt>> {
    g.require_unimodular()?;
    let k = g.rank();
    let diag: Vec<BigInt> = (0..k).map(|i| g.entry(i, i).clone()).collect();
    solve_mod_p(g.matrix(), &diag, 2)?
        .ok_or_else(|| Error::Data("form is singular modulo 2".into()))
}

/// A basis whose last vector is characteristic. For even forms the
/// characteristic vector is zero and the identity is returned.
pub fn characteristic_basis(g: &SymForm) -> Result<BasisChange> {
    let w = characteristic_vector(g)?;
    if w.iter().all(Zero::is_zero) {
        return Ok(BasisChange::identity(g.rank()));
    }
    extend_to_basis(&w)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn extend_unit_vector() {
        let b = extend_to_basis(&v(&[1, 0, 0])).unwrap();
        assert_eq!(b.matrix(), &IntMatrix::from_i64(&[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]));
    }

    #[test]
    fn extend_examples() {
        for x in [v(&[2, 3]), v(&[1, 1, 1]), v(&[6, 10, 15]), v(&[-4, 0, 7, 9])] {
            let b = extend_to_basis(&x).unwrap();
            assert!(b.matrix().is_unimodular());
            assert_eq!(b.column(x.len() - 1), x);
        }
        assert!(matches!(extend_to_basis(&v(&[2, 4])), Err(Error::NotPrimitive(_))));
    }

    fn assert_characteristic(g: &SymForm, b: &BasisChange) {
        let w = b.column(g.rank() - 1);
        for i in 0..g.rank() {
            let x = b.column(i);
            assert!((g.inner(&x, &w) - g.norm(&x)).is_even());
        }
    }

    #[test]
    fn characteristic_examples() {
        let id = SymForm::identity(2);
        assert_eq!(characteristic_vector(&id).unwrap(), v(&[1, 1]));
        assert_characteristic(&id, &characteristic_basis(&id).unwrap());
        let d = SymForm::from_i64(&[&[1, 0], &[0, -1]]).unwrap();
        assert_eq!(characteristic_vector(&d).unwrap(), v(&[1, 1]));
        let h = SymForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(characteristic_basis(&h).unwrap(), BasisChange::identity(2));
        let g = SymForm::from_i64(&[&[1, 2, 0], &[2, 3, 1], &[0, 1, 0]]).unwrap();
        assert_characteristic(&g, &characteristic_basis(&g).unwrap());
    }
}
