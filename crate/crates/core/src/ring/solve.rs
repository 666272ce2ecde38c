use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{smith_normal_form, IntMatrix, LocalScalar, PrimeSet};
use crate::error::{Error, Result};

/// Row-major matrix over `Z[1/S]`.
pub type ScalarMatrix = Vec<Vec<LocalScalar>>;

/// Solves `a · x = b` over `Z[1/S]`.
///
/// Every row is scaled by the lcm of its denominators, the resulting integer
/// system is brought to Smith form, and each transformed right-hand side is
/// tested for divisibility by its diagonal entry with the primes of `S`
/// divided out. Returns `Ok(None)` when no solution exists in `Z[1/S]`.
pub fn solve_linear(
    a: &ScalarMatrix,
    b: &[LocalScalar],
    ring: &PrimeSet,
) -> Result<Option<Vec<LocalScalar>>> {
    let m = a.len();
    if b.len() != m {
        return Err(Error::Dimension(format!("{} rows but rhs has {}", m, b.len())));
    }
    let n = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension("ragged coefficient matrix".into()));
    }
    if a.iter().flatten().chain(b).any(|x| !ring.contains(x)) {
        return Err(Error::Precondition("entries outside the working ring".into()));
    }

    let mut ai = IntMatrix::zeros(m, n);
    let mut bi = vec![BigInt::zero(); m];
    for i in 0..m {
        let scale = a[i]
            .iter()
            .chain(std::iter::once(&b[i]))
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denominator()));
        for j in 0..n {
            ai[(i, j)] = (a[i][j].as_rational() * &scale).to_integer();
        }
        bi[i] = (b[i].as_rational() * &scale).to_integer();
    }

    let snf = smith_normal_form(&ai);
    let c = snf.u.mul_vec(&bi);
    let diag = snf.invariant_factors();
    let mut y = vec![LocalScalar::zero(); n];
    for (i, ci) in c.iter().enumerate() {
        let di = diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if di.is_zero() {
            if !ci.is_zero() {
                return Ok(None);
            }
            continue;
        }
        let q = LocalScalar::new(ci.clone(), di);
        if !ring.contains(&q) {
            return Ok(None);
        }
        y[i] = q;
    }
    let x = (0..n)
        .map(|i| {
            (0..n).fold(LocalScalar::zero(), |acc, j| {
                acc + LocalScalar::from_int(snf.v[(i, j)].clone()) * y[j].clone()
            })
        })
        .collect();
    Ok(Some(x))
}

/// A basis (as columns) of the integer kernel `{x ∈ Zⁿ : a·x = 0}`.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let n = a.cols();
    let cols: Vec<Vec<BigInt>> = (r..n).map(|j| snf.v.column(j)).collect();
    if cols.is_empty() {
        return IntMatrix::zeros(n, 0);
    }
    IntMatrix::from_columns(&cols).expect("kernel columns share length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> LocalScalar {
        LocalScalar::new(n.into(), d.into())
    }

    fn int(n: i64) -> LocalScalar {
        LocalScalar::from(n)
    }

    #[test]
    fn identity_system() {
        let s2 = PrimeSet::new([2]).unwrap();
        let a = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        let x = solve_linear(&a, &[q(1, 2), int(3)], &s2).unwrap().unwrap();
        assert_eq!(x, vec![q(1, 2), int(3)]);
    }

    #[test]
    fn localization_decides_solvability() {
        let a = vec![vec![int(2)]];
        assert!(solve_linear(&a, &[int(1)], &PrimeSet::empty()).unwrap().is_none());
        let s2 = PrimeSet::new([2]).unwrap();
        assert_eq!(solve_linear(&a, &[int(1)], &s2).unwrap().unwrap(), vec![q(1, 2)]);
    }

    #[test]
    fn inconsistent_system() {
        let a = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let s = PrimeSet::new([2, 3]).unwrap();
        assert!(solve_linear(&a, &[int(1), int(3)], &s).unwrap().is_none());
        let x = solve_linear(&a, &[int(1), int(2)], &s).unwrap().unwrap();
        assert_eq!(&x[0] + &x[1], int(1));
    }

    #[test]
    fn kernel_basis() {
        let a = IntMatrix::from_i64(&[&[1, 2, 3]]);
        let k = integer_kernel(&a);
        assert_eq!(k.cols(), 2);
        assert!((&a * &k).is_zero());
    }

    proptest! {
        // A unit of Z[1/S] always admits a solution of [[a]]·x = [1].
        #[test]
        fn units_are_solvable(e2 in 0u32..4, e3 in 0u32..4, neg in any::<bool>(), d in 0u32..3) {
            let s = PrimeSet::new([2, 3]).unwrap();
            let mut a = int(2i64.pow(e2) * 3i64.pow(e3));
            if neg { a = -a; }
            let a = a * LocalScalar::new(BigInt::one(), BigInt::from(2i64.pow(d)));
            prop_assert!(s.is_unit(&a));
            let x = solve_linear(&vec![vec![a.clone()]], &[int(1)], &s).unwrap();
            prop_assert_eq!(x.unwrap()[0].clone() * a, int(1));
        }
    }
}
