use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::SymForm;
use crate::error::{Error, Result};
use crate::ring::IntMatrix;

fn residue(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p−2) is the inverse.
    let (mut base, mut exp, mut acc) = (a % p, p - 2, 1u64);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Congruence diagonalization over `F_p` for odd `p`. Returns the change of
/// basis (entries in `0..p`) and the diagonal entries of `Pᵗ g P mod p`.
pub fn diagonalize_mod_p(g: &SymForm, p: u64) -> Result<(IntMatrix, Vec<u64>)> {
    if p < 3 || p.is_multiple_of(2) {
        return Err(Error::Precondition(format!("modulus {p} must be an odd prime")));
    }
    let k = g.rank();
    let mut a: Vec<Vec<u64>> =
        (0..k).map(|i| (0..k).map(|j| residue(g.entry(i, j), p)).collect()).collect();
    let mut q: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();

    let add_multiple = |a: &mut Vec<Vec<u64>>, q: &mut Vec<Vec<u64>>, dst: usize, src: usize, c: u64| {
        // basis vector dst ← dst + c·src
        for row in q.iter_mut() {
            row[dst] = (row[dst] + c * row[src]) % p;
        }
        for row in a.iter_mut() {
            row[dst] = (row[dst] + c * row[src]) % p;
        }
        for j in 0..a.len() {
            a[dst][j] = (a[dst][j] + c * a[src][j]) % p;
        }
    };
    let swap = |a: &mut Vec<Vec<u64>>, q: &mut Vec<Vec<u64>>, x: usize, y: usize| {
        a.swap(x, y);
        for row in a.iter_mut() {
            row.swap(x, y);
        }
        for row in q.iter_mut() {
            row.swap(x, y);
        }
    };

    for t in 0..k {
        if let Some(i) = (t..k).find(|&i| a[i][i] != 0) {
            swap(&mut a, &mut q, t, i);
        } else if let Some((i, j)) =
            (t..k).flat_map(|i| (t..k).map(move |j| (i, j))).find(|&(i, j)| i != j && a[i][j] != 0)
        {
            add_multiple(&mut a, &mut q, i, j, 1);
            swap(&mut a, &mut q, t, i);
        } else {
            break;
        }
        let inv = inv_mod(a[t][t], p);
        for j in t + 1..k {
            if a[t][j] != 0 {
                let c = (p - a[t][j] * inv % p) % p;
                add_multiple(&mut a, &mut q, j, t, c);
            }
        }
    }
    let diag = (0..k).map(|i| a[i][i]).collect();
    let rows: Vec<Vec<BigInt>> =
        q.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    Ok((IntMatrix::from_rows(&rows)?, diag))
}

/// Solves `a·x ≡ b (mod p)`, returning one solution with entries in `0..p`.
pub fn solve_mod_p(a: &IntMatrix, b: &[BigInt], p: u64) -> Result<Option<Vec<BigInt>>> {
    if a.rows() != b.len() {
        return Err(Error::Dimension("right-hand side length".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    let mut rows: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut r: Vec<u64> = (0..n).map(|j| residue(&a[(i, j)], p)).collect();
            r.push(residue(&b[i], p));
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(i) = (r..m).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, i);
        let inv = inv_mod(rows[r][c], p);
        for x in rows[r].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in 0..=n {
                    rows[i][j] = (rows[i][j] + (p - f) * rows[r][j]) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| row[n] != 0) {
        return Ok(None);
    }
    let mut x = vec![BigInt::zero(); n];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = BigInt::from(rows[i][n]);
    }
    Ok(Some(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(g: &SymForm, p: u64) -> Vec<u64> {
        let (q, d) = diagonalize_mod_p(g, p).unwrap();
        let t = g.matrix().congruence(&q).reduce_mod(&BigInt::from(p));
        for i in 0..g.rank() {
            for j in 0..g.rank() {
                let want = if i == j { BigInt::from(d[i]) } else { BigInt::zero() };
                assert_eq!(t[(i, j)], want);
            }
        }
        d
    }

    #[test]
    fn diagonalize_examples() {
        assert_eq!(check(&SymForm::identity(3), 3), vec![1, 1, 1]);
        let h = SymForm::from_i64(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(check(&h, 3), vec![2, 1]);
        let r1 = SymForm::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        assert_eq!(check(&r1, 3), vec![2, 0]);
        let g = SymForm::from_i64(&[&[0, 2, 1], &[2, 0, 4], &[1, 4, 0]]).unwrap();
        check(&g, 5);
        check(&g, 7);
    }

    #[test]
    fn solve_examples() {
        let a = IntMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let x = solve_mod_p(&a, &[BigInt::from(1), BigInt::from(1)], 2).unwrap().unwrap();
        assert_eq!(x, vec![BigInt::zero(), BigInt::from(1)]);
        let s = IntMatrix::from_i64(&[&[2, 0], &[0, 0]]);
        assert!(solve_mod_p(&s, &[BigInt::from(1), BigInt::from(0)], 2).unwrap().is_none());
    }
}
