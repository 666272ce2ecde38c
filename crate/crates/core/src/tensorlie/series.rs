use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A power series truncated after `t^order`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerSeries {
    coefficients: Vec<BigInt>,
}

impl PowerSeries {
    pub fn new(coefficients: Vec<BigInt>) -> Self {
        assert!(!coefficients.is_empty(), "series needs at least a constant term");
        PowerSeries { coefficients }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn one(order: usize) -> Self {
        let mut c = vec![BigInt::zero(); order + 1];
        c[0] = BigInt::one();
        Self::new(c)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn coefficient(&self, d: usize) -> BigInt {
        self.coefficients.get(d).cloned().unwrap_or_default()
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut c = self.coefficients.clone();
        c.resize(order + 1, BigInt::zero());
        Self::new(c)
    }

    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let order = self.order().min(other.order());
        let mut c = vec![BigInt::zero(); order + 1];
        for (i, a) in self.coefficients.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(order + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    /// Multiplicative inverse; requires constant term `±1`.
    pub fn inverse(&self) -> Result<PowerSeries> {
        let c0 = &self.coefficients[0];
        if !c0.abs().is_one() {
            return Err(Error::InconsistentSeries("constant term is not a unit".into()));
        }
        let n = self.order();
        let mut inv = vec![BigInt::zero(); n + 1];
        inv[0] = c0.clone();
        for d in 1..=n {
            let mut s = BigInt::zero();
            for j in 1..=d {
                s += &self.coefficients[j] * &inv[d - j];
            }
            inv[d] = -s * c0;
        }
        Ok(Self::new(inv))
    }
}

/// Which quadratic algebra to take the series of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HilbertMode {
    /// `1/(1 − k t^{n−1} + t^{2n−2})`, the loop homology of `M_k`.
    Manifold,
    /// `1/(1 − (k−1)t^{n−1} − (k−1)t^{2n−2} + t^{3n−3})`, the connected sum `E_k`.
    ConnectedSum,
}

fn poly(order: usize, terms: &[(usize, BigInt)]) -> PowerSeries {
    let mut c = vec![BigInt::zero(); order + 1];
    for (d, x) in terms {
        if *d <= order {
            c[*d] += x;
        }
    }
    PowerSeries::new(c)
}

fn denominator(k: u64, n: u32, order: usize, mode: HilbertMode) -> PowerSeries {
    let m = (n - 1) as usize;
    let k = BigInt::from(k);
    match mode {
        HilbertMode::Manifold => {
            poly(order, &[(0, BigInt::one()), (m, -k), (2 * m, BigInt::one())])
        }
        HilbertMode::ConnectedSum => {
            let k1 = k - BigInt::one();
            poly(order, &[(0, BigInt::one()), (m, -k1.clone()), (2 * m, -k1), (3 * m, BigInt::one())])
        }
    }
}

/// Truncated Hilbert series of the quadratic algebra selected by `mode`.
pub fn quadratic_hilbert(k: u64, n: u32, order: usize, mode: HilbertMode) -> Result<PowerSeries> {
    if k < 1 {
        return Err(Error::Precondition("k ≥ 1 required".into()));
    }
    if n < 2 || n % 2 == 1 {
        return Err(Error::Precondition(format!("n = {n} must be even and at least 2")));
    }
    denominator(k, n, order, mode).inverse()
}

fn binomial(n: &BigInt, r: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..r {
        acc = acc * (n - BigInt::from(i)) / BigInt::from(i + 1);
    }
    acc
}

/// `(1+t^d)^l` for odd `d`, `(1−t^d)^{−l}` for even `d`, truncated.
fn rank_factor(d: usize, l: &BigInt, order: usize) -> PowerSeries {
    let mut c = vec![BigInt::zero(); order + 1];
    let mut j = 0;
    while j * d <= order {
        c[j * d] = if d % 2 == 1 {
            binomial(l, j)
        } else {
            binomial(&(l + BigInt::from(j) - 1), j)
        };
        j += 1;
    }
    PowerSeries::new(c)
}

/// Product formula `Π_{d odd}(1+t^d)^{l_d} / Π_{d even}(1−t^d)^{l_d}`.
pub fn product_formula(ranks: &[BigInt], order: usize) -> PowerSeries {
    let mut p = PowerSeries::one(order);
    for (d, l) in ranks.iter().enumerate().skip(1) {
        if d > order {
            break;
        }
        if !l.is_zero() {
            p = p.mul(&rank_factor(d, l, order));
        }
    }
    p
}

/// Recovers ranks `l_1..l_order` (index 0 unused and zero) whose product
/// formula matches `series` through `t^order`.
pub fn lie_ranks_from_series(series: &PowerSeries, order: usize) -> Result<Vec<BigInt>> {
    if !series.coefficient(0).is_one() {
        return Err(Error::InconsistentSeries("constant term must be 1".into()));
    }
    if series.order() < order {
        return Err(Error::InconsistentSeries(format!(
            "series known to order {} but {order} requested",
            series.order()
        )));
    }
    let mut ranks = vec![BigInt::zero(); order + 1];
    let mut p = PowerSeries::one(order);
    for d in 1..=order {
        let l = series.coefficient(d) - p.coefficient(d);
        if l.is_negative() {
            return Err(Error::InconsistentSeries(format!("negative rank {l} in degree {d}")));
        }
        if !l.is_zero() {
            p = p.mul(&rank_factor(d, &l, order));
        }
        ranks[d] = l;
    }
    Ok(ranks)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorizationReport {
    pub polynomial_identity: bool,
    /// `l_d` for the manifold algebra, when the ranks exist.
    pub manifold_ranks: Option<Vec<BigInt>>,
    /// `f_d` for the connected sum, when the ranks exist.
    pub connected_sum_ranks: Option<Vec<BigInt>>,
    pub ranks_agree: bool,
}

impl FactorizationReport {
    pub fn ok(&self) -> bool {
        self.polynomial_identity && self.ranks_agree
    }
}

/// Checks `(1+t^{n−1})(1−kt^{n−1}+t^{2n−2}) = 1−(k−1)t^{n−1}−(k−1)t^{2n−2}+t^{3n−3}`
/// and, for `k ≥ 2`, that `f_d = l_d − δ_{d,n−1}` through `t^order`.
pub fn verify_factorization(k: u64, n: u32, order: usize) -> Result<FactorizationReport> {
    let m = (n - 1) as usize;
    let full = 3 * m;
    let lhs = poly(full, &[(0, BigInt::one()), (m, BigInt::one())])
        .mul(&denominator(k, n, full, HilbertMode::Manifold));
    let rhs = denominator(k, n, full, HilbertMode::ConnectedSum);
    let polynomial_identity = lhs == rhs;
    if k < 2 {
        return Ok(FactorizationReport {
            polynomial_identity,
            manifold_ranks: None,
            connected_sum_ranks: None,
            ranks_agree: true,
        });
    }
    let l = lie_ranks_from_series(&quadratic_hilbert(k, n, order, HilbertMode::Manifold)?, order)?;
    let f =
        lie_ranks_from_series(&quadratic_hilbert(k, n, order, HilbertMode::ConnectedSum)?, order)?;
    let ranks_agree = (1..=order).all(|d| {
        let delta = if d == m { BigInt::one() } else { BigInt::zero() };
        f[d] == &l[d] - delta
    });
    Ok(FactorizationReport {
        polynomial_identity,
        manifold_ranks: Some(l),
        connected_sum_ranks: Some(f),
        ranks_agree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(s: &PowerSeries) -> Vec<i64> {
        s.coefficients().iter().map(|x| i64::try_from(x).unwrap()).collect()
    }

    #[test]
    fn hilbert_examples() {
        let s = quadratic_hilbert(2, 2, 4, HilbertMode::Manifold).unwrap();
        assert_eq!(ints(&s), vec![1, 2, 3, 4, 5]);
        let s = quadratic_hilbert(3, 2, 4, HilbertMode::Manifold).unwrap();
        assert_eq!(ints(&s), vec![1, 3, 8, 21, 55]);
        let s = quadratic_hilbert(2, 4, 12, HilbertMode::Manifold).unwrap();
        assert_eq!(s.coefficient(6), BigInt::from(3));
        assert_eq!(ints(&quadratic_hilbert(5, 4, 0, HilbertMode::Manifold).unwrap()), vec![1]);
    }

    #[test]
    fn second_coefficient_is_k_squared_minus_one() {
        for k in 1..8u64 {
            for n in [2u32, 4, 6, 8] {
                let s = quadratic_hilbert(k, n, 2 * (n as usize - 1), HilbertMode::Manifold).unwrap();
                assert_eq!(s.coefficient(2 * (n as usize - 1)), BigInt::from(k * k - 1));
            }
        }
    }

    #[test]
    fn recurrence_oracle() {
        let s = quadratic_hilbert(3, 2, 20, HilbertMode::Manifold).unwrap();
        let c = s.coefficients();
        for m in 2..=20 {
            assert_eq!(c[m], BigInt::from(3) * &c[m - 1] - &c[m - 2]);
        }
    }

    #[test]
    fn rank_examples() {
        let s = quadratic_hilbert(2, 2, 3, HilbertMode::Manifold).unwrap();
        let l = lie_ranks_from_series(&s, 3).unwrap();
        assert_eq!(l, vec![0, 2, 2, 0].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let free = PowerSeries::from_i64(&[1, -2, 0, 0]).inverse().unwrap();
        let f = lie_ranks_from_series(&free, 3).unwrap();
        assert_eq!(f, vec![0, 2, 3, 2].into_iter().map(BigInt::from).collect::<Vec<_>>());
        let one = PowerSeries::one(6);
        assert!(lie_ranks_from_series(&one, 6).unwrap().iter().all(Zero::is_zero));
        let bad = PowerSeries::from_i64(&[1, 0, -1]);
        assert!(lie_ranks_from_series(&bad, 2).is_err());
    }

    #[test]
    fn factorization_examples() {
        assert!(verify_factorization(2, 2, 20).unwrap().ok());
        assert!(verify_factorization(5, 4, 30).unwrap().ok());
        let r = verify_factorization(1, 2, 10).unwrap();
        assert!(r.polynomial_identity);
    }

    #[test]
    fn product_formula_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let order = rng.gen_range(1..12);
            let mut ranks = vec![BigInt::zero()];
            ranks.extend((1..=order).map(|_| BigInt::from(rng.gen_range(0..4))));
            let s = product_formula(&ranks, order);
            assert_eq!(lie_ranks_from_series(&s, order).unwrap(), ranks);
        }
    }
}
