use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite set of primes, stored strictly ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet {
    primes: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a prime set, sorting and deduplicating the input. Non-primes
    /// are rejected.
    pub fn new(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut v: Vec<u64> = primes.into_iter().collect();
        if let Some(bad) = v.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::Parse(format!("{bad} is not prime")));
        }
        v.sort_unstable();
        v.dedup();
        Ok(Self { primes: v })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn contains_prime(&self, p: u64) -> bool {
        self.primes.binary_search(&p).is_ok()
    }

    pub fn with_prime(&self, p: u64) -> Result<Self> {
        Self::new(self.primes.iter().copied().chain(std::iter::once(p)))
    }

    pub fn is_superset_of(&self, other: &PrimeSet) -> bool {
        other.primes.iter().all(|p| self.contains_prime(*p))
    }

    /// Strips every factor from `S` out of `x`.
    pub fn strip(&self, x: &BigInt) -> BigInt {
        let mut x = x.clone();
        if x.is_zero() {
            return x;
        }
        for &p in &self.primes {
            let p = BigInt::from(p);
            loop {
                let (q, r) = x.div_rem(&p);
                if r.is_zero() {
                    x = q;
                } else {
                    break;
                }
            }
        }
        x
    }

    /// True when the integer `x` is a unit of `Z[1/S]`.
    pub fn is_unit_integer(&self, x: &BigInt) -> bool {
        !x.is_zero() && self.strip(x).abs().is_one()
    }

    /// True when `q` lies in `Z[1/S]`.
    pub fn contains(&self, q: &LocalScalar) -> bool {
        self.strip(q.0.denom()).is_one()
    }

    /// True when `a` is invertible in `Z[1/S]`.
    pub fn is_unit(&self, a: &LocalScalar) -> bool {
        self.contains(a) && self.is_unit_integer(a.0.numer())
    }

    pub fn inverse(&self, a: &LocalScalar) -> Option<LocalScalar> {
        self.is_unit(a).then(|| LocalScalar(a.0.recip()))
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(p: PrimeSet) -> Self {
        p.primes
    }
}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.primes.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// An exact rational number, always kept in lowest terms with a positive
/// denominator. Membership in a particular `Z[1/S]` is checked against a
/// [`PrimeSet`]; ring operations never leave `Z[1/S]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocalScalar(BigRational);

impl LocalScalar {
    pub fn new(numerator: BigInt, denominator: BigInt) -> Self {
        LocalScalar(BigRational::new(numerator, denominator))
    }

    pub fn from_int(x: impl Into<BigInt>) -> Self {
        LocalScalar(BigRational::from_integer(x.into()))
    }

    pub fn zero() -> Self {
        LocalScalar(BigRational::zero())
    }

    pub fn one() -> Self {
        LocalScalar(BigRational::one())
    }

    pub fn half() -> Self {
        Self::new(BigInt::one(), BigInt::from(2))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numerator(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denominator(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }
}

impl From<i64> for LocalScalar {
    fn from(x: i64) -> Self {
        Self::from_int(x)
    }
}

impl From<BigInt> for LocalScalar {
    fn from(x: BigInt) -> Self {
        Self::from_int(x)
    }
}

impl From<BigRational> for LocalScalar {
    fn from(x: BigRational) -> Self {
        LocalScalar(x)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr for LocalScalar {
            type Output = LocalScalar;
            fn $m(self, rhs: LocalScalar) -> LocalScalar {
                LocalScalar(self.0.$m(rhs.0))
            }
        }
        impl<'a> $tr<&'a LocalScalar> for &'a LocalScalar {
            type Output = LocalScalar;
            fn $m(self, rhs: &'a LocalScalar) -> LocalScalar {
                LocalScalar((&self.0).$m(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for LocalScalar {
    type Output = LocalScalar;
    fn neg(self) -> LocalScalar {
        LocalScalar(-self.0)
    }
}

impl Neg for &LocalScalar {
    type Output = LocalScalar;
    fn neg(self) -> LocalScalar {
        LocalScalar(-&self.0)
    }
}

impl fmt::Display for LocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for LocalScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for LocalScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid scalar `{s}`"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                if d.is_zero() {
                    return Err(bad());
                }
                Ok(LocalScalar::new(n, d))
            }
            None => Ok(LocalScalar::from_int(s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for LocalScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LocalScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> LocalScalar {
        LocalScalar::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic_examples() {
        let s2 = PrimeSet::new([2]).unwrap();
        let half = q(1, 2);
        let sum = &half + &half;
        assert_eq!(sum, LocalScalar::one());
        assert!(s2.contains(&sum));
        assert_eq!(LocalScalar::from(3) * half.clone(), q(3, 2));
        let s23 = PrimeSet::new([3, 2]).unwrap();
        let p = q(1, 2) * q(2, 3);
        assert_eq!(p, q(1, 3));
        assert!(s23.contains(&p));
        assert!(!s2.contains(&p));
    }

    #[test]
    fn unit_examples() {
        let s2 = PrimeSet::new([2]).unwrap();
        assert!(s2.is_unit(&LocalScalar::from(2)));
        assert!(!s2.is_unit(&LocalScalar::from(3)));
        let s23 = PrimeSet::new([2, 3]).unwrap();
        assert!(s23.is_unit(&LocalScalar::from(-6)));
        assert!(!s23.is_unit(&LocalScalar::zero()));
        assert!(!PrimeSet::empty().is_unit(&q(1, 2)));
    }

    #[test]
    fn prime_set_normalizes() {
        let s = PrimeSet::new([5, 2, 5, 3]).unwrap();
        assert_eq!(s.primes(), &[2, 3, 5]);
        assert!(PrimeSet::new([4]).is_err());
        assert!(PrimeSet::new([1]).is_err());
    }

    #[test]
    fn parse_and_display() {
        let a: LocalScalar = "-6/4".parse().unwrap();
        assert_eq!(a.to_string(), "-3/2");
        assert!("1/0".parse::<LocalScalar>().is_err());
    }

    // Hand-rolled i128 fractions as an independent oracle.
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }

    fn reduce(n: i128, d: i128) -> (i128, i128) {
        let g = gcd(n, d);
        let (n, d) = (n / g, d / g);
        if d < 0 { (-n, -d) } else { (n, d) }
    }

    #[test]
    fn agrees_with_fraction_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let s = PrimeSet::new([2, 3, 5]).unwrap();
        let dens = [1i128, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 25, 27, 30];
        for _ in 0..10_000 {
            let (an, ad) = (rng.gen_range(-1000i128..1000), dens[rng.gen_range(0..dens.len())]);
            let (bn, bd) = (rng.gen_range(-1000i128..1000), dens[rng.gen_range(0..dens.len())]);
            let a = LocalScalar::new(an.into(), ad.into());
            let b = LocalScalar::new(bn.into(), bd.into());
            let cases = [
                (&a + &b, reduce(an * bd + bn * ad, ad * bd)),
                (&a - &b, reduce(an * bd - bn * ad, ad * bd)),
                (&a * &b, reduce(an * bn, ad * bd)),
            ];
            for (got, (n, d)) in cases {
                assert_eq!(got, LocalScalar::new(n.into(), d.into()));
                assert_eq!(got.numerator(), &BigInt::from(n));
                assert_eq!(got.denominator(), &BigInt::from(d));
                assert!(s.contains(&got));
            }
        }
    }
}
