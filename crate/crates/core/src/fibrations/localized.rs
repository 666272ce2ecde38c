use num_bigint::BigInt;
use num_integer::Integer;

use super::assemble::{assemble, standard_mus, Choice};
use super::attaching::AttachingMap;
use super::certificate::{BetaMethod, FibrationCertificate};
use crate::error::{Error, Result};
use crate::forms::{extend_to_basis, find_primitive_divisible, search_primitive, BasisChange};
use crate::ring::PrimeSet;

const SEARCH_BOUND: i64 = 12;

fn show(v: &[BigInt]) -> String {
    let s: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", s.join(", "))
}

/// Over `Z[1/primes]` with `2 ∈ primes`: `β_i = Σ_{j<k} g_ij[α_j,α_k] + ½g_ik[α_k,α_k]`
/// after a basis change making `3 | g_kk` where one exists.
pub fn construct_localized(m: &AttachingMap, primes: &PrimeSet) -> Result<FibrationCertificate> {
    if !primes.contains_prime(2) {
        return Err(Error::Precondition("the localized construction needs 2 inverted".into()));
    }
    let k = m.k();
    let g = &m.g;
    let mut transcript = Vec::new();
    let kk = g.entry(k - 1, k - 1);
    let substitution = if kk.is_multiple_of(&BigInt::from(3)) {
        transcript.push(format!("3 already divides g_kk = {kk}"));
        BasisChange::identity(k)
    } else {
        let found = if k >= 3 {
            let p = find_primitive_divisible(g, 3, SEARCH_BOUND)?;
            transcript.push(format!("primitive v = {} with 3 | g(v,v), via {:?}", show(&p.vector), p.path));
            Some(p.vector)
        } else {
            let v = search_primitive(g, SEARCH_BOUND, |_, q| q % 3 == 0)?;
            match &v {
                Some(v) => transcript.push(format!("rank 2: v = {} with 3 | g(v,v)", show(v))),
                None => transcript.push(format!("rank 2: no primitive v with 3 | g(v,v) up to {SEARCH_BOUND}")),
            }
            v
        };
        match found {
            Some(v) => extend_to_basis(&v)?,
            None if primes.contains_prime(3) || m.n == 2 => BasisChange::identity(k),
            None => {
                return Err(Error::Data(format!(
                    "rank 2 form {} has no primitive vector with 3 | g(v,v), n = {} and 3 is not inverted",
                    g.matrix(),
                    m.n
                )))
            }
        }
    };
    assemble(Choice {
        input: AttachingMap::new(m.n, m.g.clone())?,
        primes: primes.clone(),
        stable_model: None,
        substitution,
        transcript,
        method: BetaMethod::Localized,
        mus: standard_mus(k),
        betas: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::SymForm;

    fn cert(n: u32, rows: &[&[i64]], primes: &[u64]) -> Result<FibrationCertificate> {
        let m = AttachingMap::new(n, SymForm::from_i64(rows).unwrap()).unwrap();
        construct_localized(&m, &PrimeSet::new(primes.iter().copied()).unwrap())
    }

    #[test]
    fn hyperbolic_n6() {
        let c = cert(6, &[&[0, 1], &[1, 0]], &[2]).unwrap();
        assert_eq!(c.substitution, BasisChange::identity(2));
        assert_eq!(c.betas.betas, vec!["1/2 [a2, a2]"]);
        c.verify().unwrap();
    }

    #[test]
    fn identity_rank_three() {
        let c = cert(4, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[2, 3]).unwrap();
        assert!(c.transformed.g.entry(2, 2).is_multiple_of(&BigInt::from(3)));
        c.verify().unwrap();
    }

    #[test]
    fn odd_indefinite_plane() {
        let c = cert(4, &[&[1, 0], &[0, -1]], &[2]).unwrap();
        assert!(c.transformed.g.entry(1, 1).is_multiple_of(&BigInt::from(3)));
        c.verify().unwrap();
    }

    #[test]
    fn definite_plane() {
        assert!(matches!(cert(6, &[&[1, 0], &[0, 1]], &[2]), Err(Error::Data(_))));
        cert(2, &[&[1, 0], &[0, 1]], &[2]).unwrap().verify().unwrap();
        cert(6, &[&[1, 0], &[0, 1]], &[2, 3]).unwrap().verify().unwrap();
    }
}
