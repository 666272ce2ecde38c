use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::assemble::{assemble, standard_mus, Choice};
use super::attaching::{AttachingMap, StableModel};
use super::certificate::{BetaMethod, FibrationCertificate};
use super::n2::vec_text;
use crate::error::{Error, Result};
use crate::forms::{extend_to_basis, find_primitive_divisible, is_primitive, search_primitive, BasisChange, SymForm};
use crate::ring::{integer_kernel, IntMatrix, PrimeSet};

const SEARCH_BOUND: i64 = 12;

/// Integer lifts of `c mod m` with no common divisor; `c` has at least two entries
/// and `gcd(c, m) = 1`.
fn coprime_lift(c: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = c.iter().map(|x| x.mod_floor(m)).collect();
    if out[1..].iter().all(|x| x.is_zero()) {
        out[1] = m.clone();
    }
    let h = out[1..].iter().fold(BigInt::zero(), |a, b| a.gcd(b));
    let mut u = BigInt::zero();
    while !(&out[0] + &u * m).gcd(&h).is_one() {
        u += 1;
    }
    out[0] += u * m;
    out
}

/// Embeds a block change acting on indices `from..k` into the identity.
fn embed(k: usize, from: usize, block: &BasisChange) -> Result<BasisChange> {
    let mut m = IntMatrix::identity(k);
    for i in from..k {
        for j in from..k {
            m[(i, j)] = block.matrix()[(i - from, j - from)].clone();
        }
    }
    BasisChange::new(m)
}

/// A change whose first new class is `Σ c_i α_i`, i.e. `(S⁻¹)ᵗ` has first column `c`.
fn first_class(c: &[BigInt]) -> Result<BasisChange> {
    let p = extend_to_basis(c)?;
    let k = c.len();
    let mut t = IntMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            t[(i, j)] = p.matrix()[(i, (j + k - 1) % k)].clone();
        }
    }
    BasisChange::new(t.unimodular_inverse()?.transpose())
}

/// A basis of `{v : Σ v_i x_i = 0}`, size-reduced, as columns.
fn stable_kernel(x: &[Vec<BigInt>], model: &StableModel) -> Result<IntMatrix> {
    let (k, r) = (x.len(), model.r());
    let mut c = IntMatrix::zeros(r, k + r);
    for t in 0..r {
        for (i, xi) in x.iter().enumerate() {
            c[(t, i)] = xi[t].clone();
        }
        c[(t, k + t)] = BigInt::from(model.factors[t]);
    }
    let ker = integer_kernel(&c);
    let mut cols: Vec<Vec<BigInt>> = (0..ker.cols()).map(|j| ker.column(j)[..k].to_vec()).collect();
    let dot = |a: &[BigInt], b: &[BigInt]| -> BigInt { a.iter().zip(b).map(|(p, q)| p * q).sum() };
    loop {
        let mut changed = false;
        for i in 0..k {
            for j in 0..k {
                let (nj, ij) = (dot(&cols[j], &cols[j]), dot(&cols[i], &cols[j]));
                if i == j || nj.is_zero() {
                    continue;
                }
                let q: BigInt = (BigInt::from(2) * &ij + &nj).div_floor(&(BigInt::from(2) * &nj));
                if !q.is_zero() {
                    let bj = cols[j].clone();
                    for (a, b) in cols[i].iter_mut().zip(&bj) {
                        *a -= &q * b;
                    }
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    IntMatrix::from_columns(&cols)
}

fn coords(m: &AttachingMap, model: &StableModel, s: &BasisChange) -> Result<Vec<Vec<BigInt>>> {
    Ok(m.substitute_linear(model, s)?.stable)
}

/// After inverting 2: a basis with `Σω'_k = 0` and `3 | g'_kk`, then `β` with the
/// `−α_k∘ω_i` correction.
///
/// Each cyclic summand is cleared from all but one class by the gcd of its
/// coordinates, so classes `r+1, …, k` end up stably trivial.
pub fn construct_large_k(m: &AttachingMap, model: &StableModel) -> Result<FibrationCertificate> {
    let k = m.k();
    let r = model.r();
    if k <= r {
        return Err(Error::Precondition(format!("rank {k} does not exceed the {r} cyclic summands")));
    }
    if !m.n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("n = {} is odd", m.n)));
    }
    m.g.require_unimodular()?;
    let x = m.stable_or_zero(model)?;
    let input = AttachingMap { n: m.n, g: m.g.clone(), torsion: Vec::new(), stable: x };
    let mut transcript = Vec::new();
    let mut s = BasisChange::identity(k);
    for (t, &a) in model.factors.iter().enumerate() {
        let a = BigInt::from(a);
        let y: Vec<BigInt> = coords(&input, model, &s)?[t..].iter().map(|v| v[t].clone()).collect();
        let d = y.iter().fold(a.clone(), |acc, v| acc.gcd(v));
        if d == a {
            transcript.push(format!("summand Z/{a}: classes {}..{k} already trivial", t + 1));
            continue;
        }
        let q = &a / &d;
        let c: Vec<BigInt> = y.iter().map(|v| v / &d).collect();
        let c = coprime_lift(&c, &q);
        transcript.push(format!("summand Z/{a}: gcd {d}, class {} becomes sum c_i a_i with c = {}", t + 1, vec_text(&c)));
        s = s.then(&embed(k, t, &first_class(&c)?)?);
    }
    let g = m.g.transform(&s);
    let kk = g.entry(k - 1, k - 1).clone();
    let last = if kk.is_multiple_of(&BigInt::from(3)) {
        transcript.push(format!("3 already divides g_kk = {kk}"));
        None
    } else if k - r >= 3 {
        let idx: Vec<usize> = (r..k).collect();
        let block = SymForm::new(g.matrix().submatrix(&idx, &idx))?;
        // The block need not be unimodular; an isotropic vector mod 3 lifts with entries in {-1, 0, 1}.
        let v = if block.is_unimodular() {
            let p = find_primitive_divisible(&block, 3, SEARCH_BOUND)?;
            transcript.push(format!("classes {}..{k}: primitive v = {} via {:?}", r + 1, vec_text(&p.vector), p.path));
            p.vector
        } else {
            let v = search_primitive(&block, 1, |_, q| q % 3 == 0)?
                .ok_or_else(|| Error::NoConstruction(format!("classes {}..{k}: no isotropic vector mod 3", r + 1)))?;
            transcript.push(format!("classes {}..{k}: v = {} with 3 | g(v,v)", r + 1, vec_text(&v)));
            v
        };
        Some(embed(k, r, &extend_to_basis(&v)?)?)
    } else {
        let basis = stable_kernel(&coords(&input, model, &s)?, model)?;
        let gram = SymForm::new(g.matrix().congruence(&basis))?;
        let image = |c: &[i64]| basis.mul_vec(&c.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        let c = search_primitive(&gram, SEARCH_BOUND, |c, q| q % 3 == 0 && is_primitive(&image(c)))?;
        match c {
            Some(c) => {
                let c: Vec<i64> = c.iter().map(|x| x.try_into().expect("small coefficients")).collect();
                let v = image(&c);
                transcript.push(format!("last class v = {} with 3 | g(v,v) and stable image zero", vec_text(&v)));
                Some(extend_to_basis(&v)?)
            }
            None => {
                transcript.push(format!(
                    "no primitive v = B c with |c_i| <= {SEARCH_BOUND}, 3 | g(v,v) and stable image zero"
                ));
                return Err(Error::NoConstruction(transcript.join("; ")));
            }
        }
    };
    if let Some(p) = last {
        s = s.then(&p);
    }
    assemble(Choice {
        input,
        primes: PrimeSet::new([2])?,
        stable_model: Some(model.clone()),
        substitution: s,
        transcript,
        method: BetaMethod::LargeK,
        mus: standard_mus(k),
        betas: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{random_form, SeedForm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn map(rows: &[&[i64]], x: &[&[i64]]) -> AttachingMap {
        let mut m = AttachingMap::new(10, SymForm::from_i64(rows).unwrap()).unwrap();
        m.stable = x.iter().map(|v| big(v)).collect();
        m
    }

    #[test]
    fn cyclic_first_class_is_gcd_quotient() {
        let model = StableModel::new(vec![15]).unwrap();
        let c = construct_large_k(&map(&[&[0, 1], &[1, 0]], &[&[6], &[9]]), &model).unwrap();
        // gcd 3, c = (2, 3).
        assert_eq!(c.new_classes.column(0), big(&[2, 3]));
        assert!(c.transformed.stable[1][0].is_zero());
        c.verify().unwrap();
    }

    #[test]
    fn zero_coordinates_only_arrange_three() {
        let model = StableModel::new(vec![3, 9]).unwrap();
        let m = map(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[&[0, 0], &[0, 0], &[0, 0]]);
        let c = construct_large_k(&m, &model).unwrap();
        assert!(c.transformed.g.entry(2, 2).is_multiple_of(&BigInt::from(3)));
        c.verify().unwrap();
    }

    #[test]
    fn rank_must_exceed_summands() {
        let model = StableModel::new(vec![3, 3]).unwrap();
        let m = map(&[&[0, 1], &[1, 0]], &[&[1, 0], &[0, 1]]);
        assert!(matches!(construct_large_k(&m, &model), Err(Error::Precondition(_))));
    }

    #[test]
    fn three_in_the_model_can_obstruct_rank_two() {
        // s.x = 0 mod 3 forces s_1 = 0 mod 3, and then g(s,s) = -s_2^2 mod 3.
        let model = StableModel::new(vec![3]).unwrap();
        let m = map(&[&[-6, 5], &[5, -4]], &[&[1], &[0]]);
        assert!(matches!(construct_large_k(&m, &model), Err(Error::NoConstruction(_))));
        let m = map(&[&[-6, 5], &[5, -4]], &[&[0], &[1]]);
        construct_large_k(&m, &model).unwrap().verify().unwrap();
    }

    #[test]
    fn coprime_lift_of_a_unit_alone() {
        assert_eq!(coprime_lift(&big(&[4, 0]), &BigInt::from(5)), big(&[4, 5]));
        let c = coprime_lift(&big(&[2, 4]), &BigInt::from(9));
        assert!(c[0].gcd(&c[1]).is_one() && (&c[0] - 2) % 9 == BigInt::zero());
    }

    #[test]
    fn random_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for factors in [vec![5], vec![7], vec![5, 35], vec![5, 35, 385]] {
            let model = StableModel::new(factors.clone()).unwrap();
            let r = model.r();
            for k in r + 1..=r + 3 {
                for _ in 0..5 {
                    let seed = if k % 2 == 0 { SeedForm::Hyperbolic } else { SeedForm::Mixed };
                    let mut m = AttachingMap::new(12, random_form(&mut rng, seed, k)).unwrap();
                    m.stable = (0..k)
                        .map(|_| factors.iter().map(|&a| BigInt::from(rng.gen_range(0..a as i64))).collect())
                        .collect();
                    let c = construct_large_k(&m, &model).unwrap();
                    assert!(c.transformed.stable[k - 1].iter().all(|v| v.is_zero()));
                    assert!(c.transformed.g.entry(k - 1, k - 1).is_multiple_of(&BigInt::from(3)));
                    assert!(c.fiber.ok());
                    c.verify().unwrap();
                }
            }
        }
    }
}
