use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::assemble::{assemble, standard_mus, Choice};
use super::attaching::AttachingMap;
use super::certificate::{BetaMethod, FibrationCertificate};
use super::n2::{at, br, push, vec_text};
use super::search::{bounded_search, SearchBounds};
use crate::error::{Error, Result};
use crate::forms::{characteristic_basis, characteristic_vector, extend_to_basis, search_primitive, BasisChange, SymForm};
use crate::homotopy::{Expr, SphereTable};
use crate::ring::{IntMatrix, PrimeSet};

const SEARCH_BOUND: i64 = 12;

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

fn md(x: &BigInt, m: i64) -> i64 {
    i64::try_from(x.mod_floor(&big(m))).expect("small residue")
}

/// The torsion coordinate of the last class after a basis change with last
/// column `s`: `lᵗs + (sᵗgs − diag(g)ᵗs)/2`.
pub(crate) fn last_torsion(g: &SymForm, l: &[BigInt], s: &[BigInt]) -> BigInt {
    let mut t = g.norm(s);
    let mut out = BigInt::zero();
    for (i, si) in s.iter().enumerate() {
        t -= g.entry(i, i) * si;
        out += &l[i] * si;
    }
    out + t / 2
}

pub fn construct_n4(m: &AttachingMap) -> Result<FibrationCertificate> {
    if m.n != 4 {
        return Err(Error::Precondition(format!("n = {} is not 4", m.n)));
    }
    let table = SphereTable::builtin("n4", None)?;
    let input = m.reduced(&table)?;
    if input.g.is_even() {
        if input.k() == 2 {
            construct_lookup(&table, input)
        } else {
            construct_even(&table, input)
        }
    } else {
        construct_odd(&table, input)
    }
}

/// `r` for the odd case, if `(l_k, g_kk)` admits one.
fn odd_r(lk: &BigInt, gkk: &BigInt) -> Option<u32> {
    if md(lk, 6) == 0 {
        return Some(0);
    }
    if md(lk, 3) != 0 || md(gkk, 4) == 0 {
        return None;
    }
    (0..12u32).find(|&r| {
        let x: BigInt = 4 * lk - 2 * gkk * BigInt::from(r);
        x.is_multiple_of(&big(24))
    })
}

/// Last columns `±(2m+1)e_K + Σ 2c_i e_i` with at most two extra indices,
/// in order of growing support.
fn odd_candidates(k: usize) -> impl Iterator<Item = Vec<BigInt>> {
    let last = [1i64, -1, 3, -3, 5, -5];
    let even: Vec<i64> = (-6..=6).filter(|&c| c != 0).map(|c| 2 * c).collect();
    let mut supports: Vec<Vec<usize>> = vec![vec![]];
    supports.extend((0..k - 1).map(|i| vec![i]));
    for i in 0..k - 1 {
        for j in i + 1..k - 1 {
            supports.push(vec![i, j]);
        }
    }
    supports.into_iter().flat_map(move |sup| {
        let mut out = Vec::new();
        let n = even.len().pow(sup.len() as u32);
        for &lk in &last {
            for code in 0..n {
                let mut v = vec![BigInt::zero(); k];
                v[k - 1] = big(lk);
                let mut c = code;
                for &i in &sup {
                    v[i] = big(even[c % even.len()]);
                    c /= even.len();
                }
                out.push(v);
            }
        }
        out
    })
}

fn odd_betas(t: &AttachingMap, r: u32) -> Vec<String> {
    let k = t.k();
    let g = &t.g;
    let l = t.torsion_or_zero();
    let c = BigInt::one() - BigInt::from(r);
    let kk = k - 1;
    let mut betas = Vec::with_capacity(kk);
    for i in 0..kk {
        let mut terms = Vec::new();
        for j in 0..kk {
            push(&mut terms, g.entry(i, j), br(j, kk));
        }
        push(&mut terms, g.entry(i, kk), at(kk, "nu"));
        let half = (g.entry(i, i) + g.entry(i, kk)) / 2;
        push(&mut terms, &(half - &l[i]), at(kk, "nup"));
        for j in i + 1..k {
            push(&mut terms, &(-&c * g.entry(i, j)), at(j, "nup"));
        }
        push(&mut terms, &(&c * g.entry(i, i)), at(i, "nu"));
        push(&mut terms, &(-&c * &l[i]), br(i, i));
        betas.push(Expr::Sum(terms).to_string());
    }
    betas
}

fn construct_odd(table: &SphereTable, input: AttachingMap) -> Result<FibrationCertificate> {
    let k = input.k();
    let w = characteristic_vector(&input.g)?;
    let s0 = characteristic_basis(&input.g)?;
    let t0 = input.substitute_table(table, &s0)?;
    let l0 = t0.torsion_or_zero();
    let mut transcript = vec![
        format!("characteristic vector w = {}", vec_text(&w)),
        format!("after the characteristic basis: g_kk = {}, l_k = {}", t0.g.entry(k - 1, k - 1), l0[k - 1]),
    ];
    let found = odd_candidates(k).find_map(|u| {
        if !crate::forms::is_primitive(&u) {
            return None;
        }
        let lk = last_torsion(&t0.g, &l0, &u);
        odd_r(&lk, &t0.g.norm(&u)).map(|r| (u, r))
    });
    let Some((u, r)) = found else {
        transcript.push("no last class with 3 | l_k and (6 | l_k or 4 does not divide g_kk) found".into());
        return construct_searched(table, input, transcript);
    };
    transcript.push(format!("last class {} in the characteristic basis, r = {r}", vec_text(&u)));
    let substitution = s0.then(&extend_to_basis(&u)?);
    let t = input.substitute_table(table, &substitution)?;
    let betas = odd_betas(&t, r);
    assemble(Choice {
        input,
        primes: PrimeSet::empty(),
        stable_model: None,
        substitution,
        transcript,
        method: BetaMethod::N4Odd { r },
        mus: standard_mus(k),
        betas,
    })
}

/// `σ_i = l_i − g_ii/2 (mod 12)`, the `ν'_i` coefficients once `g_ii ν_i` is
/// written through `[α_i,α_i] = 2ν_i + ν'_i`. Linear in the basis.
fn even_sigma(m: &AttachingMap) -> Vec<i64> {
    let l = m.torsion_or_zero();
    (0..m.k()).map(|i| md(&(&l[i] - m.g.entry(i, i) / 2), 12)).collect()
}

fn dot12(s: &[i64], v: &[i64]) -> i64 {
    s.iter().zip(v).map(|(x, y)| x * y).sum::<i64>().rem_euclid(12)
}

fn sub_form(g: &SymForm, idx: &[usize]) -> Result<SymForm> {
    SymForm::new(g.matrix().submatrix(idx, idx))
}

/// A basis whose `σ` is `d·e_k`, so vectors supported on the first `k − 1`
/// coordinates pair to zero with it.
fn tau_step(sigma: &[i64]) -> Result<BasisChange> {
    let d = sigma.iter().fold(0i64, |d, x| d.gcd(x));
    if d == 0 {
        return Ok(BasisChange::identity(sigma.len()));
    }
    let c: Vec<BigInt> = sigma.iter().map(|x| big(x / d)).collect();
    let p = extend_to_basis(&c)?;
    BasisChange::new(p.inverse().matrix().transpose())
}

fn even_last_class(g: &SymForm, sigma: &[i64], transcript: &mut Vec<String>) -> Result<Option<BasisChange>> {
    let k = g.rank();
    if k <= 5 {
        transcript.push("search for s with 24 | <s,s> and sigma.s = 0 mod 12".into());
        let s = search_primitive(g, SEARCH_BOUND, |v, q| q % 24 == 0 && dot12(sigma, v) == 0)?;
        return s.map(|s| extend_to_basis(&s)).transpose();
    }
    let st = tau_step(sigma)?;
    let gt = g.transform(&st);
    let free = if sigma.iter().all(|&x| x == 0) { k } else { k - 1 };
    transcript.push(format!("tau step leaves {free} coordinates orthogonal to sigma"));
    let width = free.min(6);
    for start in 0..=free - width {
        let idx: Vec<usize> = (start..start + width).collect();
        if let Some(v) = search_primitive(&sub_form(&gt, &idx)?, 3, |_, q| q % 24 == 0)? {
            let mut s = vec![BigInt::zero(); k];
            for (&i, x) in idx.iter().zip(v) {
                s[i] = x;
            }
            transcript.push(format!("24 | <v,v> for v = {} after the tau step", vec_text(&s)));
            return Ok(Some(st.then(&extend_to_basis(&s)?)));
        }
    }
    Ok(None)
}

fn even_betas(t: &AttachingMap) -> Vec<String> {
    let k = t.k();
    let g = &t.g;
    let l = t.torsion_or_zero();
    let kk = k - 1;
    let mut betas = Vec::with_capacity(kk);
    for i in 0..kk {
        let mut terms = Vec::new();
        for j in 0..kk {
            push(&mut terms, g.entry(i, j), br(j, kk));
        }
        for j in 0..i {
            push(&mut terms, g.entry(i, j), br(i, j));
        }
        for j in i + 1..k {
            push(&mut terms, g.entry(i, j), at(j, "nu"));
        }
        let half = g.entry(i, i) / 2;
        push(&mut terms, &(&half - &l[i]), at(kk, "nup"));
        push(&mut terms, &half, at(i, "nu"));
        push(&mut terms, &l[i], br(i, i));
        betas.push(Expr::Sum(terms).to_string());
    }
    betas
}

fn construct_even(table: &SphereTable, input: AttachingMap) -> Result<FibrationCertificate> {
    let k = input.k();
    let sigma = even_sigma(&input);
    let mut transcript = vec![format!("sigma = l - g_ii/2 mod 12 = {sigma:?}")];
    let substitution = match even_last_class(&input.g, &sigma, &mut transcript)? {
        Some(s) => s,
        None => {
            transcript.push("no admissible last class within the search bound".into());
            return Err(Error::NoConstruction(transcript.join("; ")));
        }
    };
    let t = input.substitute_table(table, &substitution)?;
    let betas = even_betas(&t);
    assemble(Choice {
        input,
        primes: PrimeSet::empty(),
        stable_model: None,
        substitution,
        transcript,
        method: BetaMethod::N4Even,
        mus: standard_mus(k),
        betas,
    })
}

const PAIR_SEARCH: SearchBounds = SearchBounds { mu: 6, delta: 2 };

/// Rank 2 fallback: the first `(μ_1, δ_1)` of the lattice search.
fn construct_searched(
    table: &SphereTable,
    input: AttachingMap,
    mut transcript: Vec<String>,
) -> Result<FibrationCertificate> {
    if input.k() != 2 {
        return Err(Error::NoConstruction(transcript.join("; ")));
    }
    let report = bounded_search(table, &input.expr(table)?, PAIR_SEARCH)?;
    let Some(hit) = report.hits.first() else {
        let gcds: std::collections::BTreeSet<&BigInt> = report.obstructions.iter().map(|o| &o.gcd).collect();
        let gcds: Vec<String> = gcds.iter().map(|g| g.to_string()).collect();
        transcript.push(format!(
            "pair search: all {} classes mu with |mu_i| <= {} are obstructed (determinant gcds {{{}}})",
            report.mus_checked,
            PAIR_SEARCH.mu,
            gcds.join(", ")
        ));
        return Err(Error::NoConstruction(transcript.join("; ")));
    };
    transcript.push(format!("pair search: mu_1 = {}, delta_1 = {}", vec_text(&hit.mu), hit.delta));
    assemble(Choice {
        input,
        primes: PrimeSet::empty(),
        stable_model: None,
        substitution: BasisChange::identity(2),
        transcript,
        method: BetaMethod::N4Search,
        mus: vec![hit.mu.clone()],
        betas: vec![hit.delta.clone()],
    })
}

/// A basis in which an even unimodular rank-2 form is `[[0,1],[1,0]]`.
fn hyperbolic_basis(g: &SymForm) -> Result<BasisChange> {
    let e = search_primitive(g, SEARCH_BOUND, |_, q| q == 0)?
        .ok_or_else(|| Error::Data("no isotropic vector in an even rank-2 form".into()))?;
    let r = extend_to_basis(&g.matrix().mul_vec(&e))?.inverse();
    let f = r.matrix().row(1).to_vec();
    let h = g.norm(&f) / 2;
    let f: Vec<BigInt> = f.iter().zip(&e).map(|(x, y)| x - &h * y).collect();
    BasisChange::new(IntMatrix::from_columns(&[e, f])?)
}

/// `(l_1 mod 6, l_2 mod m, l_2 residue, μ_1 = c α_1 + α_2, δ_1)` for
/// `L = [α_1,α_2] + l_1 ν'_1 + l_2 ν'_2`.
const HYPERBOLIC_ROWS: [(i64, i64, i64, i64, &str); 8] = [
    (0, 3, 0, 0, "a1.nu"),
    (3, 3, 0, 6, "a1.nu"),
    (0, 3, 2, 4, "63 a1.nu + 4 a2.nu"),
    (3, 3, 2, 10, "399 a1.nu + 4 a2.nu"),
    (1, 3, 1, 2, "175 a1.nu + 44 a2.nu"),
    (4, 6, 4, 8, "257 a1.nu + 4 a2.nu"),
    (1, 3, 2, 10, "401 a1.nu + 4 a2.nu - a1.nup"),
    (4, 3, 2, 4, "127 a1.nu + 8 a2.nu + a1.nup"),
];

fn construct_lookup(table: &SphereTable, input: AttachingMap) -> Result<FibrationCertificate> {
    let s0 = hyperbolic_basis(&input.g)?;
    let mut transcript = Vec::new();
    let symmetries = [
        ("identity", [[1, 0], [0, 1]]),
        ("swap", [[0, 1], [1, 0]]),
        ("negate", [[-1, 0], [0, -1]]),
        ("negate and swap", [[0, -1], [-1, 0]]),
    ];
    for (name, m) in symmetries {
        let sym = BasisChange::new(IntMatrix::from_i64(&[&m[0], &m[1]]))?;
        let substitution = s0.then(&sym);
        let t = input.substitute_table(table, &substitution)?;
        let l = t.torsion_or_zero();
        let (l1, l2) = (md(&l[0], 6), &l[1]);
        for &(r1, m2, r2, c, delta) in &HYPERBOLIC_ROWS {
            if l1 != r1 || md(l2, m2) != r2 {
                continue;
            }
            transcript.push(format!("{name}: l = ({}, {}), mu_1 = {c} a1 + a2, delta_1 = {delta}", l[0], l[1]));
            let choice = Choice {
                input: input.clone(),
                primes: PrimeSet::empty(),
                stable_model: None,
                substitution: substitution.clone(),
                transcript: transcript.clone(),
                method: BetaMethod::N4Lookup,
                mus: vec![vec![big(c), BigInt::one()]],
                betas: vec![delta.to_string()],
            };
            match assemble(choice) {
                Err(Error::NoConstruction(why)) => transcript.push(format!("rejected: {why}")),
                other => return other,
            }
        }
        transcript.push(format!("{name}: l = ({}, {}) matches no row", l[0], l[1]));
    }
    Err(Error::NoConstruction(transcript.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::{vector_expr, HiltonVector, Normalizer, Strategy, Stratum};

    fn map(rows: &[&[i64]], l: &[i64]) -> AttachingMap {
        AttachingMap::new(4, SymForm::from_i64(rows).unwrap())
            .unwrap()
            .with_torsion(l.iter().map(|&x| big(x)).collect())
            .unwrap()
    }

    fn even_residual(m: &AttachingMap) -> HiltonVector {
        let t = SphereTable::builtin("n4", None).unwrap();
        let k = m.k();
        let mut nz = Normalizer::new(&t, k, Strategy::First);
        let l = vector_expr(&t, &m.normalized(&t).unwrap());
        let mut e: Vec<Expr> = even_betas(m)
            .iter()
            .enumerate()
            .map(|(i, b)| Expr::bracket(Expr::Gen(i), Expr::parse(b).unwrap()))
            .collect();
        e.push(Expr::bracket(l.clone(), Expr::Gen(k - 1)));
        e.push(-Expr::compose(l, "nu7"));
        nz.normalize_in(&Expr::Sum(e), Stratum::High).unwrap()
    }

    fn odd_forms() -> Vec<SymForm> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let mut out = vec![SymForm::from_i64(&[&[1, 0], &[0, -1]]).unwrap()];
        for k in 3..=5 {
            for seed in [crate::forms::SeedForm::Identity, crate::forms::SeedForm::OddIndefinite] {
                out.push(crate::forms::random_form(&mut rng, seed, k));
            }
        }
        out
    }

    #[test]
    fn last_torsion_matches_substitution() {
        let t = SphereTable::builtin("n4", None).unwrap();
        let m = map(&[&[1, 1, 0], &[1, 2, 1], &[0, 1, 2]], &[5, 7, 2]);
        for cols in [[[1, 0, 0], [0, 1, 0], [2, -3, 1]], [[0, 1, 0], [1, 0, 0], [5, 1, 1]]] {
            let s = BasisChange::new(IntMatrix::from_columns(&cols.map(|c| c.map(big).to_vec())).unwrap()).unwrap();
            let lk = m.substitute_table(&t, &s).unwrap().torsion_or_zero()[2].clone();
            assert_eq!(lk, last_torsion(&m.g, &m.torsion_or_zero(), &s.column(2)).mod_floor(&big(12)));
        }
    }

    #[test]
    fn odd_forms_with_torsion() {
        for (n, g) in odd_forms().into_iter().enumerate() {
            let l: Vec<i64> = (0..g.rank()).map(|i| (5 * n as i64 + 7 * i as i64) % 12).collect();
            let m = AttachingMap::new(4, g).unwrap().with_torsion(l.iter().map(|&x| big(x)).collect()).unwrap();
            let c = construct_n4(&m).unwrap();
            assert!(matches!(c.betas.method, BetaMethod::N4Odd { .. }));
            c.verify().unwrap();
        }
    }

    #[test]
    fn definite_plane_obstruction() {
        // Mod 3 the last torsion coordinate is s1² + s2² for every basis.
        let err = construct_n4(&map(&[&[1, 0], &[0, 1]], &[2, 2])).unwrap_err();
        let Error::NoConstruction(why) = err else { panic!("{err:?}") };
        assert!(why.contains("are obstructed (determinant gcds {3, 6})"), "{why}");
        construct_n4(&map(&[&[1, 0], &[0, 1]], &[0, 2])).unwrap().verify().unwrap();
    }

    #[test]
    fn hyperbolic_lookup_row() {
        let c = construct_n4(&map(&[&[0, 1], &[1, 0]], &[1, 1])).unwrap();
        assert_eq!(c.betas.method, BetaMethod::N4Lookup);
        assert_eq!(c.betas.mus, vec![vec![big(2), big(1)]]);
        assert_eq!(c.betas.betas, vec!["175 a1.nu + 44 a2.nu".to_string()]);
        c.verify().unwrap();
    }

    #[test]
    fn hyperbolic_lookup_covers_every_class() {
        let g = SymForm::from_i64(&[&[2, 1], &[1, 0]]).unwrap();
        for l1 in 0..12 {
            for l2 in 0..12 {
                let m = AttachingMap::new(4, g.clone()).unwrap().with_torsion(vec![big(l1), big(l2)]).unwrap();
                construct_n4(&m).unwrap();
            }
        }
    }

    #[test]
    fn even_rank_four_and_six() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for k in [4, 6] {
            for _ in 0..3 {
                let g = crate::forms::random_form(&mut rng, crate::forms::SeedForm::Hyperbolic, k);
                let l = (0..k).map(|_| big(rng.gen_range(0..12))).collect();
                let c = construct_n4(&AttachingMap::new(4, g).unwrap().with_torsion(l).unwrap()).unwrap();
                assert_eq!(c.betas.method, BetaMethod::N4Even);
                c.verify().unwrap();
            }
        }
    }

    #[test]
    fn even_identity_without_basis_change() {
        // Any l_i for i < k and any even g with g_kk = 0 leave no residual.
        let h: &[&[i64]] = &[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]];
        for l in [[0, 0, 0, 0], [1, 0, 0, 0], [0, 5, 7, 0]] {
            assert!(even_residual(&map(h, &l)).is_zero());
        }
        for rows in [
            &[&[2, 1, 0, 0][..], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]][..],
            &[&[0, 1, 0, 0], &[1, 0, 1, 0], &[0, 1, 0, 1], &[0, 0, 1, 0]],
            &[&[0, 1, 0, 0], &[1, 2, 0, 0], &[0, 0, 2, 1], &[0, 0, 1, 0]],
        ] {
            assert!(even_residual(&map(rows, &[3, 1, 4, 0])).is_zero());
        }
    }
}
