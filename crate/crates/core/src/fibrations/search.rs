use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::hypotheses::verify_fiber_hypotheses;
use crate::error::{Error, Result};
use crate::homotopy::{
    attaching_data, hopf_generator, relation_matrix, rho, torsion_generator, vector_expr, Expr, HiltonVector,
    KernelSubgroup, Normalizer, Slot, SphereTable, Strategy, Stratum,
};
use crate::ring::{integer_kernel, smith_normal_form, IntMatrix, PrimeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    /// Largest `|μ_i|`.
    pub mu: i64,
    /// Largest `|δ_s|` tried before falling back to the lattice solution.
    pub delta: i64,
}

/// A pair with `[μ, δ]` in the kernel span and the loop-homology determinant `±1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    #[serde(with = "crate::ring::decimal::vec")]
    pub mu: Vec<BigInt>,
    pub delta: String,
    /// True when `δ` came from the lattice rather than the bounded box.
    pub from_lattice: bool,
}

/// A `μ` for which every admissible `δ` has determinant divisible by `gcd`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Obstruction {
    #[serde(with = "crate::ring::decimal::vec")]
    pub mu: Vec<BigInt>,
    #[serde(with = "crate::ring::decimal::one")]
    pub gcd: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub table: String,
    pub variant: String,
    pub attaching_map: String,
    pub bounds: SearchBounds,
    pub mus_checked: usize,
    pub hits: Vec<SearchHit>,
    pub obstructions: Vec<Obstruction>,
}

/// Primitive `μ ∈ Z²` with first nonzero coordinate positive, by max-norm shell.
fn primitive_pairs(bound: i64) -> Vec<[i64; 2]> {
    let mut out = Vec::new();
    for s in 1..=bound {
        for a in 0..=s {
            for b in -s..=s {
                if (a.abs() == s || b.abs() == s) && (a > 0 || b > 0) && a.gcd(&b) == 1 {
                    out.push([a, b]);
                }
            }
        }
    }
    out
}

fn egcd_combination(values: &[BigInt]) -> Vec<BigInt> {
    // Coefficients c with Σ c_j v_j = gcd(v).
    let mut c = vec![BigInt::zero(); values.len()];
    let mut g = BigInt::zero();
    for (j, v) in values.iter().enumerate() {
        let e = g.extended_gcd(v);
        for x in c.iter_mut().take(j) {
            *x *= &e.x;
        }
        c[j] = e.y;
        g = e.gcd;
    }
    c
}

/// `δ ∈ Λ` test through the Smith form of the lattice generators.
struct Lattice {
    u: Vec<Vec<BigInt>>,
    d: Vec<BigInt>,
}

impl Lattice {
    fn new(gens: &[Vec<BigInt>], dim: usize) -> Result<Self> {
        let b = if gens.is_empty() { IntMatrix::zeros(dim, 1) } else { IntMatrix::from_columns(gens)? };
        let snf = smith_normal_form(&b);
        Ok(Lattice { u: snf.u.to_rows(), d: snf.invariant_factors() })
    }

    fn contains(&self, x: &[BigInt]) -> bool {
        self.u.iter().enumerate().all(|(i, row)| {
            let y: BigInt = row.iter().zip(x).map(|(a, b)| a * b).sum();
            match self.d.get(i) {
                Some(d) if !d.is_zero() => y.is_multiple_of(d),
                _ => y.is_zero(),
            }
        })
    }
}

/// Vectors with `|x_s| ≤ bound` (torsion coordinates in `[0, order)`), by max-norm shell.
fn box_vectors(orders: &[u64], bound: i64) -> Vec<Vec<i64>> {
    let ranges: Vec<Vec<i64>> = orders
        .iter()
        .map(|&o| if o == 0 { (-bound..=bound).collect() } else { (0..=bound.min(o as i64 - 1)).collect() })
        .collect();
    let mut out = vec![vec![]];
    for r in &ranges {
        out = out.into_iter().flat_map(|v: Vec<i64>| r.iter().map(move |&x| [v.clone(), vec![x]].concat())).collect();
    }
    out.sort_by_key(|v| {
        let max = v.iter().map(|x| x.abs()).max().unwrap_or(0);
        (max, v.iter().filter(|&&x| x != 0).count(), v.iter().map(|x| x.abs()).sum::<i64>(), v.iter().map(|&x| x < 0).collect::<Vec<_>>())
    });
    out
}

/// Searches pairs `(μ, δ)` for rank 2: `[μ, δ]` lies in the span of `[L, α_i]`
/// and `L∘θ`, and `ρ(δ)` completes the loop-homology basis integrally.
///
/// For each `μ` the admissible `δ` form a lattice on which the determinant is
/// linear, so an obstruction (`gcd ≠ 1`) rules out every `δ`, not only small ones.
pub fn bounded_search(table: &SphereTable, l: &Expr, bounds: SearchBounds) -> Result<SearchReport> {
    let mut nz = Normalizer::new(table, 2, Strategy::First);
    let lv = nz.normalize_in(l, Stratum::Mid)?;
    let (g, _) = attaching_data(table, &lv)?;
    g.require_unimodular()?;
    let lexpr = vector_expr(table, &lv);
    let kernel = KernelSubgroup::new(table, 2, &lexpr)?;
    let go = relation_matrix(&kernel.basis, &kernel.generators);
    let mid = nz.mid_basis().clone();
    let units: Vec<HiltonVector> = (0..mid.len())
        .map(|s| {
            let c = (0..mid.len()).map(|t| if s == t { BigInt::one() } else { BigInt::zero() }).collect();
            HiltonVector::new(mid.clone(), c)
        })
        .collect::<Result<_>>()?;
    let slot_exprs: Vec<Expr> = units.iter().map(|u| vector_expr(table, u)).collect();
    let rhos = units.iter().map(|u| rho(table, u)).collect::<Result<Vec<_>>>()?;
    let boxed = box_vectors(mid.orders(), bounds.delta);
    let primes = PrimeSet::empty();
    let mut report = SearchReport {
        table: table.name.clone(),
        variant: table.variant.clone(),
        attaching_map: lexpr.to_string(),
        bounds,
        mus_checked: 0,
        hits: Vec::new(),
        obstructions: Vec::new(),
    };
    for mu in primitive_pairs(bounds.mu) {
        report.mus_checked += 1;
        let mu: Vec<BigInt> = mu.iter().map(|&x| BigInt::from(x)).collect();
        let mue = Expr::linear(&mu);
        let mut cols = Vec::with_capacity(mid.len() + go.cols());
        for e in &slot_exprs {
            cols.push(nz.normalize_in(&Expr::bracket(mue.clone(), e.clone()), Stratum::High)?.coords().to_vec());
        }
        cols.extend((0..go.cols()).map(|j| go.column(j)));
        let ker = integer_kernel(&IntMatrix::from_columns(&cols)?);
        let mut gens: Vec<Vec<BigInt>> = (0..ker.cols()).map(|j| ker.column(j)[..mid.len()].to_vec()).collect();
        for (s, &o) in mid.orders().iter().enumerate() {
            if o != 0 {
                let mut v = vec![BigInt::zero(); mid.len()];
                v[s] = BigInt::from(o);
                gens.push(v);
            }
        }
        gens.retain(|v| v.iter().any(|x| !x.is_zero()));
        let ell = rhos
            .iter()
            .map(|r| {
                let rep = verify_fiber_hypotheses(table.n, &g, std::slice::from_ref(&mu), std::slice::from_ref(r), &primes)?;
                rep.determinant
                    .to_integer()
                    .ok_or_else(|| Error::Verification("integral determinant expected".into()))
            })
            .collect::<Result<Vec<BigInt>>>()?;
        let value = |v: &[BigInt]| -> BigInt { v.iter().zip(&ell).map(|(a, b)| a * b).sum() };
        let values: Vec<BigInt> = gens.iter().map(|v| value(v)).collect();
        let gcd = values.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
        if !gcd.is_one() {
            report.obstructions.push(Obstruction { mu, gcd });
            continue;
        }
        let lattice = Lattice::new(&gens, mid.len())?;
        let small = boxed.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()).find(|d| {
            value(d).abs().is_one() && lattice.contains(d)
        });
        let (delta, from_lattice) = match small {
            Some(d) => (d, false),
            None => {
                let c = egcd_combination(&values);
                let mut d = vec![BigInt::zero(); mid.len()];
                for (cj, v) in c.iter().zip(&gens) {
                    for (x, y) in d.iter_mut().zip(v) {
                        *x += cj * y;
                    }
                }
                (d, true)
            }
        };
        let dv = HiltonVector::new(mid.clone(), delta)?;
        let de = vector_expr(table, &dv);
        let bracket = nz.normalize_in(&Expr::bracket(mue.clone(), de), Stratum::High)?;
        let fiber = verify_fiber_hypotheses(table.n, &g, std::slice::from_ref(&mu), &[rho(table, &dv)?], &primes)?;
        if !kernel.contains(&bracket)? || !fiber.ok() {
            return Err(Error::Verification(format!("lattice solution for mu = {mu:?} failed its recheck")));
        }
        report.hits.push(SearchHit { mu, delta: vector_expr(table, &dv).to_string(), from_lattice });
    }
    Ok(report)
}

/// Images of `L` under `α_i ↦ n_i ι` for coprime `(n_1, n_2)` with `|n_i| ≤ bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicationScan {
    pub attaching_map: String,
    pub bound: i64,
    pub checked: usize,
    /// `(n_1, n_2, coefficient of φ, coefficient of the torsion generator)` per pair.
    pub images: Vec<(i64, i64, String, String)>,
    /// Pairs whose image has zero torsion part, so `L` maps into the Hopf class line.
    pub solutions: Vec<[i64; 2]>,
}

/// Scans the degree maps `∨S^n → S^n`; a map `M → HP^∞` (or `CP^∞`, `OP²`)
/// restricting to `n_i` on the cells needs the torsion part of the image of `L` to vanish.
pub fn multiplication_scan(table: &SphereTable, l: &Expr, bound: i64) -> Result<MultiplicationScan> {
    let phi = hopf_generator(table)?;
    let psi = torsion_generator(table);
    let mut nz = Normalizer::new(table, 1, Strategy::First);
    let mut scan = MultiplicationScan {
        attaching_map: l.to_string(),
        bound,
        checked: 0,
        images: Vec::new(),
        solutions: Vec::new(),
    };
    for [n1, n2] in primitive_pairs(bound) {
        scan.checked += 1;
        let e = l.substitute(&[Expr::scale(n1, Expr::gen(0)), Expr::scale(n2, Expr::gen(0))])?;
        let v = nz.normalize_in(&e, Stratum::Mid)?;
        let h = v.get(&Slot::SelfMid(0, phi));
        let t = psi.map(|p| v.get(&Slot::SelfMid(0, p))).unwrap_or_default();
        if t.is_zero() {
            scan.solutions.push([n1, n2]);
        }
        scan.images.push((n1, n2, h.to_string(), t.to_string()));
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn search(table: &str, variant: Option<&str>, l: &str, mu: i64) -> SearchReport {
        let t = SphereTable::builtin(table, variant).unwrap();
        bounded_search(&t, &Expr::parse(l).unwrap(), SearchBounds { mu, delta: 2 }).unwrap()
    }

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn hyperbolic_n4_finds_nu() {
        let r = search("n4", None, "[a1,a2]", 2);
        let hit = r.hits.iter().find(|h| h.mu == v(&[0, 1])).unwrap();
        assert_eq!(hit.delta, "a1.nu");
        assert!(!hit.from_lattice);
    }

    #[test]
    fn definite_n4_plane_is_obstructed() {
        let r = search("n4", None, "a1.nu + a2.nu + 2 a1.nup + 2 a2.nup", 3);
        assert!(r.hits.is_empty());
        assert_eq!(r.obstructions.len(), r.mus_checked);
        assert!(r.obstructions.iter().all(|o| (&o.gcd % 3u32).is_zero()));
    }

    #[test]
    fn octonionic_connected_sum() {
        // [a1 - a2, a2.sigma - [a1, a2]] = [L, a2] for L = a1.sigma - a2.sigma.
        for variant in ["plus", "minus"] {
            let r = search("n8", Some(variant), "a1.sigma - a2.sigma", 1);
            let hit = r.hits.iter().find(|h| h.mu == v(&[1, -1])).unwrap();
            assert_eq!(hit.delta, "a2.sigma - [a1, a2]");
        }
        assert!(search("n8", Some("plus"), "a1.sigma - a2.sigma", 0).hits.is_empty());
    }

    #[test]
    fn quaternionic_scan_has_no_coprime_solution() {
        let t = SphereTable::builtin("n4", None).unwrap();
        let scan = multiplication_scan(&t, &Expr::parse("[a1,a2] + a1.nup + a2.nup").unwrap(), 6).unwrap();
        assert!(scan.solutions.is_empty());
        for (n1, n2, h, tor) in &scan.images {
            assert_eq!(*h, (2 * n1 * n2).to_string());
            assert_eq!(*tor, (n1 * n2 + n1 + n2).rem_euclid(12).to_string());
        }
        // The hyperbolic plane with l = 0 does map: n = (1, 0).
        let scan = multiplication_scan(&t, &Expr::parse("[a1,a2]").unwrap(), 1).unwrap();
        assert!(scan.solutions.contains(&[1, 0]));
    }

    #[test]
    fn combination_reaches_gcd() {
        let vals = v(&[6, 10, 15]);
        let c = egcd_combination(&vals);
        let s: BigInt = c.iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!(s.is_one());
    }
}
