//! Worked examples with known outcomes, run as a regression suite.

use std::path::Path;

use num_bigint::BigInt;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fibrations::{construct_localized, multiplication_scan, verify_fiber_hypotheses, AttachingMap};
use crate::forms::SymForm;
use crate::homotopy::{
    attaching_data, check_table_identities, embedded_source, read_pinned, rho, sha256_hex, pinned_hash, Expr,
    KernelSubgroup, Normalizer, SphereTable, Strategy, Stratum,
};
use crate::ring::PrimeSet;
use crate::tensorlie::verify_factorization;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, r: Result<(bool, String)>) -> Self {
        let (status, detail) = match r {
            Ok((true, d)) => (Status::Pass, d),
            Ok((false, d)) => (Status::Fail, d),
            Err(e) => (Status::Fail, e.to_string()),
        };
        CheckResult { name: name.into(), status, detail }
    }

    fn skip(name: &str, why: &str) -> Self {
        CheckResult { name: name.into(), status: Status::Skip, detail: why.into() }
    }
}

/// Table sources, read from a directory (checked against the pins) or built in.
#[derive(Clone, Debug, Default)]
pub struct TableSet {
    pub n2: Option<SphereTable>,
    pub n4: Option<SphereTable>,
    pub n8: Vec<SphereTable>,
}

/// Loads `n2`, `n4` and both `n8` variants. A checksum mismatch is a failure;
/// a missing file is a skip.
pub fn load_tables(dir: Option<&Path>) -> (Vec<CheckResult>, TableSet) {
    let mut checks = Vec::new();
    let mut set = TableSet::default();
    for name in ["n2", "n4", "n8"] {
        let file = format!("{name}.toml");
        let label = format!("checksum {file}");
        let text = match dir {
            Some(d) if !d.join(&file).exists() => {
                checks.push(CheckResult::skip(&label, "file missing"));
                continue;
            }
            Some(d) => read_pinned(d, &file),
            None => {
                let src = embedded_source(&file).expect("shipped table");
                if Some(sha256_hex(src).as_str()) == pinned_hash(&file) {
                    Ok(src.to_string())
                } else {
                    Err(Error::Table(format!("{file}: built-in source does not match its pin")))
                }
            }
        };
        let text = match text {
            Ok(t) => t,
            Err(e) => {
                checks.push(CheckResult::new(&label, Err(e)));
                continue;
            }
        };
        let variants = if name == "n8" { vec![Some("plus"), Some("minus")] } else { vec![None] };
        let mut ok = true;
        for v in variants {
            match SphereTable::parse(&text, v) {
                Ok(t) if name == "n2" => set.n2 = Some(t),
                Ok(t) if name == "n4" => set.n4 = Some(t),
                Ok(t) => set.n8.push(t),
                Err(e) => {
                    checks.push(CheckResult::new(&label, Err(e)));
                    ok = false;
                }
            }
        }
        if ok {
            checks.push(CheckResult::new(&label, Ok((true, "matches pin".into()))));
        }
    }
    (checks, set)
}

struct Pair {
    in_kernel: bool,
    fiber_ok: bool,
    value: String,
}

fn pair(t: &SphereTable, l: &str, mu: &[i64], delta: &str) -> Result<Pair> {
    let l = Expr::parse(l)?;
    let mu: Vec<BigInt> = mu.iter().map(|&x| BigInt::from(x)).collect();
    let delta = Expr::parse(delta)?;
    let mut nz = Normalizer::new(t, 2, Strategy::First);
    let lv = nz.normalize_in(&l, Stratum::Mid)?;
    let (g, _) = attaching_data(t, &lv)?;
    let kernel = KernelSubgroup::new(t, 2, &l)?;
    let value = nz.normalize_in(&Expr::bracket(Expr::linear(&mu), delta.clone()), Stratum::High)?;
    let dv = nz.normalize_in(&delta, Stratum::Mid)?;
    let fiber = verify_fiber_hypotheses(t.n, &g, &[mu], &[rho(t, &dv)?], &PrimeSet::empty())?;
    Ok(Pair { in_kernel: kernel.contains(&value)?, fiber_ok: fiber.ok(), value: value.to_string() })
}

fn zero(t: &SphereTable, k: usize, e: &str) -> Result<(bool, String)> {
    let v = Normalizer::new(t, k, Strategy::First).normalize_in(&Expr::parse(e)?, Stratum::High)?;
    Ok((v.is_zero(), format!("{e} normalizes to {}", if v.is_zero() { "0".into() } else { v.to_string() })))
}

/// The rows `(l_1, l_2, c, δ)` of the rank-2 hyperbolic table, one representative
/// per residue class, with `μ = c α_1 + α_2`.
pub const HYPERBOLIC_EXAMPLES: [(i64, i64, i64, &str); 8] = [
    (0, 0, 0, "a1.nu"),
    (3, 0, 6, "a1.nu"),
    (0, 2, 4, "63 a1.nu + 4 a2.nu"),
    (3, 2, 10, "399 a1.nu + 4 a2.nu"),
    (1, 1, 2, "175 a1.nu + 44 a2.nu"),
    (4, 4, 8, "257 a1.nu + 4 a2.nu"),
    (1, 2, 10, "401 a1.nu + 4 a2.nu - a1.nup"),
    (4, 2, 4, "127 a1.nu + 8 a2.nu + a1.nup"),
];

fn n2_checks(t: &SphereTable) -> Vec<CheckResult> {
    let l = "a1.eta - a2.eta";
    let naive = (|| {
        let p = pair(t, l, &[1, 0], "[a1, a2]")?;
        let (same, _) = zero(t, 2, "[a1, [a1, a2]] - [a1, a2].eta3 + [a1.eta - a2.eta, a2]")?;
        Ok((!p.in_kernel && same, format!("[a1, [a1, a2]] = {} = [a1, a2].eta3 - [L, a2], not in the kernel span", p.value)))
    })();
    let fixed = pair(t, l, &[1, 1], "a2.eta")
        .map(|p| (p.in_kernel && p.fiber_ok, format!("[a1 + a2, a2.eta] = {}", p.value)));
    vec![
        CheckResult::new("CP2 # -CP2: mu = a1, delta = [a1, a2] leaves [a1, a2].eta3", naive),
        CheckResult::new("CP2 # -CP2: mu = a1 + a2, delta = a2.eta lies in the kernel span", fixed),
    ]
}

fn n4_checks(t: &SphereTable) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let hp = (|| {
        let p = pair(t, "a1.nu - a2.nu", &[1, -1], "a2.nu")?;
        let (exact, d) = zero(t, 2, "[a1 - a2, a2.nu] + (a1.nu - a2.nu).nup7 + [a1.nu - a2.nu, a1]")?;
        Ok((exact && p.fiber_ok, d))
    })();
    out.push(CheckResult::new("HP2 # -HP2: [a1 - a2, a2.nu] = -L.nup7 - [L, a1]", hp));
    for &(l1, l2, c, delta) in &HYPERBOLIC_EXAMPLES {
        let l = format!("[a1, a2] + {l1} a1.nup + {l2} a2.nup");
        let r = pair(t, &l, &[c, 1], delta).map(|p| {
            (p.in_kernel && p.fiber_ok, format!("in kernel: {}, fiber hypotheses: {}", p.in_kernel, p.fiber_ok))
        });
        out.push(CheckResult::new(&format!("hyperbolic HP rank 2, l = ({l1}, {l2}): mu = {c} a1 + a2, delta = {delta}"), r));
    }
    let scan = multiplication_scan(t, &Expr::parse("[a1, a2] + a1.nup + a2.nup").unwrap_or_else(|_| Expr::zero()), 12)
        .map(|s| (s.solutions.is_empty(), format!("{} coprime pairs checked, none maps to HP^oo", s.checked)));
    out.push(CheckResult::new("l = (1, 1): no coprime (n1, n2) with |n_i| <= 12 extends over HP^oo", scan));
    out
}

fn rank_two_checks() -> Vec<CheckResult> {
    let cases: [(&str, u32, &[&[i64]], &[u64]); 4] = [
        ("n = 2, g = I: the triple product of i_2 vanishes", 2, &[&[1, 0], &[0, 1]], &[2]),
        ("n = 4, g = I with 3 inverted", 4, &[&[1, 0], &[0, 1]], &[2, 3]),
        ("n = 6, g = diag(1, -1): a2 -> a1 + a2 gives 3 | g22", 6, &[&[1, 0], &[0, -1]], &[2]),
        ("n = 6, g hyperbolic", 6, &[&[0, 1], &[1, 0]], &[2]),
    ];
    cases
        .iter()
        .map(|&(name, n, rows, primes)| {
            let r = (|| {
                let m = AttachingMap::new(n, SymForm::from_i64(rows)?)?;
                let c = construct_localized(&m, &PrimeSet::new(primes.iter().copied())?)?;
                c.verify()?;
                Ok((true, c.conditions.join("; ")))
            })();
            CheckResult::new(&format!("rank 2 localized: {name}"), r)
        })
        .collect()
}

fn factorization_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for n in [2u32, 4, 6, 8] {
        for k in [2u64, 3, 4] {
            let r = verify_factorization(k, n, 24).map(|f| (f.ok(), format!("polynomial: {}, ranks: {}", f.polynomial_identity, f.ranks_agree)));
            out.push(CheckResult::new(&format!("loop homology factorization n = {n}, k = {k}"), r));
        }
    }
    out
}

/// Checksums first; identity checks only run on tables that loaded.
pub fn run_catalog(dir: Option<&Path>) -> Vec<CheckResult> {
    let (mut out, set) = load_tables(dir);
    if out.iter().any(|c| c.status == Status::Fail) {
        return out;
    }
    let mut tables: Vec<&SphereTable> = set.n2.iter().chain(&set.n4).collect();
    tables.extend(&set.n8);
    for t in tables {
        let r = check_table_identities(t, &[1, 2, 3]).map(|_| (true, format!("{} identities", t.identities.len())));
        out.push(CheckResult::new(&format!("table {} ({}) identities round-trip", t.name, t.variant), r));
    }
    match &set.n2 {
        Some(t) => out.extend(n2_checks(t)),
        None => out.push(CheckResult::skip("n = 2 examples", "n2 table missing")),
    }
    match &set.n4 {
        Some(t) => out.extend(n4_checks(t)),
        None => out.push(CheckResult::skip("n = 4 examples", "n4 table missing")),
    }
    if set.n8.is_empty() {
        out.push(CheckResult::skip("n = 8 identities", "n8 table missing"));
    }
    out.extend(rank_two_checks());
    out.extend(factorization_checks());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_passes() {
        let results = run_catalog(None);
        for r in &results {
            assert_eq!(r.status, Status::Pass, "{}: {}", r.name, r.detail);
        }
        assert!(results.len() > 20);
    }
}
