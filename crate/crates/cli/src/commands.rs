use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Zero;

use spherefib_core::catalog::{load_tables, run_catalog, CheckResult, Status};
use spherefib_core::fibrations::{bounded_search, FibrationCertificate, SearchBounds};
use spherefib_core::forms::{
    characteristic_basis, characteristic_vector, diagonalize_mod_p, extend_to_basis, find_primitive_divisible,
    SymForm,
};
use spherefib_core::homotopy::{check_confluence, Expr, SphereTable};
use spherefib_core::problem::ProblemFile;
use spherefib_core::tensorlie::{lie_ranks_from_series, quadratic_hilbert, verify_factorization, HilbertMode};
use spherefib_core::{Error, IntMatrix, Result};

use crate::{FormOp, Mode};

const MAX_ORDER: usize = 64;
const MAX_N8_BOUND: i64 = 20;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoConstruction(_) | Error::SearchExhausted { .. } => 2,
        _ => 1,
    }
}

fn report(e: &Error) -> u8 {
    eprintln!("error: {e}");
    exit_code(e)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Data(format!("{}: {e}", path.display())))
}

fn name<T: serde::Serialize>(x: &T) -> String {
    serde_json::to_value(x).map(|v| v.to_string().trim_matches('"').to_string()).unwrap_or_default()
}

/// Any failure here is a rejected certificate (exit 1), even when the rebuild
/// reports that no construction exists.
fn round_trip(text: &str) -> Result<()> {
    let check = || -> Result<()> {
        let cert = FibrationCertificate::from_json(text)?;
        cert.verify()?;
        if cert.to_json() != text {
            return Err(Error::Verification("certificate does not re-serialize byte for byte".into()));
        }
        Ok(())
    };
    check().map_err(|e| match e {
        Error::Verification(_) | Error::Parse(_) => e,
        e => Error::Verification(e.to_string()),
    })
}

pub fn construct(input: &Path, out: Option<&Path>, verify: bool) -> u8 {
    let run = || -> Result<()> {
        let problem = ProblemFile::parse(&read(input)?)?;
        let cert = problem.solve()?;
        let json = cert.to_json();
        match out {
            Some(p) => write(p, &json)?,
            None => print!("{json}"),
        }
        eprintln!("regime: {}, method: {}", name(&cert.regime), name(&cert.betas.method));
        for c in &cert.conditions {
            eprintln!("  {c}");
        }
        if verify {
            let text = match out {
                Some(p) => read(p)?,
                None => json,
            };
            round_trip(&text)?;
            eprintln!("certificate re-validated");
        }
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

pub fn verify(input: &Path) -> u8 {
    match read(input).and_then(|t| round_trip(&t)) {
        Ok(()) => {
            println!("certificate {} re-validated", input.display());
            0
        }
        Err(e) => report(&e),
    }
}

fn join(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn hilbert(n: u32, k: u64, order: usize, mode: Mode) -> u8 {
    if order > MAX_ORDER {
        return report(&Error::Precondition(format!("order {order} exceeds {MAX_ORDER}")));
    }
    let run = || -> Result<()> {
        let modes: &[(HilbertMode, &str)] = match mode {
            Mode::Manifold => &[(HilbertMode::Manifold, "manifold")],
            Mode::ConnectedSum => &[(HilbertMode::ConnectedSum, "connected sum")],
            Mode::Compare => &[(HilbertMode::Manifold, "manifold"), (HilbertMode::ConnectedSum, "connected sum")],
        };
        for &(m, label) in modes {
            let s = quadratic_hilbert(k, n, order, m)?;
            println!("{label} series: {}", join(s.coefficients()));
            let ranks = lie_ranks_from_series(&s, order)?;
            println!("{label} ranks (d >= 1): {}", join(&ranks[1.min(ranks.len())..]));
        }
        if matches!(mode, Mode::Compare) && k >= 2 {
            let f = verify_factorization(k, n, order)?;
            println!("polynomial identity: {}", f.polynomial_identity);
            if let (Some(l), Some(fr)) = (&f.manifold_ranks, &f.connected_sum_ranks) {
                println!("d  l_d  f_d");
                for d in 1..=order {
                    if !l[d].is_zero() || !fr[d].is_zero() {
                        println!("{d}  {}  {}", l[d], fr[d]);
                    }
                }
            }
            println!("f_d = l_d - [d = n-1] for all d <= {order}: {}", f.ranks_agree);
            if !f.ok() {
                return Err(Error::Verification("rank comparison failed".into()));
            }
        }
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

fn print_checks(results: &[CheckResult]) -> u8 {
    let count = |s| results.iter().filter(|r| r.status == s).count();
    for r in results {
        let tag = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        };
        println!("{tag} {}: {}", r.name, r.detail);
    }
    println!("{} passed, {} failed, {} skipped", count(Status::Pass), count(Status::Fail), count(Status::Skip));
    u8::from(count(Status::Fail) > 0)
}

pub fn examples(table_dir: Option<&Path>) -> u8 {
    print_checks(&run_catalog(table_dir))
}

pub fn search_n8(bound: i64, table_dir: Option<&Path>) -> u8 {
    if !(0..=MAX_N8_BOUND).contains(&bound) {
        return report(&Error::Precondition(format!("bound must lie in 0..={MAX_N8_BOUND}")));
    }
    let (checks, set) = load_tables(table_dir);
    if let Some(c) = checks.iter().find(|c| c.name.contains("n8") && c.status != Status::Pass) {
        return report(&Error::Table(format!("{}: {}", c.name, c.detail)));
    }
    let l = Expr::parse("a1.sigma - a2.sigma").expect("literal");
    let bounds = SearchBounds { mu: bound, delta: bound.min(2) };
    let start = Instant::now();
    let mut total = 0;
    for t in &set.n8 {
        let r = match bounded_search(t, &l, bounds) {
            Ok(r) => r,
            Err(e) => return report(&e),
        };
        println!("variant {}: L = {}, {} classes mu with |mu_i| <= {bound}", r.variant, r.attaching_map, r.mus_checked);
        println!("  obstructed for every delta: {}", r.obstructions.len());
        for h in &r.hits {
            println!("  pair: mu = ({}), delta = {}", join(&h.mu), h.delta);
        }
        total += r.hits.len();
    }
    if total == 0 {
        println!("no pair (mu, delta) with |mu_i| <= {bound} under either sign; this claim is limited to the bound");
    } else {
        println!("{total} pairs found with |mu_i| <= {bound}");
    }
    eprintln!("search time: {:.2?}", start.elapsed());
    0
}

fn parse_vector(text: &str) -> Result<Vec<BigInt>> {
    text.split(',')
        .map(|x| BigInt::from_str(x.trim()).map_err(|_| Error::Parse(format!("`{x}` is not an integer"))))
        .collect()
}

fn parse_form(text: &str) -> Result<SymForm> {
    let rows = text.split(';').map(parse_vector).collect::<Result<Vec<_>>>()?;
    SymForm::new(IntMatrix::from_rows(&rows)?)
}

pub fn form_tools(op: FormOp) -> u8 {
    let run = || -> Result<()> {
        match op {
            FormOp::Primitive { matrix, m } => {
                let p = find_primitive_divisible(&parse_form(&matrix)?, m, 12)?;
                println!("vector: {}", join(&p.vector));
                println!("path: {:?}", p.path);
            }
            FormOp::Characteristic { matrix } => {
                let g = parse_form(&matrix)?;
                println!("characteristic vector: {}", join(&characteristic_vector(&g)?));
                println!("basis: {}", characteristic_basis(&g)?.matrix());
            }
            FormOp::Diagonalize { matrix, p } => {
                let (q, d) = diagonalize_mod_p(&parse_form(&matrix)?, p)?;
                println!("diagonal: {d:?}");
                println!("basis: {q}");
            }
            FormOp::Extend { vector } => {
                println!("{}", extend_to_basis(&parse_vector(&vector)?)?.matrix());
            }
        }
        Ok(())
    };
    match run() {
        Ok(()) => 0,
        Err(e) => report(&e),
    }
}

pub fn selftest() -> u8 {
    let mut results = run_catalog(None);
    for (name, variant) in [("n2", None), ("n4", None), ("n8", Some("plus")), ("n8", Some("minus"))] {
        let r = SphereTable::builtin(name, variant)
            .and_then(|t| check_confluence(&t, 3, 50, 4, 7))
            .map(|c| (format!("{} ({})", c.table, c.variant), c.expressions));
        results.push(match r {
            Ok((label, n)) => {
                CheckResult { name: format!("confluence {label}"), status: Status::Pass, detail: format!("{n} expressions") }
            }
            Err(e) => CheckResult { name: format!("confluence {name}"), status: Status::Fail, detail: e.to_string() },
        });
    }
    print_checks(&results)
}
