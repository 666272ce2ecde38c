use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::attaching::{new_classes, AttachingMap, StableModel};
use super::certificate::*;
use super::hypotheses::verify_fiber_hypotheses;
use crate::error::{Error, Result};
use crate::forms::BasisChange;
use crate::homotopy::{rho, vector_expr, Expr, KernelSubgroup, Normalizer, SphereTable, Strategy, Stratum};
use crate::ring::{LocalScalar, PrimeSet};
use crate::tensorlie::{construct_w, w_identity_defect, GradedBasis, QuadraticRelation, TensorElement};

/// Everything a pipeline decides; the rest of a certificate is computed from it.
pub(crate) struct Choice {
    pub input: AttachingMap,
    pub primes: PrimeSet,
    pub stable_model: Option<StableModel>,
    pub substitution: BasisChange,
    pub transcript: Vec<String>,
    pub method: BetaMethod,
    pub mus: Vec<Vec<BigInt>>,
    /// Expressions for the table regimes; ignored otherwise.
    pub betas: Vec<String>,
}

pub(crate) fn unit(k: usize, i: usize) -> Vec<BigInt> {
    (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()
}

pub(crate) fn standard_mus(k: usize) -> Vec<Vec<BigInt>> {
    (0..k - 1).map(|i| unit(k, i)).collect()
}

fn table_for(method: BetaMethod) -> Result<Option<SphereTable>> {
    Ok(match method.regime() {
        Regime::N2 => Some(SphereTable::builtin("n2", None)?),
        Regime::N4 => Some(SphereTable::builtin("n4", None)?),
        _ => None,
    })
}

fn divides(m: i64, x: &BigInt) -> bool {
    x.is_multiple_of(&BigInt::from(m))
}

fn fail(what: String) -> Error {
    Error::Verification(what)
}

fn target_for(method: BetaMethod) -> Option<Target> {
    let t = |compose: Vec<(i64, &str)>, statement: &str| Target {
        bracket: true,
        compose: compose.into_iter().map(|(c, n)| (c, n.to_string())).collect(),
        statement: statement.to_string(),
    };
    match method {
        BetaMethod::N2Full => Some(t(vec![(-1, "eta3")], "sum [a_i, b_i] = -[L, a_k] + L.eta3")),
        BetaMethod::N2Simple => Some(t(vec![], "sum [a_i, b_i] = -[L, a_k]")),
        BetaMethod::N4Odd { r } => {
            let c = 1 - i64::from(r);
            let compose = if c == 0 { vec![] } else { vec![(c, "nup7")] };
            Some(t(compose, &format!("sum [a_i, b_i] = -[L, a_k] - ({c}) L.nup7")))
        }
        BetaMethod::N4Even => Some(t(vec![(-1, "nu7")], "sum [a_i, b_i] = -[L, a_k] + L.nu7")),
        _ => None,
    }
}

/// Congruences the basis change must achieve, checked exactly.
fn conditions(method: BetaMethod, m: &AttachingMap, primes: &PrimeSet) -> Result<Vec<String>> {
    let k = m.k();
    let g = &m.g;
    let kk = g.entry(k - 1, k - 1);
    let l = m.torsion_or_zero();
    let mut out = Vec::new();
    match method {
        BetaMethod::Localized => {
            if divides(3, kk) {
                out.push(format!("3 | g_kk = {kk}"));
            } else if primes.contains_prime(3) {
                out.push("3 is inverted".into());
            } else if m.n == 2 {
                out.push("[[i_2, i_2], i_2] = 0".into());
            } else {
                return Err(fail(format!("3 does not divide g_kk = {kk} and 3 is not inverted")));
            }
        }
        BetaMethod::N2Full => {
            for i in 0..k - 1 {
                if !divides(2, g.entry(i, i)) {
                    return Err(fail(format!("g_{0}{0} is odd", i + 1)));
                }
            }
            out.push("g_ii even for i < k".into());
        }
        BetaMethod::N2Simple | BetaMethod::N4Odd { .. } => {
            for i in 0..k - 1 {
                if !divides(2, &(g.entry(i, i) + g.entry(i, k - 1))) {
                    return Err(fail(format!("g_{0}{0} and g_{0}k differ mod 2", i + 1)));
                }
            }
            out.push("g_ii = g_ik mod 2 for i < k".into());
            if let BetaMethod::N4Odd { r } = method {
                let lk = &l[k - 1];
                if !divides(3, lk) {
                    return Err(fail(format!("3 does not divide l_k = {lk}")));
                }
                if r == 0 && divides(6, lk) {
                    out.push(format!("6 | l_k = {lk}"));
                } else if !divides(4, kk) && divides(24, &(4 * lk - 2 * kk * BigInt::from(r))) {
                    out.push(format!("4 does not divide g_kk = {kk}, 3 | l_k = {lk}, 4 l_k = 2 g_kk r mod 24 with r = {r}"));
                } else {
                    return Err(fail(format!("neither 6 | l_k nor the r = {r} congruence holds")));
                }
            }
        }
        BetaMethod::N4Even => {
            if !g.is_even() {
                return Err(fail("form is not even".into()));
            }
            if !divides(24, kk) || !l[k - 1].is_zero() {
                return Err(fail(format!("need 24 | g_kk = {kk} and l_k = 0 (l_k = {})", l[k - 1])));
            }
            out.push(format!("24 | g_kk = {kk}, l_k = 0"));
        }
        BetaMethod::N4Lookup => {
            if k != 2 || *g != crate::forms::SymForm::from_i64(&[&[0, 1], &[1, 0]])? {
                return Err(fail("lookup requires the hyperbolic plane".into()));
            }
            out.push("g is the hyperbolic plane".into());
        }
        BetaMethod::N4Search => {
            if k != 2 {
                return Err(fail("the pair search needs rank 2".into()));
            }
            out.push("rank 2".into());
        }
        BetaMethod::LargeK => {
            if !divides(3, kk) {
                return Err(fail(format!("3 does not divide g_kk = {kk}")));
            }
            if m.stable.get(k - 1).is_some_and(|x| x.iter().any(|c| !c.is_zero())) {
                return Err(fail("stable image of w_k is nonzero".into()));
            }
            out.push(format!("3 | g_kk = {kk}"));
            out.push("stable image of w_k is zero".into());
        }
    }
    Ok(out)
}

fn generic_beta_text(m: &AttachingMap, i: usize, omega: bool) -> String {
    let k = m.k();
    let mut parts = Vec::new();
    for j in 0..k - 1 {
        let c = m.g.entry(i, j);
        if !c.is_zero() {
            parts.push(format!("{c} [a{}, a{k}]", j + 1));
        }
    }
    let c = m.g.entry(i, k - 1);
    if !c.is_zero() {
        parts.push(format!("{} [a{k}, a{k}]", LocalScalar::new(c.clone(), BigInt::from(2))));
    }
    if omega {
        parts.push(format!("-a{k}.w{}", i + 1));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn ledger(method: BetaMethod, conds: &[String]) -> Vec<LedgerEntry> {
    let e = |term: &str, killed_by: &str, hyp: Option<&str>| LedgerEntry {
        term: term.into(),
        killed_by: killed_by.into(),
        hypothesis: hyp.map(String::from),
    };
    match method {
        BetaMethod::Localized => {
            let triple = if conds[0].starts_with("3 |") {
                e("1/2 g_kk [[a_k, a_k], a_k]", "3 | g_kk and 3 [[i_n, i_n], i_n] = 0", Some("triple-three-torsion"))
            } else if conds[0].starts_with("3 is") {
                e("1/2 g_kk [[a_k, a_k], a_k]", "3 [[i_n, i_n], i_n] = 0 and 3 is inverted", Some("triple-three-torsion"))
            } else {
                e("1/2 g_kk [[a_k, a_k], a_k]", "[[i_2, i_2], i_2] = 0", None)
            };
            vec![
                triple,
                e(
                    "sum [a_i, b_i] + [L, a_k] beyond its rho-image",
                    "rho is injective once the primes are inverted",
                    Some("rho-injective"),
                ),
            ]
        }
        BetaMethod::LargeK => vec![
            e("1/2 g_kk [a_k, [a_k, a_k]]", "3 | g_kk and 3 [[i_n, i_n], i_n] = 0", Some("triple-three-torsion")),
            e("[a_k.w_k, a_k]", "[i_n, E a] = [i_n, i_n] o S^n a and w_k is stably trivial", Some("bracket-suspension")),
            e(
                "sum [a_i, b_i] + [L, a_k] beyond its rho-image",
                "rho is injective once 2 is inverted",
                Some("rho-injective"),
            ),
            e("change of the w_i under the basis change", "stable coordinates transform linearly", Some("stable-splitting")),
        ],
        _ => Vec::new(),
    }
}

fn table_evidence(
    table: &SphereTable,
    m: &AttachingMap,
    mus: &[Vec<BigInt>],
    betas: &[Expr],
    target: Option<Target>,
) -> Result<(HomotopyEvidence, Vec<TensorElement>)> {
    let k = m.k();
    let mut nz = Normalizer::new(table, k, Strategy::First);
    let mut rhos = Vec::with_capacity(betas.len());
    let mut terms = Vec::with_capacity(betas.len());
    for (mu, b) in mus.iter().zip(betas) {
        let v = nz.normalize_in(b, Stratum::Mid)?;
        rhos.push(rho(table, &v)?);
        terms.push(Expr::bracket(Expr::linear(mu), b.clone()));
    }
    let sum = Expr::Sum(terms);
    let value = nz.normalize_in(&sum, Stratum::High)?;
    let l = vector_expr(table, &m.normalized(table)?);
    if let Some(t) = &target {
        let mut e = vec![sum.clone()];
        if t.bracket {
            e.push(Expr::bracket(l.clone(), Expr::Gen(k - 1)));
        }
        for (c, name) in &t.compose {
            e.push(Expr::scale(*c, Expr::compose(l.clone(), name)));
        }
        let residual = nz.normalize_in(&Expr::Sum(e), Stratum::High)?;
        if !residual.is_zero() {
            return Err(Error::NoConstruction(format!("`{}` leaves residual {residual}", t.statement)));
        }
    }
    let ks = KernelSubgroup::new(table, k, &l)?;
    let w = ks
        .witness(&value)?
        .ok_or_else(|| Error::NoConstruction(format!("{value} is not in the span of [L, a_i] and L.theta")))?;
    let witness = ks
        .labels
        .iter()
        .zip(w)
        .filter(|(_, c)| !c.is_zero())
        .map(|(g, c)| WitnessTerm { generator: g.clone(), coefficient: c })
        .collect();
    let ev = HomotopyEvidence {
        table: table.name.clone(),
        variant: table.variant.clone(),
        table_sha256: table.sha256.clone(),
        target,
        sum: value.to_string(),
        witness,
    };
    Ok((ev, rhos))
}

/// Computes transformed data, checks the congruences, builds the evidence.
pub(crate) fn assemble(c: Choice) -> Result<FibrationCertificate> {
    let k = c.input.k();
    if c.substitution.dim() != k || c.mus.len() + 1 != k {
        return Err(Error::Dimension("basis change or class count does not match the rank".into()));
    }
    let regime = c.method.regime();
    let table = table_for(c.method)?;
    let transformed = match (&table, &c.stable_model) {
        (Some(t), _) => c.input.reduced(t)?.substitute_table(t, &c.substitution)?,
        (None, Some(model)) => c.input.substitute_linear(model, &c.substitution)?,
        (None, None) => AttachingMap::new(c.input.n, c.input.g.transform(&c.substitution))?,
    };
    let conds = conditions(c.method, &transformed, &c.primes)?;
    let fiber_primes = match regime {
        Regime::N2 | Regime::N4 => PrimeSet::empty(),
        Regime::LargeK => PrimeSet::new([2])?,
        Regime::Localized => c.primes.clone(),
    };
    let (betas, rhos, tensor, homotopy) = match &table {
        Some(t) => {
            let exprs: Vec<Expr> = c.betas.iter().map(|s| Expr::parse(s)).collect::<Result<_>>()?;
            if exprs.len() + 1 != k {
                return Err(Error::Dimension(format!("{} classes b for rank {k}", exprs.len())));
            }
            let (ev, rhos) = table_evidence(t, &transformed, &c.mus, &exprs, target_for(c.method))?;
            (exprs.iter().map(|e| e.to_string()).collect(), rhos, None, Some(ev))
        }
        None => {
            let basis = GradedBasis::uniform(k, c.input.n - 1);
            let ws = construct_w(transformed.g.matrix(), &basis, &fiber_primes)?;
            let rel = QuadraticRelation::from_form(transformed.g.matrix(), &basis)?;
            let defect = w_identity_defect(&rel, &ws)?;
            if !defect.is_zero() {
                return Err(fail("tensor identity has a nonzero defect".into()));
            }
            let omega = regime == Regime::LargeK;
            let texts = (0..k - 1).map(|i| generic_beta_text(&transformed, i, omega)).collect();
            let rhos: Vec<TensorElement> = ws.iter().map(|w| w.scale(&LocalScalar::from_int(-1))).collect();
            (texts, rhos, Some(TensorEvidence { defect: TensorTerms::from_element(&defect) }), None)
        }
    };
    let fiber = verify_fiber_hypotheses(c.input.n, &transformed.g, &c.mus, &rhos, &fiber_primes)?;
    if !fiber.ok() {
        return Err(Error::NoConstruction(format!(
            "fiber hypotheses fail (injective: {}, determinant {})",
            fiber.injective, fiber.determinant
        )));
    }
    let ledger = ledger(c.method, &conds);
    Ok(FibrationCertificate {
        format: CERTIFICATE_FORMAT,
        input: c.input,
        regime,
        primes: c.primes,
        stable_model: c.stable_model,
        new_classes: new_classes(&c.substitution),
        substitution: c.substitution,
        transformed,
        conditions: conds,
        transcript: c.transcript,
        betas: BetaSystem {
            regime,
            method: c.method,
            mus: c.mus,
            betas,
            rho_images: rhos.iter().map(TensorTerms::from_element).collect(),
        },
        tensor,
        homotopy,
        ledger,
        fiber,
    })
}

impl FibrationCertificate {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("certificate: {e}")))
    }

    /// Rebuilds every recorded check from the recorded choices and compares.
    pub fn verify(&self) -> Result<()> {
        if self.format != CERTIFICATE_FORMAT {
            return Err(fail(format!("unknown certificate format {}", self.format)));
        }
        if self.regime != self.betas.regime || self.regime != self.betas.method.regime() {
            return Err(fail("regime tags disagree".into()));
        }
        if let Some(h) = &self.homotopy {
            let t = SphereTable::builtin(&h.table, Some(&h.variant))?;
            if t.sha256 != h.table_sha256 {
                return Err(fail(format!("table {} checksum changed", h.table)));
            }
        }
        let again = assemble(Choice {
            input: self.input.clone(),
            primes: self.primes.clone(),
            stable_model: self.stable_model.clone(),
            substitution: self.substitution.clone(),
            transcript: self.transcript.clone(),
            method: self.betas.method,
            mus: self.betas.mus.clone(),
            betas: self.betas.betas.clone(),
        })?;
        let checks: [(&str, bool); 9] = [
            ("new classes", again.new_classes == self.new_classes),
            ("transformed attaching map", again.transformed == self.transformed),
            ("conditions", again.conditions == self.conditions),
            ("beta classes", again.betas == self.betas),
            ("tensor evidence", again.tensor == self.tensor),
            ("homotopy evidence", again.homotopy == self.homotopy),
            ("ledger", again.ledger == self.ledger),
            ("fiber report", again.fiber == self.fiber),
            ("serialized form", again.to_json() == self.to_json()),
        ];
        match checks.iter().find(|(_, ok)| !ok) {
            Some((what, _)) => Err(fail(format!("{what} does not re-verify"))),
            None => Ok(()),
        }
    }
}
