use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expr::Expr;
use super::kernel::hopf_generator;
use super::normalize::{Normalizer, Strategy};
use super::table::SphereTable;
use crate::error::{Error, Result};

fn coeff<R: Rng>(rng: &mut R) -> i64 {
    *[-3, -2, -1, 1, 1, 2, 3].choose(rng).expect("nonempty")
}

fn low<R: Rng>(rng: &mut R, k: usize) -> Expr {
    let n = rng.gen_range(1..=2);
    Expr::Sum((0..n).map(|_| Expr::scale(coeff(rng), Expr::gen(rng.gen_range(0..k)))).collect())
}

fn pair<R: Rng>(rng: &mut R, k: usize) -> Expr {
    let i = rng.gen_range(0..k);
    let j = rng.gen_range(0..k);
    Expr::bracket(Expr::gen(i), Expr::gen(j))
}

fn mid<R: Rng>(rng: &mut R, t: &SphereTable, k: usize) -> Expr {
    let n = rng.gen_range(1..=3);
    Expr::Sum(
        (0..n)
            .map(|_| {
                let e = if rng.gen_bool(0.5) {
                    pair(rng, k)
                } else {
                    Expr::compose(Expr::gen(rng.gen_range(0..k)), t.mid.names.choose(rng).expect("mid"))
                };
                Expr::scale(coeff(rng), e)
            })
            .collect(),
    )
}

/// A random element of `π_{3n−2}(∨_k S^n)` built only from forms the table covers.
pub fn random_expr<R: Rng>(rng: &mut R, t: &SphereTable, k: usize) -> Expr {
    let n = rng.gen_range(2..=4);
    let mut terms = Vec::with_capacity(n);
    for _ in 0..n {
        let e = match rng.gen_range(0..6) {
            0 => Expr::bracket(mid(rng, t, k), low(rng, k)),
            1 => Expr::bracket(low(rng, k), mid(rng, t, k)),
            2 => Expr::bracket(pair(rng, k), Expr::gen(rng.gen_range(0..k))),
            3 => Expr::compose(Expr::gen(rng.gen_range(0..k)), t.high.names.choose(rng).expect("high")),
            4 => Expr::compose(pair(rng, k), t.top.names.choose(rng).expect("top")),
            _ => {
                // L∘θ with L free of torsion compositions.
                let phi = &t.mid.names[hopf_generator(t).expect("Hopf class")];
                let l = Expr::Sum(vec![
                    Expr::scale(coeff(rng), pair(rng, k)),
                    Expr::scale(coeff(rng), Expr::compose(Expr::gen(rng.gen_range(0..k)), phi)),
                ]);
                Expr::compose(l, t.top.names.choose(rng).expect("top"))
            }
        };
        terms.push(Expr::scale(coeff(rng), e));
    }
    Expr::Sum(terms)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfluenceReport {
    pub table: String,
    pub variant: String,
    pub expressions: usize,
    pub orders_per_expression: usize,
}

/// Normalizes `count` random expressions under `orders` random rule orders each
/// and fails on the first disagreement with the first-rule normal form.
pub fn check_confluence(t: &SphereTable, k: usize, count: usize, orders: usize, seed: u64) -> Result<ConfluenceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = Normalizer::new(t, k, Strategy::First);
    for _ in 0..count {
        let e = random_expr(&mut rng, t, k);
        let want = first.normalize(&e)?;
        for _ in 0..orders {
            let got = Normalizer::new(t, k, Strategy::Random(rng.gen())).normalize(&e)?;
            if got != want {
                return Err(Error::Verification(format!("{}: {e} normalizes to {got:?} and {want:?}", t.name)));
            }
        }
    }
    Ok(ConfluenceReport {
        table: t.name.clone(),
        variant: t.variant.clone(),
        expressions: count,
        orders_per_expression: orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_expressions_are_covered_and_confluent() {
        for (name, variant) in [("n2", None), ("n4", None), ("n8", Some("plus")), ("n8", Some("minus"))] {
            let t = SphereTable::builtin(name, variant).unwrap();
            check_confluence(&t, 3, 40, 3, 5).unwrap();
        }
    }
}
