use num_bigint::BigInt;
use rand::Rng;

use super::{BasisChange, SymForm};
use crate::ring::IntMatrix;

/// Fixed forms that random forms are conjugated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedForm {
    /// `diag(1, …, 1)`.
    Identity,
    /// `diag(1, …, 1, −1)`.
    OddIndefinite,
    /// Orthogonal sum of hyperbolic planes (rank must be even).
    Hyperbolic,
    /// Hyperbolic planes plus a trailing `1` when the rank is odd.
    Mixed,
}

impl SeedForm {
    pub fn form(self, k: usize) -> SymForm {
        let mut m = IntMatrix::zeros(k, k);
        match self {
            SeedForm::Identity | SeedForm::OddIndefinite => {
                for i in 0..k {
                    m[(i, i)] = BigInt::from(1);
                }
                if self == SeedForm::OddIndefinite && k > 0 {
                    m[(k - 1, k - 1)] = BigInt::from(-1);
                }
            }
            SeedForm::Hyperbolic | SeedForm::Mixed => {
                assert!(self == SeedForm::Mixed || k.is_multiple_of(2), "hyperbolic seed needs even rank");
                for p in 0..k / 2 {
                    m[(2 * p, 2 * p + 1)] = BigInt::from(1);
                    m[(2 * p + 1, 2 * p)] = BigInt::from(1);
                }
                if k % 2 == 1 {
                    m[(k - 1, k - 1)] = BigInt::from(1);
                }
            }
        }
        SymForm::new(m).expect("seed forms are symmetric")
    }
}

/// A product of `steps` elementary matrices with multipliers in `[-bound, bound]`.
pub fn random_unimodular<R: Rng>(rng: &mut R, k: usize, steps: usize, bound: i64) -> BasisChange {
    let mut p = IntMatrix::identity(k);
    if k < 2 {
        return BasisChange::new(p).expect("identity");
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..k);
        let mut j = rng.gen_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let c = rng.gen_range(-bound..=bound);
        p.add_col_multiple(i, j, &BigInt::from(c));
        if rng.gen_bool(0.2) {
            p.swap_cols(i, j);
        }
    }
    BasisChange::new(p).expect("elementary products are unimodular")
}

/// `Pᵗ D P` for the seed `D` and a random unimodular `P`.
pub fn random_form<R: Rng>(rng: &mut R, seed: SeedForm, k: usize) -> SymForm {
    let p = random_unimodular(rng, k, 2 * k, 2);
    seed.form(k).transform(&p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_forms_are_unimodular() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for k in 1..7 {
            for seed in [SeedForm::Identity, SeedForm::OddIndefinite, SeedForm::Mixed] {
                let g = random_form(&mut rng, seed, k);
                assert!(g.is_unimodular());
            }
            if k % 2 == 0 {
                let g = random_form(&mut rng, SeedForm::Hyperbolic, k);
                assert!(g.is_unimodular() && g.is_even());
            }
        }
    }
}
