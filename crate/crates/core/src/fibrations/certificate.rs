use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::attaching::{AttachingMap, StableModel};
use super::hypotheses::FiberReport;
use crate::forms::BasisChange;
use crate::ring::{LocalScalar, PrimeSet};
use crate::tensorlie::TensorElement;

pub const CERTIFICATE_FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Localized,
    N2,
    N4,
    LargeK,
}

/// Which family of `β` formulas was used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BetaMethod {
    /// `β_i = Σ_{j<k} g_ij[α_j,α_k] + ½g_ik[α_k,α_k]`, tensor level only.
    Localized,
    /// Needs `g_ii` even for `i < k`; `Σ[α_i,β_i] = −[L,α_k] + L∘η₃`.
    N2Full,
    /// Needs `g_ii ≡ g_ik (mod 2)`; `Σ[α_i,β_i] = −[L,α_k]`.
    N2Simple,
    /// Odd form; `Σ[α_i,β_i] = −[L,α_k] − (1−r)L∘ν'₇`.
    N4Odd { r: u32 },
    /// Even form, `24 | g_kk`, `l_k = 0`; `Σ[α_i,β_i] = −[L,α_k] + L∘ν₇`.
    N4Even,
    /// Hyperbolic plane: a single `(μ_1, δ_1)` from the residue-class table.
    N4Lookup,
    /// Rank 2: a single `(μ_1, δ_1)` from the lattice search.
    N4Search,
    /// `β_i = Σ_{j<k} g_ij[α_j,α_k] + ½g_ik[α_k,α_k] − α_k∘ω_i`, 2 inverted.
    LargeK,
}

impl BetaMethod {
    pub fn regime(self) -> Regime {
        match self {
            BetaMethod::Localized => Regime::Localized,
            BetaMethod::N2Full | BetaMethod::N2Simple => Regime::N2,
            BetaMethod::N4Odd { .. } | BetaMethod::N4Even | BetaMethod::N4Lookup | BetaMethod::N4Search => {
                Regime::N4
            }
            BetaMethod::LargeK => Regime::LargeK,
        }
    }
}

/// A tensor element as `(letters, coefficient)` pairs, letters numbered from 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorTerms(pub Vec<(Vec<usize>, LocalScalar)>);

impl TensorTerms {
    pub fn from_element(t: &TensorElement) -> Self {
        let mut v: Vec<_> = t
            .terms()
            .map(|(w, c)| (w.letters().iter().map(|i| i + 1).collect::<Vec<_>>(), c.clone()))
            .collect();
        v.sort();
        TensorTerms(v)
    }
}

/// The classes `μ_i` (coordinates in the working basis) and `β_i = δ_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaSystem {
    pub regime: Regime,
    pub method: BetaMethod,
    #[serde(with = "crate::ring::decimal::vec2")]
    pub mus: Vec<Vec<BigInt>>,
    /// Parseable expressions in table regimes, descriptive text otherwise.
    pub betas: Vec<String>,
    /// `ρ(β_i)` in `H_{2n−2}(Ω∨S^n)`.
    pub rho_images: Vec<TensorTerms>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessTerm {
    pub generator: String,
    #[serde(with = "crate::ring::decimal::one")]
    pub coefficient: BigInt,
}

/// `Σ[μ_i,β_i] + [L,α_k]·bracket + Σ c·L∘θ` must normalize to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub bracket: bool,
    pub compose: Vec<(i64, String)>,
    pub statement: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomotopyEvidence {
    pub table: String,
    pub variant: String,
    pub table_sha256: String,
    pub target: Option<Target>,
    /// Normal form of `Σ[μ_i,β_i]`.
    pub sum: String,
    /// `Σ[μ_i,β_i]` as a combination of the kernel generators.
    pub witness: Vec<WitnessTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEvidence {
    /// `Σ_{i<k}[v_i,w_i] − [ℒ,v_k]`, which must be zero.
    pub defect: TensorTerms,
}

/// A homotopy-level term left over by the tensor computation, and why it vanishes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub term: String,
    pub killed_by: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hypothesis: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibrationCertificate {
    pub format: u32,
    pub input: AttachingMap,
    pub regime: Regime,
    pub primes: PrimeSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable_model: Option<StableModel>,
    /// `S` with `α_i = Σ_j S_ij α'_j`; the form becomes `Sᵗ g S`.
    pub substitution: BasisChange,
    /// `(S⁻¹)ᵗ`: column `j` is `α'_j` in the original basis.
    pub new_classes: BasisChange,
    /// The attaching map in the new basis.
    pub transformed: AttachingMap,
    /// Congruences achieved by the basis change.
    pub conditions: Vec<String>,
    pub transcript: Vec<String>,
    pub betas: BetaSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorEvidence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homotopy: Option<HomotopyEvidence>,
    pub ledger: Vec<LedgerEntry>,
    pub fiber: FiberReport,
}
