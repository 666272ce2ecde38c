//! Construction pipelines for `S^{n−1} → #^{k−1}(S^n × S^{2n−1}) → M_k`:
//! basis choice, `β` classes per regime, vanishing evidence and the two
//! homology conditions on the comparison map, packaged as certificates.

mod assemble;
mod attaching;
mod certificate;
mod hypotheses;
mod large_k;
mod localized;
mod n2;
mod n4;
mod search;

pub use attaching::{new_classes, AttachingMap, StableModel};
pub use certificate::{
    BetaMethod, BetaSystem, FibrationCertificate, HomotopyEvidence, LedgerEntry, Regime, Target, TensorEvidence,
    TensorTerms, WitnessTerm, CERTIFICATE_FORMAT,
};
pub use large_k::construct_large_k;
pub use localized::construct_localized;
pub use n2::{construct_n2, construct_n2_with, N2Formula};
pub use n4::construct_n4;
pub use search::{bounded_search, multiplication_scan, MultiplicationScan, Obstruction, SearchBounds, SearchHit, SearchReport};
pub use hypotheses::{verify_fiber_hypotheses, FiberReport};
