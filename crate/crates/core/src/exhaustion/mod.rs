//! One-by-one exhaustions (verification, search, construction from heights)
//! and the finite-region rank tests for `λ`-uniqueness.

mod certificate;
mod uniqueness;

pub use certificate::{
    exhaustion_from_height, search_exhaustion, verify_exhaustion, ExhaustionCertificate, ExhaustionVerdict,
    SearchConfig, SearchOutcome, SearchStrategy, ViolationReason,
};
pub use uniqueness::{
    decide_uniqueness, find_supported_eigenfunctions, window_residual, EigenSearch, SupportedEigenfunction,
    UniquenessStatus, UniquenessVerdict, DEFAULT_CLUSTER_TOL, DEFAULT_RESIDUAL_TOL, DEFAULT_UNIQUENESS_TOL,
};
