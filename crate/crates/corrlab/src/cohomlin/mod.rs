//! Linear-algebra engine for cone-preserving maps: Jordan-derived spectral
//! data, normalized power limits, and dynamical-degree model profiles with
//! their monotonicity and spectral bounds.

mod degrees;
mod spectral;

pub use degrees::{
    degrees_graph_sum, degrees_projective, degrees_sym_product, kunneth_bound, monotonicity_check,
    rpq_bound_check, simple_action_check, DegreeProfile, DegreeSource, MonotonicityVerdict,
    RpqReport, SimpleActionVerdict,
};
pub use spectral::{
    check_surjectivity_limit, lambda_n, spectral_data, ConeMap, SpectralData, SubsequenceReport,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CohomError {
    #[error("matrix must be square")]
    NotSquare,
    #[error("spectral radius is zero: normalized powers are undefined")]
    NilpotentMap,
    #[error("Jordan structure ambiguous at the rank tolerance (gap ratio {gap:.3e})")]
    IllConditioned { gap: f64 },
    #[error("cone generators are not preserved within tolerance")]
    ConeViolated,
    #[error("precondition violated: {0}")]
    Precondition(String),
}
