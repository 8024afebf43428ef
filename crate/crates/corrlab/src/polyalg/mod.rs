//! Polynomial algebra substrate: univariate and bivariate polynomials over
//! complex floats (`C64`) and exact Gaussian rationals (`CQ`), with root
//! finding, Sylvester resultants and discriminants.

mod bipoly;
mod json;
mod poly;
mod resultant;
mod roots;
mod scalar;

pub use json::{
    bipoly_c64_from_json, bipoly_c64_to_json, bipoly_cq_from_json, bipoly_cq_to_json,
    poly_c64_from_json, poly_c64_to_json, poly_cq_from_json, poly_cq_to_json,
};

pub use bipoly::{BiPoly, Var};
pub use poly::Poly;
pub use resultant::{
    bareiss_det, discriminant_bi, discriminant_uni, resultant_bi, resultant_bi_c64,
    resultant_bi_cq, resultant_uni, resultant_uni_c64, resultant_uni_cq, BareissRing,
};
pub use roots::{gcd_degree_estimate, roots, roots_with_opts, RootOpts, RootSet};
pub use scalar::{
    cq_from_c64, cq_is_real_rational, cq_to_c64, q_from_f64, q_to_f64, Scalar, C64, CQ, Q,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("zero polynomial has no well-defined roots")]
    ZeroPolynomial,
    #[error("root iteration failed to converge after {0} iterations")]
    NonConvergence(usize),
    #[error("leading coefficient in the eliminated variable vanishes identically")]
    DegenerateLeadingCoefficient,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid polynomial JSON: {0}")]
    Schema(String),
}
