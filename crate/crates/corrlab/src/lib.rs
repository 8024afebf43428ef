//! corrlab: a computational laboratory for holomorphic correspondences on the
//! Riemann sphere.
//!
//! A correspondence is a multivalued map given by the zero set of a bivariate
//! graph polynomial `F(z, w)`. The crate provides:
//!
//! - polynomial algebra over complex floats and exact Gaussian rationals,
//!   with roots, Sylvester resultants and discriminants ([`polyalg`]);
//! - correspondences: images, preimages, composition, adjoint, critical
//!   values, chains and cycles ([`corr1`]);
//! - local/adjoint multiplicity analysis and the associated exponent
//!   constants ([`mult`]);
//! - dominant-eigenspace linear algebra for cone-preserving maps and
//!   dynamical-degree model profiles ([`cohomlin`]);
//! - the Hölder / log-Hölder exponent calculus with numeric rate
//!   certificates ([`regcal`]);
//! - desk-scale equidistribution experiments: backward-orbit sampling,
//!   potential iteration, super-potential series ([`green`]);
//! - exact iterated-resultant obstructions for critical chains and cycles
//!   ([`algres`]);
//! - the k-fold symmetric product construction ([`symprod`]);
//! - a deterministic experiment driver ([`cli`]).

pub mod algres;
pub mod cli;
pub mod cohomlin;
pub mod corr1;
pub mod green;
pub mod mult;
pub mod polyalg;
pub mod regcal;
pub mod symprod;
#[cfg(test)]
pub(crate) mod testutil;
pub mod tol;
