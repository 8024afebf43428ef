//! Centralized numeric tolerances.
//!
//! Every threshold used by the numeric paths lives here so that tests and
//! library code agree on what "zero" means at each stage.

/// Relative backward-error bound accepted for a polynomial root: a value `v`
/// is a root of `p` when `|p(v)| <= TOL_ROOT * scale(p, v)` where the scale
/// is the evaluation of `|p|` with absolute-value coefficients.
pub const TOL_ROOT: f64 = 1e-10;

/// Root-clustering radius factor for multiplicity detection, relative to the
/// local root scale. First rung of the confirmation ladder; the ladder grows
/// it by powers of ten while the gcd-degree check disagrees.
pub const TOL_CLUSTER: f64 = 1e-7;

/// Per-step residual bound for chain acceptance, relative to local scale.
pub const TOL_CHAIN: f64 = 1e-8;

/// Relative singular-value cutoff for numeric rank decisions.
pub const TOL_RANK: f64 = 1e-8;

/// Absolute tolerance for the collision-detector polynomial samples, applied
/// after normalization by the sample scale.
pub const TOL_PHI: f64 = 1e-9;

/// Mass-conservation slack for normalized atomic measures.
pub const TOL_MASS: f64 = 1e-12;

/// Agreement tolerance for dual-route pairing identities.
pub const TOL_PAIRING: f64 = 1e-9;

/// Matching tolerance when comparing projective points by chordal distance.
pub const TOL_PROJECTIVE: f64 = 1e-9;

/// Iteration cap for the simultaneous root iteration before the companion
/// fallback takes over.
pub const MAX_ROOT_ITERS: usize = 400;

/// Node budget for depth-first chain enumeration.
pub const CAP_BRANCHES: usize = 200_000;

/// Cap on intermediate polynomial degree during exact elimination.
pub const CAP_ELIMINATION_DEGREE: usize = 5000;

use std::sync::OnceLock;

/// Float precision tier, selected once per process (CORRLAB_PRECISION).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    Double,
    /// Same arithmetic, tighter residual targets and larger iteration caps.
    Extended,
}

static PRECISION: OnceLock<Precision> = OnceLock::new();

pub fn set_precision(p: Precision) {
    let _ = PRECISION.set(p);
}

pub fn precision() -> Precision {
    *PRECISION.get().unwrap_or(&Precision::Double)
}

/// Root residual target for the active precision tier.
pub fn active_tol_root() -> f64 {
    match precision() {
        Precision::Double => TOL_ROOT,
        Precision::Extended => 1e-12,
    }
}

/// Root iteration cap for the active precision tier.
pub fn active_max_root_iters() -> usize {
    match precision() {
        Precision::Double => MAX_ROOT_ITERS,
        Precision::Extended => 2 * MAX_ROOT_ITERS,
    }
}
