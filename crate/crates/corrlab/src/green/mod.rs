//! Equidistribution laboratory on the sphere: normalized pullbacks of
//! atomic measures, Monte-Carlo backward orbits, convergence-rate fits,
//! potential iteration, the super-potential series, and the branch-sum
//! wedge inequality.

mod measure;
mod potential;
mod sample;
mod series;
mod testfn;

pub use measure::{pullback_measure, pullback_iterate_exact, AtomicMeasure};
pub use potential::{default_grid, log_abs_eval, potential_iterate, GridSpec, PotentialRun};
pub use sample::{
    backward_orbit_sample, equidist_rate, pairwise_sum, RateFit, SampleStats, SampledMeasure,
};
pub use series::{superpotential_series, quasi_potential, SeriesRun};
pub use testfn::{dictionary, TestFunction, TestKind};

use crate::corr1::{Corr1, CorrError, P1Point};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GreenError {
    #[error("rate fit unstable: R^2 = {r2:.4} (data kept in report)")]
    FitUnstable { r2: f64 },
    #[error("orbit hit a degenerate fiber at depth {depth}")]
    CriticalCollision { depth: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// Branch-sum comparison at sample points: for nonnegative test functions,
/// the sum over branches of the product is dominated by the product of the
/// branch sums.
#[derive(Clone, Debug)]
pub struct WedgeReport {
    pub samples_checked: usize,
    pub worst_slack: f64,
    pub all_pass: bool,
}

pub fn wedge_branch_inequality(
    f: &Corr1,
    phi: &TestFunction,
    psi: &TestFunction,
    samples: &[P1Point],
    slack_tol: f64,
) -> Result<WedgeReport, GreenError> {
    let mut worst = f64::INFINITY;
    for z in samples {
        let branches = f.forward(*z)?.with_multiplicity();
        let (mut cross, mut sum_phi, mut sum_psi) = (0.0, 0.0, 0.0);
        for w in &branches {
            let a = phi.eval(*w);
            let b = psi.eval(*w);
            if a < 0.0 || b < 0.0 {
                return Err(GreenError::Degenerate(
                    "test functions must be nonnegative on the branches".into(),
                ));
            }
            cross += a * b;
            sum_phi += a;
            sum_psi += b;
        }
        worst = worst.min(sum_phi * sum_psi - cross);
    }
    Ok(WedgeReport {
        samples_checked: samples.len(),
        worst_slack: worst,
        all_pass: worst >= -slack_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr1::cq;
    use crate::polyalg::C64;

    #[test]
    fn wedge_inequality_single_branch_equality() {
        let f = squaring();
        let phi = TestFunction::gaussian(C64::new(0.5, 0.0), 0.7, 1.0);
        let psi = TestFunction::gaussian(C64::new(-0.3, 0.2), 0.5, 1.0);
        let samples: Vec<P1Point> = (0..20)
            .map(|i| P1Point::finite(C64::new(0.1 * i as f64 - 1.0, 0.05 * i as f64)))
            .collect();
        let rep = wedge_branch_inequality(&f, &phi, &psi, &samples, 1e-12).unwrap();
        assert!(rep.all_pass);
        // single branch: equality, slack 0
        assert!(rep.worst_slack.abs() < 1e-12);
    }

    #[test]
    fn wedge_inequality_multi_branch() {
        use rand::{Rng, SeedableRng};
        let f = Corr1::family(2, 3, cq(0.5, 0.0)).unwrap();
        let phi = TestFunction::gaussian(C64::new(0.0, 0.0), 1.0, 1.0);
        let psi = TestFunction::gaussian(C64::new(1.0, 0.0), 1.0, 1.0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let samples: Vec<P1Point> = (0..200)
            .map(|_| P1Point::finite(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))))
            .collect();
        let rep = wedge_branch_inequality(&f, &phi, &psi, &samples, 1e-12).unwrap();
        assert!(rep.all_pass, "worst slack {}", rep.worst_slack);
    }

    pub(crate) use crate::testutil::squaring;
}
