//! Potential iteration: p_n(z) = d1^{-n} log |F_n(z, a)| on a fixed grid,
//! where F_n is the graph of the n-th iterate. The successive
//! sup-differences measure the Cauchy convergence of the normalized
//! potentials.

use super::GreenError;
use crate::corr1::Corr1;
use crate::polyalg::{cq_from_c64, Poly, Var, C64};

/// Grid for potential sampling: a square chart window with an excluded
/// radial ring (the invariant circle for the power-map family sits at
/// |z| = 1, where the limit potential is not smooth).
#[derive(Clone, Debug)]
pub struct GridSpec {
    pub half_width: f64,
    pub samples_per_side: usize,
    pub excluded_ring: Option<(f64, f64)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            half_width: 2.0,
            samples_per_side: 200,
            excluded_ring: Some((0.999, 1.001)),
        }
    }
}

/// Annulus-adapted default grid.
pub fn default_grid() -> Vec<C64> {
    build_grid(&GridSpec::default())
}

pub fn build_grid(spec: &GridSpec) -> Vec<C64> {
    let n = spec.samples_per_side;
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let x = -spec.half_width + 2.0 * spec.half_width * (i as f64) / (n as f64 - 1.0);
            let y = -spec.half_width + 2.0 * spec.half_width * (j as f64) / (n as f64 - 1.0);
            let z = C64::new(x, y);
            if let Some((lo, hi)) = spec.excluded_ring {
                let r = z.norm();
                if r >= lo && r <= hi {
                    continue;
                }
            }
            out.push(z);
        }
    }
    out
}

/// Stable log |P(z)|: coefficients are scaled by their largest magnitude
/// and the evaluation switches to the reversed polynomial at 1/z outside
/// the unit disc, so no intermediate power overflows.
pub fn log_abs_eval(p: &Poly<C64>, z: C64) -> f64 {
    if p.is_zero() {
        return f64::NEG_INFINITY;
    }
    let d = p.degree().unwrap();
    if z.norm() > 1.0 {
        let rev = p.reversed_to_degree(d);
        return (d as f64) * z.norm().ln() + log_abs_eval_inner(&rev, 1.0 / z);
    }
    log_abs_eval_inner(p, z)
}

fn log_abs_eval_inner(p: &Poly<C64>, z: C64) -> f64 {
    let scale = p.max_coeff_mag();
    if scale == 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut acc = C64::new(0.0, 0.0);
    for c in p.coeffs().iter().rev() {
        acc = acc * z + c / scale;
    }
    scale.ln() + acc.norm().ln()
}

/// Result of iterating the potential to depth `n_max`.
#[derive(Clone, Debug)]
pub struct PotentialRun {
    pub grid: Vec<C64>,
    /// samples[n] holds p_n on the grid, n = 0..=n_max.
    pub samples: Vec<Vec<f64>>,
    /// sup-norms ||p_{n+1} - p_n|| over the grid.
    pub sup_diffs: Vec<f64>,
}

/// Iterate the potential of the normalized pullbacks of the Dirac mass at
/// `a`: p_n = d1^{-n} log |F_n(., a)|.
pub fn potential_iterate(
    f: &Corr1,
    a: C64,
    n_max: usize,
    grid: &[C64],
) -> Result<PotentialRun, GreenError> {
    let mut samples = Vec::with_capacity(n_max + 1);
    let mut graphs = Vec::with_capacity(n_max + 1);
    graphs.push(f.clone());
    for _ in 1..n_max {
        let (next, _) = Corr1::compose(graphs.last().unwrap(), f)?;
        graphs.push(next);
    }
    let aq = cq_from_c64(a);
    for n in 0..=n_max {
        if n == 0 {
            // p_0 = log of the chordal-style distance surrogate |z - a|;
            // the depth-0 potential of the Dirac mass itself.
            let row: Vec<f64> = grid.iter().map(|z| (z - a).norm().ln()).collect();
            samples.push(row);
            continue;
        }
        let g = &graphs[n - 1];
        let fiber = g.graph().eval_var(Var::W, &aq).to_c64();
        if fiber.is_zero() {
            return Err(GreenError::CriticalCollision { depth: n });
        }
        let d1n = (f.d1() as f64).powi(n as i32);
        let row: Vec<f64> = grid
            .iter()
            .map(|z| log_abs_eval(&fiber, *z) / d1n)
            .collect();
        samples.push(row);
    }
    let sup_diffs = samples
        .windows(2)
        .map(|w| {
            w[0].iter()
                .zip(&w[1])
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect();
    Ok(PotentialRun {
        grid: grid.to_vec(),
        samples,
        sup_diffs,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::squaring;
    use super::*;

    #[test]
    fn log_abs_matches_direct_eval() {
        let p = Poly::new(vec![
            C64::new(1.0, 0.0),
            C64::new(-2.0, 0.5),
            C64::new(0.0, 0.0),
            C64::new(3.0, 0.0),
        ]);
        for z in [C64::new(0.3, -0.4), C64::new(2.0, 1.0), C64::new(-5.0, 0.1)] {
            let direct = p.eval(&z).norm().ln();
            assert!((log_abs_eval(&p, z) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn log_abs_survives_huge_degree() {
        // z^256 - 1 at |z| = 2: direct powering would overflow long before
        // the log; the scaled path must not.
        let mut coeffs = vec![C64::new(0.0, 0.0); 257];
        coeffs[0] = C64::new(-1.0, 0.0);
        coeffs[256] = C64::new(1.0, 0.0);
        let p = Poly::new(coeffs);
        let z = C64::new(2.0, 0.0);
        let expect = 256.0 * 2.0f64.ln(); // log |z^256 - 1| ~ 256 log 2
        let got = log_abs_eval(&p, z);
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn power_map_potential_is_exactly_stationary_at_zero() {
        // a = 0: p_n(z) = 2^{-n} log |z^{2^n}| = log |z| for every n.
        let f = squaring();
        let spec = GridSpec {
            half_width: 1.8,
            samples_per_side: 21,
            excluded_ring: Some((0.999, 1.001)),
        };
        let grid: Vec<C64> = build_grid(&spec)
            .into_iter()
            .filter(|z| z.norm() > 0.05)
            .collect();
        let run = potential_iterate(&f, C64::new(0.0, 0.0), 6, &grid).unwrap();
        // skip the depth-0 potential (a different normalization) and check
        // stationarity from n = 1 on
        for d in &run.sup_diffs[1..] {
            assert!(*d < 1e-12, "diff {d}");
        }
    }

    #[test]
    fn power_map_potential_cauchy_for_generic_start() {
        let f = squaring();
        let spec = GridSpec {
            half_width: 2.0,
            samples_per_side: 41,
            excluded_ring: Some((0.98, 1.02)),
        };
        let grid = build_grid(&spec);
        let run = potential_iterate(&f, C64::new(1.0, 0.0), 8, &grid).unwrap();
        // geometric decay of sup differences beyond the first couple steps
        for w in run.sup_diffs[2..].windows(2) {
            assert!(w[1] <= 0.75 * w[0] + 1e-12, "ratio {} -> {}", w[0], w[1]);
        }
    }
}
