//! Multiplicity analysis for correspondences: local multiplicity of the
//! first projection, adjoint multiplicity of the second, the exponent
//! constants they control, smallness predicates, the subset-collision
//! detector, and empirical fiber-exponent fits.

use crate::corr1::{Corr1, CorrError, P1Point, Side};
use crate::polyalg::{self, q_to_f64, Var, C64, Q};
use crate::tol;
use num::bigint::BigInt;
use num::rational::BigRational;
use num_traits::One;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MultError {
    #[error("exponent fit unstable: R^2 = {r2:.4} below {min:.2}")]
    FitUnstable { r2: f64, min: f64 },
    #[error("assignment size {0} exceeds the exhaustive-matching cap")]
    AssignmentTooLarge(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// Witness of a ramified fiber: base point, fiber point, multiplicity.
pub type Witness = (P1Point, P1Point, usize);

/// Full multiplicity report for a correspondence on the sphere (k = 1).
#[derive(Clone, Debug)]
pub struct MultReport {
    pub rho: usize,
    pub delta: usize,
    pub kappa: Q,
    pub kappa_tilde: Q,
    pub witnesses: Vec<Witness>,
}

/// Local multiplicity of the first projection of the graph: the maximal
/// fiber multiplicity of z -> f(z) over the whole sphere, located by
/// scanning the discriminant and degree-drop loci plus infinity.
pub fn local_multiplicity(f: &Corr1) -> Result<(usize, Vec<Witness>), MultError> {
    max_fiber_multiplicity(f, Side::Forward)
}

/// Adjoint multiplicity: the local multiplicity of the adjoint.
pub fn adjoint_multiplicity(f: &Corr1) -> Result<usize, MultError> {
    Ok(max_fiber_multiplicity(&f.adjoint(), Side::Forward)?.0)
}

fn max_fiber_multiplicity(f: &Corr1, side: Side) -> Result<(usize, Vec<Witness>), MultError> {
    let g = match side {
        Side::Forward => f.graph().clone(),
        Side::Backward => f.graph().swap_vars(),
    };
    let mut bases: Vec<P1Point> = vec![P1Point::infinity()];

    // Ramification over finite base points: zeros of Res_w(F, dF/dw) in z.
    if g.deg(Var::W).unwrap() >= 2 {
        let dw = g.derivative(Var::W);
        if !dw.is_zero() && dw.deg(Var::W).unwrap_or(0) >= 1 {
            let disc = polyalg::resultant_bi_cq(&g, &dw, Var::W).map_err(CorrError::from)?;
            if disc.is_zero() {
                return Err(MultError::Precondition(
                    "graph is not square-free in the fiber variable".into(),
                ));
            }
            if disc.degree().unwrap_or(0) >= 1 {
                let set = polyalg::roots(&disc.to_c64()).map_err(CorrError::from)?;
                bases.extend(set.points.iter().map(|(v, _)| P1Point::finite(*v)));
            }
        }
    }
    // Degree-drop locus: zeros of the leading w-coefficient. A drop of m
    // puts infinity in the fiber with multiplicity m.
    let lc = g.as_poly_coeffs(Var::W).pop().unwrap();
    if lc.degree().unwrap_or(0) >= 1 {
        let set = polyalg::roots(&lc.to_c64()).map_err(CorrError::from)?;
        bases.extend(set.points.iter().map(|(v, _)| P1Point::finite(*v)));
    }

    let probe = Corr1::new(g).map_err(MultError::from)?;
    let mut best = 1usize;
    let mut witnesses = Vec::new();
    for base in bases {
        let fiber = probe.forward(base)?;
        for (pt, m) in &fiber.points {
            if *m >= 2 {
                witnesses.push((base, *pt, *m));
            }
            best = best.max(*m);
        }
    }
    witnesses.sort_by(|a, b| b.2.cmp(&a.2));
    Ok((best, witnesses))
}

/// kappa = 1 / (25 k (4 rho)^q), exact.
pub fn kappa(k: usize, q: usize, rho: usize) -> Q {
    assert!(q >= 1 && q <= k && rho >= 1);
    let denom = BigInt::from(25 * k) * BigInt::from(4 * rho).pow(q as u32);
    BigRational::new(BigInt::one(), denom)
}

/// kappa~ with kappa~^{-1} = 25 k (4 delta)^{k - q + 1}, exact.
pub fn kappa_tilde(k: usize, q: usize, delta: usize) -> Q {
    assert!(q >= 1 && q <= k && delta >= 1);
    let denom = BigInt::from(25 * k) * BigInt::from(4 * delta).pow((k - q + 1) as u32);
    BigRational::new(BigInt::one(), denom)
}

/// Full multiplicity report for dimension-k bookkeeping with order q.
pub fn report(f: &Corr1, k: usize, q: usize) -> Result<MultReport, MultError> {
    let (rho, witnesses) = local_multiplicity(f)?;
    let delta = adjoint_multiplicity(f)?;
    Ok(MultReport {
        rho,
        delta,
        kappa: kappa(k, q, rho),
        kappa_tilde: kappa_tilde(k, q, delta),
        witnesses,
    })
}

/// q-small adjoint multiplicity: d_q > d_{q-1} and
/// 25 k (4 delta)^{k-q+1} < d_q / d_{q-1}. The comparison is exact.
pub fn q_small_adjoint(
    f: &Corr1,
    dq: f64,
    dqm1: f64,
    k: usize,
    q: usize,
) -> Result<bool, MultError> {
    let delta = adjoint_multiplicity(f)?;
    Ok(q_small_predicate(delta, dq, dqm1, k, q))
}

/// The q-small inequality with delta supplied directly.
pub fn q_small_predicate(delta: usize, dq: f64, dqm1: f64, k: usize, q: usize) -> bool {
    if !(dq > dqm1) || dqm1 <= 0.0 {
        return false;
    }
    let threshold = kappa_tilde(k, q, delta).recip();
    let ratio = BigRational::from_float(dq).unwrap() / BigRational::from_float(dqm1).unwrap();
    threshold < ratio
}

/// Report for the small-multiplicity test of the paired system (f, f^{-1}).
#[derive(Clone, Debug)]
pub struct SmallMultReport {
    pub delta_fn: usize,
    pub delta_fn_inv: usize,
    pub delta_paired: usize,
    pub threshold: f64,
    pub ratio_pow_n: f64,
    pub holds: bool,
}

/// Small multiplicity at iterate N: 50 k (4 delta(F^N))^{k+1} < ratio^N with
/// delta(F^N) = delta(f^N) * delta(f^{-N}), the paired-system product rule.
pub fn small_multiplicity(
    f: &Corr1,
    ratio: f64,
    n: usize,
    k: usize,
) -> Result<SmallMultReport, MultError> {
    assert!(n >= 1);
    let (fn_, _) = f.iterate(n)?;
    let delta_fn = adjoint_multiplicity(&fn_)?;
    // delta(f^{-N}) = rho(f^N): the adjoint of the iterate, seen from the
    // other projection.
    let delta_fn_inv = local_multiplicity(&fn_)?.0;
    Ok(small_multiplicity_predicate(
        k,
        delta_fn,
        delta_fn_inv,
        ratio.powi(n as i32),
    ))
}

/// The inequality with the multiplicities supplied directly.
pub fn small_multiplicity_predicate(
    k: usize,
    delta_fn: usize,
    delta_fn_inv: usize,
    ratio_pow_n: f64,
) -> SmallMultReport {
    let delta_paired = delta_fn * delta_fn_inv;
    let threshold = 50.0 * (k as f64) * (4.0 * delta_paired as f64).powi((k + 1) as i32);
    SmallMultReport {
        delta_fn,
        delta_fn_inv,
        delta_paired,
        threshold,
        ratio_pow_n,
        holds: threshold < ratio_pow_n,
    }
}

// ---------------------------------------------------------------------------
// Subset-collision detector
// ---------------------------------------------------------------------------

/// Does some rho-subset of the d points of C^k coincide? Decided by sampling
/// the collision polynomial phi(s) = prod_J [prod_{i, j<h in J}
/// (s - (y^i(a_j) - y^i(a_h))) - s^(k rho(rho-1)/2)] at D + 1 values of s,
/// where D bounds deg phi; the subset collision holds iff every sample
/// vanishes.
pub fn phi_collision(points: &[Vec<C64>], rho: usize) -> bool {
    let d = points.len();
    assert!(d >= rho && rho >= 2, "need d >= rho >= 2");
    let k = points[0].len();
    assert!(points.iter().all(|p| p.len() == k));

    let m_pair = k * rho * (rho - 1) / 2;
    let n_subsets = binomial(d, rho);
    let degree_bound = n_subsets * (m_pair.saturating_sub(1));
    let n_samples = degree_bound + 1;

    let max_diff = {
        let mut m: f64 = 0.0;
        for i in 0..d {
            for j in i + 1..d {
                for t in 0..k {
                    m = m.max((points[i][t] - points[j][t]).norm());
                }
            }
        }
        m
    };
    let radius = 1.0 + 2.0 * max_diff;

    let subsets = k_subsets(d, rho);
    // phi = prod_J phi_J vanishes at a sample iff some factor does; testing
    // the factors with per-factor relative tolerance keeps the float zero
    // test honest (a product of many generically-small factors would drown
    // any fixed product tolerance). If no phi_J is the zero polynomial, its
    // zeros cover at most D of the D + 1 samples, so some sample reports
    // nonzero and the verdict is false, exactly as in exact arithmetic.
    for l in 0..n_samples {
        let theta = 2.0 * std::f64::consts::PI * (l as f64) / (n_samples as f64) + 0.3;
        let s = C64::from_polar(radius, theta);
        let mut vanishes = false;
        for subset in &subsets {
            // prod over unordered pairs inside the subset, all coordinates;
            // the monomial s^m_pair is accumulated through the same loop so
            // exact duplicates cancel bitwise.
            let mut prod_a = C64::new(1.0, 0.0);
            let mut prod_b = C64::new(1.0, 0.0);
            for (ci, cj) in pairs(subset) {
                for t in 0..k {
                    let diff = points[ci][t] - points[cj][t];
                    prod_a *= s - diff;
                    prod_b *= s;
                }
            }
            let phi_j = prod_a - prod_b;
            let scale = prod_a.norm().max(prod_b.norm()).max(1.0);
            if phi_j.norm() <= tol::TOL_PHI * scale {
                vanishes = true;
                break;
            }
        }
        if !vanishes {
            return false;
        }
    }
    true
}

fn binomial(n: usize, k: usize) -> usize {
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn pairs(subset: &[usize]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, &a) in subset.iter().enumerate() {
        for &b in subset.iter().skip(i + 1) {
            out.push((a, b));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Fiber-exponent fit
// ---------------------------------------------------------------------------

/// Least-squares fit of the fiber-motion exponent at a base point: the
/// fibers over z0 and over perturbed points are matched by minimal-cost
/// assignment in the chordal metric, and log(max matched distance) is
/// regressed on log(perturbation size).
#[derive(Clone, Debug)]
pub struct LojaFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub pairs: Vec<(f64, f64)>,
}

/// Geometric radius schedule for the fit.
pub fn default_radii() -> Vec<f64> {
    (0..14).map(|j| 1e-2 * 0.5f64.powi(j)).collect()
}

pub fn loja_exponent(f: &Corr1, z0: C64, radii: &[f64]) -> Result<LojaFit, MultError> {
    loja_exponent_with(f, z0, radii, 0.8)
}

pub fn loja_exponent_with(
    f: &Corr1,
    z0: C64,
    radii: &[f64],
    min_r2: f64,
) -> Result<LojaFit, MultError> {
    if radii.len() < 3 {
        return Err(MultError::Precondition("need at least 3 radii".into()));
    }
    let base = f.forward(P1Point::finite(z0))?;
    let base_pts = base.with_multiplicity();
    let directions = [0.0, 1.3, 2.9, 4.4];
    let mut pairs_out = Vec::new();
    for &r in radii {
        let mut worst: f64 = 0.0;
        for &th in &directions {
            let z = z0 + C64::from_polar(r, th);
            let fiber = f.forward(P1Point::finite(z))?.with_multiplicity();
            let matched = match_fibers_max_dist(&base_pts, &fiber)?;
            worst = worst.max(matched);
        }
        if worst > 0.0 {
            pairs_out.push((r.ln(), worst.ln()));
        }
    }
    if pairs_out.len() < 3 {
        return Err(MultError::Precondition(
            "fibers did not move measurably over the schedule".into(),
        ));
    }
    let (slope, intercept, r2) = linear_fit(&pairs_out);
    if r2 < min_r2 {
        return Err(MultError::FitUnstable { r2, min: min_r2 });
    }
    Ok(LojaFit {
        slope,
        intercept,
        r2,
        pairs: pairs_out,
    })
}

/// Max matched chordal distance under a minimal total-cost assignment,
/// found exhaustively with branch-and-bound (fiber cardinalities here are
/// single digits).
fn match_fibers_max_dist(a: &[P1Point], b: &[P1Point]) -> Result<f64, MultError> {
    let n = a.len();
    if b.len() != n {
        return Err(MultError::Precondition(
            "fibers have different cardinality".into(),
        ));
    }
    if n > 9 {
        return Err(MultError::AssignmentTooLarge(n));
    }
    let mut cost = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            cost[i][j] = crate::corr1::chordal_dist(a[i], b[j]);
        }
    }
    let mut used = vec![false; n];
    let mut best_total = f64::INFINITY;
    let mut best_perm = vec![0usize; n];
    let mut perm = vec![0usize; n];
    fn rec(
        i: usize,
        n: usize,
        cost: &[Vec<f64>],
        used: &mut [bool],
        perm: &mut [usize],
        total: f64,
        best_total: &mut f64,
        best_perm: &mut [usize],
    ) {
        if total >= *best_total {
            return;
        }
        if i == n {
            *best_total = total;
            best_perm.copy_from_slice(perm);
            return;
        }
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                perm[i] = j;
                rec(i + 1, n, cost, used, perm, total + cost[i][j], best_total, best_perm);
                used[j] = false;
            }
        }
    }
    rec(0, n, &cost, &mut used, &mut perm, 0.0, &mut best_total, &mut best_perm);
    Ok((0..n).map(|i| cost[i][best_perm[i]]).fold(0.0, f64::max))
}

fn linear_fit(pairs: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pairs.len() as f64;
    let sx: f64 = pairs.iter().map(|p| p.0).sum();
    let sy: f64 = pairs.iter().map(|p| p.1).sum();
    let sxx: f64 = pairs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pairs.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pairs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pairs
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    (slope, intercept, r2)
}

/// Report kappa as f64 for display.
pub fn kappa_f64(k: usize, q: usize, rho: usize) -> f64 {
    q_to_f64(&kappa(k, q, rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr1::cq;
    use crate::polyalg::BiPoly;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn graph(rows: Vec<Vec<f64>>) -> Corr1 {
        let g = BiPoly::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(|x| c(x, 0.0)).collect())
                .collect(),
        );
        Corr1::from_c64(&g).unwrap()
    }

    /// z - w^3
    fn cube() -> Corr1 {
        graph(vec![vec![0.0, 0.0, 0.0, -1.0], vec![1.0, 0.0, 0.0, 0.0]])
    }

    /// w - z^2
    fn squaring() -> Corr1 {
        graph(vec![vec![0.0, 1.0], vec![0.0, 0.0], vec![-1.0, 0.0]])
    }

    /// w^2 - z^3
    fn semicubical() -> Corr1 {
        graph(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
            vec![-1.0, 0.0, 0.0],
        ])
    }

    #[test]
    fn rho_of_cube_root_fiber() {
        let (rho, wit) = local_multiplicity(&cube()).unwrap();
        assert_eq!(rho, 3);
        assert!(wit.iter().any(|(_, _, m)| *m == 3));
    }

    #[test]
    fn rho_of_graph_map_is_one() {
        assert_eq!(local_multiplicity(&squaring()).unwrap().0, 1);
    }

    #[test]
    fn rho_of_semicubical() {
        assert_eq!(local_multiplicity(&semicubical()).unwrap().0, 2);
    }

    #[test]
    fn delta_is_rho_of_adjoint() {
        for f in [cube(), squaring(), semicubical()] {
            assert_eq!(
                adjoint_multiplicity(&f).unwrap(),
                local_multiplicity(&f.adjoint()).unwrap().0
            );
        }
        assert_eq!(adjoint_multiplicity(&cube()).unwrap(), 1);
    }

    #[test]
    fn kappa_values_exact() {
        assert_eq!(kappa(1, 1, 1), BigRational::new(1.into(), 100.into()));
        assert_eq!(kappa(1, 1, 3), BigRational::new(1.into(), 300.into()));
        assert_eq!(kappa_tilde(1, 1, 1), BigRational::new(1.into(), 100.into()));
    }

    #[test]
    fn kappa_monotone_in_rho_and_q() {
        for k in 1..=3usize {
            for q in 1..=k {
                for rho in 1..=5usize {
                    assert!(kappa(k, q, rho + 1) < kappa(k, q, rho));
                    if q < k {
                        assert!(kappa(k, q + 1, rho) < kappa(k, q, rho));
                    }
                    assert!(kappa_tilde(k, q, rho + 1) < kappa_tilde(k, q, rho));
                }
            }
        }
    }

    #[test]
    fn q_small_threshold_cases() {
        assert!(q_small_predicate(1, 128.0, 1.0, 1, 1));
        assert!(!q_small_predicate(1, 64.0, 1.0, 1, 1));
        assert!(!q_small_predicate(2, 200.0, 1.0, 1, 1));
    }

    #[test]
    fn small_multiplicity_cases() {
        let r = small_multiplicity_predicate(1, 1, 1, 1e4);
        assert!(r.holds && (r.threshold - 800.0).abs() < 1e-12);
        assert!(!small_multiplicity_predicate(1, 1, 1, 500.0).holds);
        let r2 = small_multiplicity_predicate(1, 2, 1, 3200.0);
        assert!((r2.threshold - 3200.0).abs() < 1e-12 && !r2.holds);
    }

    #[test]
    fn collision_detector_basics() {
        let pts = vec![vec![c(0.0, 0.0)], vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]];
        assert!(phi_collision(&pts, 2));
        let pts = vec![vec![c(0.0, 0.0)], vec![c(1.0, 0.0)], vec![c(2.0, 0.0)]];
        assert!(!phi_collision(&pts, 2));
    }

    #[test]
    fn collision_near_miss_is_false() {
        let pts = vec![
            vec![c(0.0, 0.0)],
            vec![c(1e-3, 0.0)],
            vec![c(1.0, 0.0)],
        ];
        assert!(!phi_collision(&pts, 2));
    }

    #[test]
    fn collision_matches_brute_force_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for case in 0..300 {
            let d = rng.gen_range(2..=6usize);
            let rho = rng.gen_range(2..=d.min(3));
            let k = rng.gen_range(1..=2usize);
            let mut pts: Vec<Vec<C64>> = (0..d)
                .map(|_| {
                    (0..k)
                        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                        .collect()
                })
                .collect();
            // Engineer a collision in a third of the cases.
            let planted = case % 3 == 0 && d > rho;
            if planted {
                for t in 1..rho {
                    pts[t] = pts[0].clone();
                }
            }
            let brute = brute_force_collision(&pts, rho);
            assert_eq!(phi_collision(&pts, rho), brute, "case {case}");
        }
    }

    fn brute_force_collision(pts: &[Vec<C64>], rho: usize) -> bool {
        let subsets = k_subsets(pts.len(), rho);
        subsets.iter().any(|s| {
            s.iter().skip(1).all(|&j| {
                pts[s[0]]
                    .iter()
                    .zip(&pts[j])
                    .all(|(a, b)| (a - b).norm() <= 1e-14)
            })
        })
    }

    #[test]
    fn loja_slope_cube_root() {
        let fit = loja_exponent(&cube(), c(0.0, 0.0), &default_radii()).unwrap();
        assert!((fit.slope - 1.0 / 3.0).abs() < 0.1 / 3.0, "slope {}", fit.slope);
        assert!(fit.r2 > 0.95);
    }

    #[test]
    fn loja_slope_square_root() {
        // z - w^2 at z0 = 0: exponent 1/2.
        let f = graph(vec![vec![0.0, 0.0, -1.0], vec![1.0, 0.0, 0.0]]);
        let fit = loja_exponent(&f, c(0.0, 0.0), &default_radii()).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.05, "slope {}", fit.slope);
    }

    #[test]
    fn loja_slope_unramified_graph() {
        let fit = loja_exponent(&squaring(), c(0.7, 0.2), &default_radii()).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "slope {}", fit.slope);
    }

    #[test]
    fn report_for_family() {
        let f = Corr1::family(2, 3, cq(5.0, 0.0)).unwrap();
        let rep = report(&f, 1, 1).unwrap();
        assert!(rep.rho >= 1 && rep.delta >= 1);
        assert_eq!(rep.kappa, kappa(1, 1, rep.rho));
        assert_eq!(rep.kappa_tilde, kappa_tilde(1, 1, rep.delta));
    }

    #[test]
    fn loja_slope_within_band_for_monomials() {
        // slope in [1/rho - 0.1/rho, 1] for the monomial test graphs.
        for (f, rho) in [(cube(), 3.0f64), (semicubical().adjoint(), 3.0)] {
            let fit = loja_exponent(&f, c(0.0, 0.0), &default_radii()).unwrap();
            let lo = 1.0 / rho - 0.1 / rho;
            assert!(fit.slope >= lo && fit.slope <= 1.0 + 0.05, "slope {}", fit.slope);
        }
    }
}
