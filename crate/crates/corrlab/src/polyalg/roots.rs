//! Root finding: simultaneous (Aberth–Ehrlich) iteration with a
//! companion-matrix eigenvalue fallback, multiplicity detection by
//! clustering, and a gcd-degree cross-check via Sylvester rank.

use super::poly::Poly;
use super::scalar::C64;
use super::PolyError;
use crate::tol;
use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;

/// Roots with multiplicities. The total count with multiplicity equals the
/// degree of the polynomial that produced it.
#[derive(Clone, Debug, Default)]
pub struct RootSet {
    pub points: Vec<(C64, usize)>,
}

impl RootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.points.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }

    /// Flattened list, each root repeated by multiplicity.
    pub fn with_multiplicity(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for (v, m) in &self.points {
            for _ in 0..*m {
                out.push(*v);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RootOpts {
    pub tol_root: f64,
    pub cluster_factor: f64,
    pub max_iters: usize,
    /// Confirm multiplicities against the Sylvester-rank gcd degree and
    /// retry the clustering radius until they agree.
    pub confirm_multiplicity: bool,
}

impl Default for RootOpts {
    fn default() -> Self {
        RootOpts {
            tol_root: tol::active_tol_root(),
            cluster_factor: tol::TOL_CLUSTER,
            max_iters: tol::active_max_root_iters(),
            confirm_multiplicity: true,
        }
    }
}

/// All roots of `p`, with multiplicities. Constants yield an empty set; the
/// zero polynomial is rejected.
pub fn roots(p: &Poly<C64>) -> Result<RootSet, PolyError> {
    roots_with_opts(p, RootOpts::default())
}

pub fn roots_with_opts(p: &Poly<C64>, opts: RootOpts) -> Result<RootSet, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let deg = p.degree().unwrap();
    if deg == 0 {
        return Ok(RootSet::default());
    }
    if p.leading().unwrap().norm() < 1e-300 {
        return Err(PolyError::Precondition(
            "leading coefficient below underflow threshold".into(),
        ));
    }

    // Strip exact zero roots first: z^m factor.
    let mut coeffs = p.coeffs().to_vec();
    let zero_mult = coeffs.iter().take_while(|c| c.is_zero()).count();
    coeffs.drain(..zero_mult);
    let reduced = Poly::new(coeffs);

    let mut values = Vec::new();
    if let Some(d) = reduced.degree() {
        if d > 0 {
            values = solve_all(&reduced, &opts)?;
        }
    }

    let mut set = cluster_roots(&values, opts.cluster_factor);
    // Multiple roots smear the iterates over a radius ~ eps^(1/m), which can
    // exceed the clustering radius; cross-check whenever clusters formed or
    // two roots sit close enough to be a smeared multiple.
    let suspicious = set.points.iter().any(|(_, m)| *m > 1)
        || closest_pair(&set) < 1e-3;
    if opts.confirm_multiplicity && reduced.degree().unwrap_or(0) >= 2 && suspicious {
        set = confirm_against_gcd(&reduced, &values, &set, opts.cluster_factor);
    }
    // An m-fold root is a simple root of the (m-1)-th derivative: polish
    // there to recover the accuracy lost to smearing.
    for (v, m) in set.points.iter_mut() {
        if *m >= 2 {
            let mut q = reduced.clone();
            for _ in 0..*m - 1 {
                q = q.derivative();
            }
            let dq = q.derivative();
            for _ in 0..40 {
                let qv = q.eval(v);
                let dv = dq.eval(v);
                if dv.norm() < 1e-300 {
                    break;
                }
                let step = qv / dv;
                *v -= step;
                if step.norm() <= 1e-15 * (1.0 + v.norm()) {
                    break;
                }
            }
        }
    }
    if zero_mult > 0 {
        set.points.insert(0, (C64::zero(), zero_mult));
    }

    // Residual check, normwise backward error: v is accepted when it is an
    // exact root of a polynomial within tol_root of p in coefficient norm.
    let coeff_scale = p.max_coeff_mag().max(f64::MIN_POSITIVE);
    for (v, _) in &set.points {
        let scale = coeff_scale * v.norm().max(1.0).powi(deg as i32) * (deg as f64 + 1.0);
        if p.eval(v).norm() > opts.tol_root * scale {
            return Err(PolyError::NonConvergence(opts.max_iters));
        }
    }
    Ok(set)
}

/// |p| evaluated with absolute-value coefficients at |z|: the natural scale
/// for backward error.
fn eval_abs(p: &Poly<C64>, z: C64) -> f64 {
    let r = z.norm();
    let mut acc = 0.0;
    for c in p.coeffs().iter().rev() {
        acc = acc * r + c.norm();
    }
    acc
}

fn solve_all(p: &Poly<C64>, opts: &RootOpts) -> Result<Vec<C64>, PolyError> {
    let d = p.degree().unwrap();
    if d == 1 {
        return Ok(vec![-p.coeff(0) / p.coeff(1)]);
    }
    if d == 2 {
        let (a, b, c) = (p.coeff(2), p.coeff(1), p.coeff(0));
        let disc = (b * b - 4.0 * a * c).sqrt();
        // Numerically stable variant: avoid cancellation in -b ± disc.
        let q = if (b.conj() * disc).re >= 0.0 {
            -(b + disc) / 2.0
        } else {
            -(b - disc) / 2.0
        };
        let r1 = q / a;
        let r2 = if q.norm() > 0.0 { c / q } else { -r1 };
        return Ok(vec![r1, r2]);
    }
    for restart in 0..3 {
        if let Some(v) = aberth(p, opts.max_iters, restart) {
            return Ok(v);
        }
    }
    companion_fallback(p, opts)
}

/// Aberth–Ehrlich simultaneous iteration. Returns None on stagnation.
fn aberth(p: &Poly<C64>, max_iters: usize, restart: usize) -> Option<Vec<C64>> {
    let d = p.degree().unwrap();
    let lead = *p.leading().unwrap();
    let monic = p.scale(&(C64::new(1.0, 0.0) / lead));
    let dp = monic.derivative();

    // Initial guesses on a circle sized by the Cauchy bound, rotated per
    // restart to escape symmetric stalemates.
    let r = 1.0 + monic.coeffs()[..d]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let r = r.powf(1.0 / (restart as f64 + 1.0)).max(0.5);
    let mut z: Vec<C64> = (0..d)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * (j as f64) / (d as f64)
                + 0.41
                + 0.73 * restart as f64;
            Complex::from_polar(r, theta)
        })
        .collect();

    for _ in 0..max_iters {
        let mut converged = true;
        for i in 0..d {
            let pv = monic.eval(&z[i]);
            let scale = eval_abs(&monic, z[i]).max(f64::MIN_POSITIVE);
            if pv.norm() <= 1e-14 * scale {
                continue;
            }
            converged = false;
            let dv = dp.eval(&z[i]);
            let newton = if dv.is_zero() {
                // Perturb away from the critical point.
                let bump = C64::new(1e-6 * (1.0 + z[i].norm()), 1e-6);
                z[i] += bump;
                continue;
            } else {
                pv / dv
            };
            let mut sum = C64::zero();
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    let diff = z[i] - zj;
                    if diff.norm() < 1e-300 {
                        continue;
                    }
                    sum += 1.0 / diff;
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * sum;
            let step = if denom.norm() < 1e-14 {
                newton
            } else {
                newton / denom
            };
            z[i] -= step;
            if !z[i].re.is_finite() || !z[i].im.is_finite() {
                return None;
            }
        }
        if converged {
            return Some(z);
        }
    }
    None
}

/// Companion-matrix eigenvalues. A complex d x d companion matrix is
/// embedded as the real 2d x 2d block matrix [[Re, -Im], [Im, Re]]; its
/// spectrum is the union of the spectrum of the companion and its conjugate.
/// Newton-polishing every candidate leaves only genuine roots, which are
/// then selected with multiplicities.
fn companion_fallback(p: &Poly<C64>, opts: &RootOpts) -> Result<Vec<C64>, PolyError> {
    let d = p.degree().unwrap();
    let lead = *p.leading().unwrap();
    let monic = p.scale(&(C64::new(1.0, 0.0) / lead));
    let mut re = DMatrix::<f64>::zeros(d, d);
    let mut im = DMatrix::<f64>::zeros(d, d);
    for i in 1..d {
        re[(i, i - 1)] = 1.0;
    }
    for i in 0..d {
        let c = -monic.coeff(i);
        re[(i, d - 1)] = c.re;
        im[(i, d - 1)] = c.im;
    }
    let mut emb = DMatrix::<f64>::zeros(2 * d, 2 * d);
    emb.view_mut((0, 0), (d, d)).copy_from(&re);
    emb.view_mut((0, d), (d, d)).copy_from(&(-im.clone()));
    emb.view_mut((d, 0), (d, d)).copy_from(&im);
    emb.view_mut((d, d), (d, d)).copy_from(&re);
    let eig = emb.complex_eigenvalues();

    let dp = monic.derivative();
    let mut polished: Vec<C64> = Vec::new();
    for lam in eig.iter() {
        let mut x = C64::new(lam.re, lam.im);
        for _ in 0..50 {
            let pv = monic.eval(&x);
            let dv = dp.eval(&x);
            if dv.norm() < 1e-300 {
                break;
            }
            let step = pv / dv;
            x -= step;
            if step.norm() <= 1e-15 * (1.0 + x.norm()) {
                break;
            }
        }
        let scale = eval_abs(&monic, x).max(f64::MIN_POSITIVE);
        if monic.eval(&x).norm() <= opts.tol_root * scale {
            polished.push(x);
        }
    }
    if polished.is_empty() {
        return Err(PolyError::NonConvergence(opts.max_iters));
    }
    // Distinct approximate roots, then multiplicities from derivative scale.
    let clusters = cluster_roots(&polished, 1e-6);
    let mut out = Vec::new();
    for (v, _) in &clusters.points {
        let m = local_multiplicity_estimate(&monic, *v);
        for _ in 0..m {
            out.push(*v);
        }
    }
    if out.len() != d {
        return Err(PolyError::NonConvergence(opts.max_iters));
    }
    Ok(out)
}

/// Multiplicity of an (approximate) root: the first derivative order whose
/// magnitude at the point reaches the generic scale.
fn local_multiplicity_estimate(p: &Poly<C64>, v: C64) -> usize {
    let d = p.degree().unwrap();
    let mut q = p.clone();
    let mut fact = 1.0;
    for k in 1..=d {
        q = q.derivative();
        fact *= k as f64;
        let scale = eval_abs(&q, v).max(f64::MIN_POSITIVE);
        if (q.eval(&v) / fact).norm() > 1e-6 * scale / fact {
            return k;
        }
    }
    d
}

/// Smallest pairwise distance between cluster centers, relative to scale.
fn closest_pair(set: &RootSet) -> f64 {
    let mut best = f64::INFINITY;
    for (i, (a, _)) in set.points.iter().enumerate() {
        for (b, _) in set.points.iter().skip(i + 1) {
            let d = (a - b).norm() / (1.0 + a.norm());
            best = best.min(d);
        }
    }
    best
}

/// Greedy transitive clustering with a radius relative to the local scale;
/// centroids are multiplicity-weighted means.
fn cluster_roots(values: &[C64], factor: f64) -> RootSet {
    let n = values.len();
    let mut used = vec![false; n];
    let mut points = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let mut members = vec![values[i]];
        used[i] = true;
        let mut frontier = vec![values[i]];
        while let Some(v) = frontier.pop() {
            let radius = factor * (1.0 + v.norm());
            for j in 0..n {
                if !used[j] && (values[j] - v).norm() <= radius {
                    used[j] = true;
                    members.push(values[j]);
                    frontier.push(values[j]);
                }
            }
        }
        let m = members.len();
        let centroid = members.iter().sum::<C64>() / (m as f64);
        points.push((centroid, m));
    }
    points.sort_by(|a, b| (a.0.re, a.0.im).partial_cmp(&(b.0.re, b.0.im)).unwrap());
    RootSet { points }
}

/// Degree of gcd(p, p') estimated from the numeric rank of the Sylvester
/// matrix of (p, p'): deg gcd = (rows) - rank.
pub fn gcd_degree_estimate(p: &Poly<C64>) -> Option<usize> {
    let d = p.degree()?;
    if d < 2 {
        return Some(0);
    }
    let dp = p.derivative();
    let n = d + dp.degree()?;
    let mut m = DMatrix::<C64>::zeros(n, n);
    let write =
        |m: &mut DMatrix<C64>, row: usize, shift: usize, coeffs: &[C64], deg: usize| {
            for (k, c) in coeffs.iter().enumerate() {
                m[(row, shift + deg - k)] = *c;
            }
        };
    let dq = dp.degree().unwrap();
    for row in 0..dq {
        write(&mut m, row, row, p.coeffs(), d);
    }
    for row in 0..d {
        write(&mut m, dq + row, row, dp.coeffs(), dq);
    }
    let svd = m.svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Some(d);
    }
    let rank = svd
        .singular_values
        .iter()
        .filter(|s| **s > tol::TOL_RANK * smax)
        .count();
    Some(n - rank)
}

/// Reconcile clustering multiplicities with the Sylvester-rank gcd degree by
/// walking the radius ladder. Falls back to the default-radius clustering.
fn confirm_against_gcd(
    reduced: &Poly<C64>,
    values: &[C64],
    initial: &RootSet,
    base_factor: f64,
) -> RootSet {
    let Some(gdeg) = gcd_degree_estimate(reduced) else {
        return initial.clone();
    };
    let d = reduced.degree().unwrap();
    let expect_distinct = d - gdeg;
    if initial.points.len() == expect_distinct {
        return initial.clone();
    }
    let mut factor = base_factor;
    for _ in 0..5 {
        factor *= 10.0;
        let set = cluster_roots(values, factor);
        if set.points.len() == expect_distinct {
            return set;
        }
        if set.points.len() < expect_distinct {
            break;
        }
    }
    let mut factor = base_factor;
    for _ in 0..3 {
        factor /= 10.0;
        let set = cluster_roots(values, factor);
        if set.points.len() == expect_distinct {
            return set;
        }
    }
    initial.clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[f64]) -> Poly<C64> {
        Poly::new(v.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    #[test]
    fn quadratic_exact() {
        // z^2 + 1 -> {i, -i}
        let set = roots(&p(&[1.0, 0.0, 1.0])).unwrap();
        assert_eq!(set.total_multiplicity(), 2);
        let mut ims: Vec<f64> = set.points.iter().map(|(v, _)| v.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-12 && (ims[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_monomial_multiplicity() {
        // z^3 -> {0: 3}
        let set = roots(&p(&[0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(set.points.len(), 1);
        assert_eq!(set.points[0], (C64::zero(), 3));
    }

    #[test]
    fn factored_cubic() {
        // z^3 - 2z = z(z - sqrt2)(z + sqrt2)
        let set = roots(&p(&[0.0, -2.0, 0.0, 1.0])).unwrap();
        assert_eq!(set.points.len(), 3);
        let mut res: Vec<f64> = set.points.iter().map(|(v, _)| v.re).collect();
        res.sort_by(f64::total_cmp);
        let s = 2.0_f64.sqrt();
        assert!((res[0] + s).abs() < 1e-10);
        assert!(res[1].abs() < 1e-10);
        assert!((res[2] - s).abs() < 1e-10);
    }

    #[test]
    fn triple_root_detected() {
        // (z - 1)^3
        let q = p(&[-1.0, 1.0]).pow(3);
        let set = roots(&q).unwrap();
        assert_eq!(set.points.len(), 1, "{:?}", set);
        assert_eq!(set.points[0].1, 3);
        assert!((set.points[0].0 - C64::new(1.0, 0.0)).norm() < 1e-7);
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            roots(&Poly::<C64>::zero()),
            Err(PolyError::ZeroPolynomial)
        ));
    }

    #[test]
    fn random_count_matches_degree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let d = rng.gen_range(1..=20);
            let coeffs: Vec<C64> = (0..=d)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let q = Poly::new(coeffs);
            if q.degree() != Some(d) {
                continue;
            }
            let set = roots(&q).unwrap();
            assert_eq!(set.total_multiplicity(), d);
        }
    }
}
