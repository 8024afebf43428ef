//! The k-fold symmetric product: the degree-k! covering from the k-fold
//! sphere product to projective k-space by elementary-symmetric
//! coordinates, semiconjugacy checks for induced correspondences, induced
//! degree profiles, and the adjoint-multiplicity bound.

use crate::cohomlin::{degrees_sym_product, DegreeProfile};
use crate::corr1::{Corr1, CorrError, P1Point};
use crate::polyalg::{self, Poly, C64};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SymprodError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("induced-map fit failed: {0}")]
    FitFailed(String),
    #[error(transparent)]
    Corr(#[from] CorrError),
    #[error(transparent)]
    Poly(#[from] polyalg::PolyError),
}

/// A point of the k-fold product in homogeneous coordinates.
pub type HomPoint = (C64, C64);

/// Canonical representative: scale so the larger coordinate is 1.
fn normalize_hom(p: HomPoint) -> HomPoint {
    let (x, y) = p;
    if x.norm() >= y.norm() {
        (C64::new(1.0, 0.0), y / x)
    } else {
        (x / y, C64::new(1.0, 0.0))
    }
}

/// The covering map: eta_j = sum over {0,1}-vectors with sum = k - j of
/// prod x_l^{i_l} y_l^{1-i_l}; the coefficients of prod (x_l t + y_l).
/// Inputs are canonically normalized and sorted first, so the output is
/// exactly invariant under permutations of the input tuple.
pub fn pi_map(points: &[HomPoint]) -> Vec<C64> {
    let k = points.len();
    assert!(k >= 1);
    let mut normd: Vec<HomPoint> = points.iter().map(|p| normalize_hom(*p)).collect();
    normd.sort_by(|a, b| {
        (a.0.re, a.0.im, a.1.re, a.1.im)
            .partial_cmp(&(b.0.re, b.0.im, b.1.re, b.1.im))
            .unwrap()
    });
    // prod (x_l t + y_l), ascending in t
    let mut coeffs = vec![C64::new(1.0, 0.0)];
    for (x, y) in normd {
        let mut next = vec![C64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i] += c * y;
            next[i + 1] += c * x;
        }
        coeffs = next;
    }
    // eta_j is the coefficient of t^{k-j}
    let eta: Vec<C64> = (0..=k).map(|j| coeffs[k - j]).collect();
    assert!(
        eta.iter().any(|c| c.norm() > 0.0),
        "covering image cannot vanish"
    );
    eta
}

/// Unordered fiber of the covering over a projective point: the multiset of
/// k sphere points whose symmetric coordinates give eta. Roots of
/// sum_j eta_j t^{k-j}, plus [0:1] for each degree drop.
pub fn pi_fiber(eta: &[C64]) -> Result<Vec<P1Point>, SymprodError> {
    let k = eta.len() - 1;
    // ascending polynomial in t: coefficient of t^m is eta_{k-m}
    let coeffs: Vec<C64> = (0..=k).map(|m| eta[k - m]).collect();
    let p = Poly::new(coeffs);
    if p.is_zero() {
        return Err(SymprodError::Precondition("zero coordinate vector".into()));
    }
    let deg = p.degree().unwrap_or(0);
    let mut out = Vec::with_capacity(k);
    if deg > 0 {
        for (t, m) in polyalg::roots(&p)?.points {
            // factor (x t + y) with root t: the point [1 : -t], i.e. z = -1/t
            for _ in 0..m {
                if t.norm() == 0.0 {
                    out.push(P1Point::infinity());
                } else {
                    out.push(P1Point::finite(-1.0 / t));
                }
            }
        }
    }
    for _ in deg..k {
        // dropped factors are [0 : 1], the point z = 0
        out.push(P1Point::finite(C64::new(0.0, 0.0)));
    }
    Ok(out)
}

/// Chordal (Fubini-Study) distance between projective points of any
/// dimension: sin of the angle between the lines, computed through the
/// orthogonal rejection so small angles do not cancel away.
pub fn proj_dist(u: &[C64], v: &[C64]) -> f64 {
    let nu2: f64 = u.iter().map(|c| c.norm_sqr()).sum();
    let nv2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
    if nu2 == 0.0 || nv2 == 0.0 {
        return 1.0;
    }
    let inner: C64 = v.iter().zip(u).map(|(b, a)| b * a.conj()).sum();
    let coef = inner / nu2;
    let rej2: f64 = v
        .iter()
        .zip(u)
        .map(|(b, a)| (b - coef * a).norm_sqr())
        .sum();
    (rej2 / nv2).min(1.0).sqrt()
}

fn hom_of_point(p: P1Point) -> HomPoint {
    match p.to_affine() {
        Some(z) => (z, C64::new(1.0, 0.0)),
        None => (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
    }
}

/// Semiconjugacy residual report for the induced correspondence.
#[derive(Clone, Debug, Serialize)]
pub struct SemiconjugacyReport {
    pub samples: usize,
    pub max_residual: f64,
}

/// At random product points x, compare the covering image of the product
/// correspondence's branches against the induced correspondence evaluated
/// through the fiber reconstruction: project x, reconstruct the unordered
/// fiber, push it forward coordinatewise, and match the two multisets of
/// projective points.
pub fn semiconjugacy_check(
    h: &Corr1,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<SemiconjugacyReport, SymprodError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let tuple: Vec<P1Point> = (0..k)
            .map(|_| {
                P1Point::finite(C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            })
            .collect();
        // direct route: branches of the product correspondence
        let lhs = product_images(h, &tuple)?;
        // covering route: project, reconstruct the fiber, push forward
        let eta = pi_map(&tuple.iter().map(|p| hom_of_point(*p)).collect::<Vec<_>>());
        let fiber = pi_fiber(&eta)?;
        let rhs = product_images(h, &fiber)?;
        if lhs.len() != rhs.len() {
            return Err(SymprodError::FitFailed(format!(
                "branch counts differ: {} vs {}",
                lhs.len(),
                rhs.len()
            )));
        }
        // greedy multiset matching
        let mut remaining = rhs;
        for u in lhs {
            let (idx, d) = remaining
                .iter()
                .enumerate()
                .map(|(i, v)| (i, proj_dist(&u, v)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            worst = worst.max(d);
            remaining.swap_remove(idx);
        }
    }
    Ok(SemiconjugacyReport {
        samples,
        max_residual: worst,
    })
}

/// All covering images of the forward branches of the product
/// correspondence at a product point: one projective point per branch
/// combination, with multiplicity.
fn product_images(h: &Corr1, tuple: &[P1Point]) -> Result<Vec<Vec<C64>>, SymprodError> {
    let fibers: Vec<Vec<P1Point>> = tuple
        .iter()
        .map(|p| h.forward(*p).map(|f| f.with_multiplicity()))
        .collect::<Result<_, _>>()?;
    let mut combos: Vec<Vec<HomPoint>> = vec![vec![]];
    for fiber in &fibers {
        let mut next = Vec::with_capacity(combos.len() * fiber.len());
        for combo in &combos {
            for w in fiber {
                let mut c = combo.clone();
                c.push(hom_of_point(*w));
                next.push(c);
            }
        }
        combos = next;
    }
    Ok(combos.iter().map(|c| pi_map(c)).collect())
}

/// Induced degree profile of the k-fold symmetric product.
pub fn induced_degrees(d0: u128, d1: u128, k: usize) -> DegreeProfile {
    degrees_sym_product(d0, d1, k)
}

pub fn factorial(k: usize) -> usize {
    (1..=k).product()
}

/// Adjoint-multiplicity bound for the induced correspondence:
/// delta(f^N) <= k! * delta(fhat^N).
pub fn delta_product_bound(delta_hat: usize, k: usize) -> usize {
    factorial(k) * delta_hat
}

/// For product correspondences the adjoint multiplicity multiplies over
/// the factors: delta(fhat) = delta(h)^k. A checked assumption, verified
/// empirically on instances.
pub fn delta_hat_of_product(delta_h: usize, k: usize) -> usize {
    delta_h.pow(k as u32)
}

/// Reconstruction of the affine induced endomorphism on symmetric
/// coordinates: for a single-valued polynomial map g, the induced map
/// sends the affine chart (eta_0, ..., eta_{k-1}, 1) polynomially with
/// total degree deg g. Fitted by least squares on sampled orbits.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub k: usize,
    pub degree: usize,
    /// components[j] lists (exponent vector over the k affine coordinates,
    /// coefficient).
    pub components: Vec<Vec<(Vec<usize>, C64)>>,
}

impl InducedMap {
    pub fn eval(&self, u: &[C64]) -> Vec<C64> {
        self.components
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|(exps, c)| {
                        let mut v = *c;
                        for (e, x) in exps.iter().zip(u) {
                            for _ in 0..*e {
                                v *= x;
                            }
                        }
                        v
                    })
                    .sum()
            })
            .collect()
    }
}

fn monomials(k: usize, max_deg: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; k];
    fn rec(
        idx: usize,
        remaining: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == cur.len() {
            out.push(cur.clone());
            return;
        }
        for e in 0..=remaining {
            cur[idx] = e;
            rec(idx + 1, remaining - e, cur, out);
        }
        cur[idx] = 0;
    }
    rec(0, max_deg, &mut cur, &mut out);
    out
}

/// Fit the induced map of the k-fold product of the affine polynomial map
/// z -> g(z) by evaluation-interpolation in symmetric coordinates.
pub fn reconstruct_induced(
    g: &Poly<C64>,
    k: usize,
    seed: u64,
) -> Result<InducedMap, SymprodError> {
    use rand::{Rng, SeedableRng};
    let d = g
        .degree()
        .ok_or_else(|| SymprodError::Precondition("zero map".into()))?;
    let monos = monomials(k, d);
    let m = monos.len();
    let n_samples = 2 * m + 8;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n_samples);
    let mut targets: Vec<Vec<C64>> = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let z: Vec<C64> = (0..k)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let eta = pi_map(&z.iter().map(|z| (*z, C64::new(1.0, 0.0))).collect::<Vec<_>>());
        // affine chart: last coordinate is prod of y's = 1
        let u: Vec<C64> = eta[..k].iter().map(|c| *c / eta[k]).collect();
        let gz: Vec<HomPoint> = z.iter().map(|z| (g.eval(z), C64::new(1.0, 0.0))).collect();
        let eta_out = pi_map(&gz);
        let u_out: Vec<C64> = eta_out[..k].iter().map(|c| *c / eta_out[k]).collect();
        rows.push(u);
        targets.push(u_out);
    }
    // Vandermonde-style least squares per component.
    let mut a = DMatrix::<Complex<f64>>::zeros(n_samples, m);
    for (si, u) in rows.iter().enumerate() {
        for (mi, exps) in monos.iter().enumerate() {
            let mut v = C64::new(1.0, 0.0);
            for (e, x) in exps.iter().zip(u) {
                for _ in 0..*e {
                    v *= x;
                }
            }
            a[(si, mi)] = v;
        }
    }
    let svd = a.clone().svd(true, true);
    let mut components = Vec::with_capacity(k);
    for j in 0..k {
        let b = DVector::from_iterator(n_samples, targets.iter().map(|t| t[j]));
        let x = svd
            .solve(&b, 1e-12)
            .map_err(|e| SymprodError::FitFailed(e.to_string()))?;
        let resid = (&a * &x - &b).norm();
        if resid > 1e-6 * (1.0 + b.norm()) {
            return Err(SymprodError::FitFailed(format!(
                "component {j} residual {resid:.3e}"
            )));
        }
        let terms: Vec<(Vec<usize>, C64)> = monos
            .iter()
            .zip(x.iter())
            .filter(|(_, c)| c.norm() > 1e-9)
            .map(|(e, c)| (e.clone(), *c))
            .collect();
        components.push(terms);
    }
    Ok(InducedMap {
        k,
        degree: d,
        components,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pi_map_binomial_example() {
        // k = 2, both points [1:1]: coefficients of (t+1)^2 -> [1:2:1]
        let eta = pi_map(&[(c(1.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(1.0, 0.0))]);
        assert_eq!(eta.len(), 3);
        let scale = eta[0];
        assert!((eta[1] / scale - c(2.0, 0.0)).norm() < 1e-14);
        assert!((eta[2] / scale - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn pi_map_symmetric_functions() {
        // ([a:1],[b:1]) -> [ab : a + b : 1]
        let (a, b) = (c(1.5, 0.25), c(-0.5, 1.0));
        let eta = pi_map(&[(a, c(1.0, 0.0)), (b, c(1.0, 0.0))]);
        let s = eta[2];
        assert!((eta[0] / s - a * b).norm() < 1e-13);
        assert!((eta[1] / s - (a + b)).norm() < 1e-13);
    }

    #[test]
    fn pi_map_exact_permutation_invariance() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let k = rng.gen_range(2..=4usize);
            let pts: Vec<HomPoint> = (0..k)
                .map(|_| {
                    (
                        c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                        c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                    )
                })
                .collect();
            let eta = pi_map(&pts);
            let mut perm = pts.clone();
            perm.reverse();
            if k > 2 {
                perm.swap(0, 1);
            }
            let eta2 = pi_map(&perm);
            assert_eq!(eta, eta2, "covering image must be exactly symmetric");
        }
    }

    #[test]
    fn generic_fiber_has_k_factorial_orderings() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for k in [2usize, 3] {
            let pts: Vec<HomPoint> = (0..k)
                .map(|_| {
                    (
                        c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
                        c(1.0, 0.0),
                    )
                })
                .collect();
            let eta = pi_map(&pts);
            let fiber = pi_fiber(&eta).unwrap();
            assert_eq!(fiber.len(), k);
            // all k points distinct generically -> k! ordered tuples
            for i in 0..k {
                for j in i + 1..k {
                    assert!(crate::corr1::chordal_dist(fiber[i], fiber[j]) > 1e-9);
                }
            }
            // each recovered point matches an input point
            for p in &fiber {
                let best = pts
                    .iter()
                    .map(|(x, y)| {
                        let q = if y.norm() > 0.0 {
                            P1Point::finite(x / y)
                        } else {
                            P1Point::infinity()
                        };
                        crate::corr1::chordal_dist(*p, q)
                    })
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-8, "fiber point {p:?} unmatched ({best})");
            }
        }
    }

    #[test]
    fn semiconjugacy_for_squaring() {
        let h = crate::testutil::squaring();
        let rep = semiconjugacy_check(&h, 2, 50, 11).unwrap();
        assert!(rep.max_residual < 1e-9, "residual {}", rep.max_residual);
    }

    #[test]
    fn semiconjugacy_for_family_instance() {
        let h = Corr1::family(2, 3, crate::corr1::cq(5.0, 0.0)).unwrap();
        let rep = semiconjugacy_check(&h, 2, 100, 13).unwrap();
        assert!(rep.max_residual < 1e-9, "residual {}", rep.max_residual);
    }

    #[test]
    fn induced_degrees_delegate() {
        assert_eq!(induced_degrees(2, 3, 2).degrees, vec![4, 6, 9]);
    }

    #[test]
    fn delta_bound_values() {
        assert_eq!(delta_product_bound(1, 2), 2);
        assert_eq!(delta_product_bound(delta_hat_of_product(2, 3), 3), 48);
    }

    #[test]
    fn induced_map_of_squaring_matches_explicit_formula() {
        // g = z^2, k = 2: in coordinates (u0, u1) = (z1 z2, z1 + z2) the
        // induced map is (u0^2, u1^2 - 2 u0).
        let g = Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let ind = reconstruct_induced(&g, 2, 5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let u = vec![
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ];
            let got = ind.eval(&u);
            let expect = vec![u[0] * u[0], u[1] * u[1] - 2.0 * u[0]];
            for (a, b) in got.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-8, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn induced_map_residuals_on_fresh_samples() {
        // structural check for graphs {g0(z) = g1(w)}: the reconstructed
        // induced endomorphisms satisfy G0(pi(z)) = G1(pi(w)) on sampled
        // graph points. For h = squaring, g0 = z^2 and g1 = w.
        let g0 = Poly::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let g1 = Poly::new(vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let ind0 = reconstruct_induced(&g0, 2, 7).unwrap();
        let ind1 = reconstruct_induced(&g1, 2, 7).unwrap();
        let h = crate::testutil::squaring();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let z = vec![
                c(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)),
                c(rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)),
            ];
            // one branch of the product correspondence
            let w: Vec<C64> = z
                .iter()
                .map(|zi| {
                    h.forward(P1Point::finite(*zi)).unwrap().points[0]
                        .0
                        .to_affine()
                        .unwrap()
                })
                .collect();
            let uz = affine_sym(&z);
            let uw = affine_sym(&w);
            let lhs = ind0.eval(&uz);
            let rhs = ind1.eval(&uw);
            let d: f64 = lhs
                .iter()
                .zip(&rhs)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            worst = worst.max(d);
        }
        assert!(worst < 1e-8, "residual {worst}");
    }

    fn affine_sym(z: &[C64]) -> Vec<C64> {
        let eta = pi_map(&z.iter().map(|z| (*z, c(1.0, 0.0))).collect::<Vec<_>>());
        let k = z.len();
        eta[..k].iter().map(|v| *v / eta[k]).collect()
    }
}
