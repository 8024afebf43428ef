//! Dynamical-degree profiles of the explicit model actions, the
//! monotonicity (unimodality) check, and the spectral bounds they imply.

use super::CohomError;
use nalgebra::DMatrix;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DegreeSource {
    ProjectiveEndo,
    GraphSum,
    SymmetricProduct,
    MatrixFamily,
}

/// Degrees d_0..d_k of a model action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub degrees: Vec<u128>,
    pub source: DegreeSource,
}

impl DegreeProfile {
    pub fn k(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.degrees.iter().map(|d| *d as f64).collect()
    }
}

/// Endomorphism of projective k-space of algebraic degree s: d_q = s^q.
pub fn degrees_projective(s: u128, k: usize) -> DegreeProfile {
    DegreeProfile {
        degrees: (0..=k).map(|q| s.pow(q as u32)).collect(),
        source: DegreeSource::ProjectiveEndo,
    }
}

/// Union of the graphs of a degree-s1 endomorphism and the adjoint of a
/// degree-s2 one: d_q = s1^q + s2^(k-q). Monotonicity fails here for many
/// (s1, s2).
pub fn degrees_graph_sum(s1: u128, s2: u128, k: usize) -> DegreeProfile {
    DegreeProfile {
        degrees: (0..=k)
            .map(|q| s1.pow(q as u32) + s2.pow((k - q) as u32))
            .collect(),
        source: DegreeSource::GraphSum,
    }
}

/// k-fold symmetric product of a bidegree (d0, d1) correspondence:
/// d_q = d1^q d0^(k-q).
pub fn degrees_sym_product(d0: u128, d1: u128, k: usize) -> DegreeProfile {
    DegreeProfile {
        degrees: (0..=k)
            .map(|q| d1.pow(q as u32) * d0.pow((k - q) as u32))
            .collect(),
        source: DegreeSource::SymmetricProduct,
    }
}

/// Verdict of the unimodality check: the profile should rise to a plateau
/// and then fall; a valley (a strict increase after a strict decrease)
/// violates it. Violations list the indices of the offending steps.
#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityVerdict {
    pub holds: bool,
    pub violations: Vec<usize>,
}

pub fn monotonicity_check(profile: &DegreeProfile) -> MonotonicityVerdict {
    let d = &profile.degrees;
    let decreases: Vec<usize> = (0..d.len() - 1).filter(|&i| d[i] > d[i + 1]).collect();
    let increases: Vec<usize> = (0..d.len() - 1).filter(|&i| d[i] < d[i + 1]).collect();
    let mut violations = Vec::new();
    for &i in &decreases {
        if increases.iter().any(|&j| j > i) {
            violations.push(i);
        }
    }
    for &j in &increases {
        if decreases.iter().any(|&i| i < j) {
            violations.push(j);
        }
    }
    violations.sort_unstable();
    violations.dedup();
    MonotonicityVerdict {
        holds: violations.is_empty(),
        violations,
    }
}

/// Upper bounds for the degrees of the paired system (f, f^{-1}) on the
/// product, one per order l = 0..2k:
/// bound_l = max over admissible (r, s) of sqrt(d_r d_s d_{k-l+r} d_{k-l+s}).
/// At l = k the maximum is d_q^2, attained at (r, s) = (q, q).
pub fn kunneth_bound(profile: &DegreeProfile) -> Vec<f64> {
    let k = profile.k();
    let d = profile.as_f64();
    (0..=2 * k)
        .map(|l| {
            let lo = l.saturating_sub(k);
            let hi = l.min(k);
            let mut best: f64 = 0.0;
            for r in lo..=hi {
                for s in lo..=hi {
                    let v = (d[r] * d[s] * d[k + r - l] * d[k + s - l]).sqrt();
                    best = best.max(v);
                }
            }
            best
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct RpqEntry {
    pub p: usize,
    pub q: usize,
    pub spectral_radius: f64,
    pub bound: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RpqReport {
    pub entries: Vec<RpqEntry>,
    pub all_ok: bool,
}

/// Check the mixed-degree spectral bound r_{p,q} <= sqrt(d_p d_q) for the
/// supplied actions on (p, q)-classes.
pub fn rpq_bound_check(
    actions: &[((usize, usize), DMatrix<f64>)],
    profile: &DegreeProfile,
    rel_tol: f64,
) -> Result<RpqReport, CohomError> {
    let d = profile.as_f64();
    let mut entries = Vec::new();
    for ((p, q), m) in actions {
        if *p > profile.k() || *q > profile.k() {
            return Err(CohomError::Precondition(format!(
                "action index ({p},{q}) outside profile range"
            )));
        }
        if !m.is_square() {
            return Err(CohomError::NotSquare);
        }
        let radius = m
            .complex_eigenvalues()
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max);
        let bound = (d[*p] * d[*q]).sqrt();
        entries.push(RpqEntry {
            p: *p,
            q: *q,
            spectral_radius: radius,
            bound,
            ok: radius <= bound * (1.0 + rel_tol),
        });
    }
    let all_ok = entries.iter().all(|e| e.ok);
    Ok(RpqReport { entries, all_ok })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimpleActionVerdict {
    pub simple: bool,
    pub main_order: Option<usize>,
    pub detail: String,
}

/// Simple action: a unique order q with strictly maximal degree whose action
/// has a unique eigenvalue of maximal modulus, simple and equal to d_q.
pub fn simple_action_check(
    actions: &[(usize, DMatrix<f64>)],
    profile: &DegreeProfile,
) -> Result<SimpleActionVerdict, CohomError> {
    let d = &profile.degrees;
    let max_deg = *d.iter().max().unwrap();
    let maximizers: Vec<usize> = (0..d.len()).filter(|&q| d[q] == max_deg).collect();
    if maximizers.len() != 1 {
        return Ok(SimpleActionVerdict {
            simple: false,
            main_order: None,
            detail: format!("maximal degree attained at orders {maximizers:?}"),
        });
    }
    let q = maximizers[0];
    let Some((_, m)) = actions.iter().find(|(order, _)| *order == q) else {
        return Err(CohomError::Precondition(format!(
            "no action supplied for the maximizing order {q}"
        )));
    };
    let eigs = m.complex_eigenvalues();
    let radius = eigs.iter().map(|l| l.norm()).fold(0.0, f64::max);
    let tol = 1e-8 * (1.0 + radius);
    let top: Vec<_> = eigs.iter().filter(|l| l.norm() >= radius - tol).collect();
    if top.len() != 1 {
        return Ok(SimpleActionVerdict {
            simple: false,
            main_order: Some(q),
            detail: format!("{} eigenvalues of maximal modulus", top.len()),
        });
    }
    let top = top[0];
    if top.im.abs() > tol || (top.re - d[q] as f64).abs() > tol {
        return Ok(SimpleActionVerdict {
            simple: false,
            main_order: Some(q),
            detail: format!("top eigenvalue {top} differs from degree {}", d[q]),
        });
    }
    Ok(SimpleActionVerdict {
        simple: true,
        main_order: Some(q),
        detail: "unique simple maximal eigenvalue matches the degree".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_profile() {
        assert_eq!(degrees_projective(2, 3).degrees, vec![1, 2, 4, 8]);
    }

    #[test]
    fn graph_sum_profile_and_failure() {
        let p = degrees_graph_sum(2, 2, 3);
        assert_eq!(p.degrees, vec![9, 6, 6, 9]);
        let v = monotonicity_check(&p);
        assert!(!v.holds);
        assert_eq!(v.violations, vec![0, 2]);
    }

    #[test]
    fn sym_product_profile() {
        assert_eq!(degrees_sym_product(2, 3, 2).degrees, vec![4, 6, 9]);
    }

    #[test]
    fn monotone_profiles_hold() {
        assert!(monotonicity_check(&degrees_projective(2, 3)).holds);
        assert!(monotonicity_check(&degrees_sym_product(2, 3, 2)).holds);
    }

    #[test]
    fn kunneth_bound_values() {
        // k=1, [1,3]: bounds [3, 9, 3]; middle is max d_r d_s = 9 = d_1^2.
        let p = DegreeProfile {
            degrees: vec![1, 3],
            source: DegreeSource::MatrixFamily,
        };
        let b = kunneth_bound(&p);
        assert_eq!(b.len(), 3);
        assert!((b[0] - 3.0).abs() < 1e-12);
        assert!((b[1] - 9.0).abs() < 1e-12);
        assert!((b[2] - 3.0).abs() < 1e-12);
        // automorphism: all ones
        let p1 = DegreeProfile {
            degrees: vec![1, 1],
            source: DegreeSource::MatrixFamily,
        };
        assert!(kunneth_bound(&p1).iter().all(|b| (b - 1.0).abs() < 1e-12));
        // k=2, [1,2,4]: at l = k the bound is 16 = d_2^2
        let p2 = DegreeProfile {
            degrees: vec![1, 2, 4],
            source: DegreeSource::MatrixFamily,
        };
        let b2 = kunneth_bound(&p2);
        assert!((b2[2] - 16.0).abs() < 1e-12);
    }

    #[test]
    fn kunneth_middle_is_square_of_max_degree() {
        // brute-force maximization oracle equals d_q^2 at l = k
        for (d0, d1, k) in [(2u128, 3u128, 2usize), (1, 4, 3), (2, 2, 2)] {
            let p = degrees_sym_product(d0, d1, k);
            let b = kunneth_bound(&p);
            let dq = *p.degrees.iter().max().unwrap() as f64;
            assert!((b[k] - dq * dq).abs() < 1e-9);
        }
    }

    #[test]
    fn rpq_diagonal_models_pass_and_violation_flagged() {
        // diagonal actions d_q I on the product of spheres: equality cases
        let profile = degrees_sym_product(2, 3, 2);
        let mk = |v: f64| DMatrix::from_diagonal_element(2, 2, v);
        let actions = vec![
            ((0usize, 0usize), mk(4.0)),
            ((1, 1), mk(6.0)),
            ((2, 2), mk(9.0)),
            ((1, 2), mk((6.0f64 * 9.0).sqrt())),
        ];
        let rep = rpq_bound_check(&actions, &profile, 1e-9).unwrap();
        assert!(rep.all_ok);
        let bad = vec![((1usize, 1usize), mk(6.5))];
        let rep = rpq_bound_check(&bad, &profile, 1e-9).unwrap();
        assert!(!rep.all_ok);
    }

    #[test]
    fn simple_action_detects_main_degree() {
        let profile = degrees_sym_product(2, 3, 2); // [4, 6, 9], max at q=2
        let actions = vec![
            (0usize, DMatrix::from_diagonal_element(1, 1, 4.0)),
            (1, DMatrix::from_diagonal_element(1, 1, 6.0)),
            (2, DMatrix::from_diagonal_element(1, 1, 9.0)),
        ];
        let v = simple_action_check(&actions, &profile).unwrap();
        assert!(v.simple);
        assert_eq!(v.main_order, Some(2));
        // non-simple top eigenvalue
        let actions = vec![(
            2usize,
            DMatrix::from_diagonal_element(2, 2, 9.0),
        )];
        let v = simple_action_check(&actions, &profile).unwrap();
        assert!(!v.simple);
    }
}
