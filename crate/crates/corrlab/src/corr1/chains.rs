//! Chains and cycles: depth-first enumeration over forward branches with
//! per-step residual control.

use super::point::{chordal_dist, P1Point};
use super::{Corr1, CorrError};
use crate::polyalg::{BiPoly, Var, C64};
use crate::tol;

/// An orbit segment (w_0, ..., w_{n-1}) with w_i in f(w_{i-1}); a cycle
/// additionally has w_0 in f(w_{n-1}).
#[derive(Clone, Debug)]
pub struct Chain {
    pub points: Vec<P1Point>,
    pub is_cycle: bool,
    /// |F(w_{i-1}, w_i)| per step, normalized by the coefficient scale; for
    /// cycles the closing step is appended.
    pub residuals: Vec<f64>,
}

/// Result of a chain search, including whether the node budget truncated it.
#[derive(Clone, Debug, Default)]
pub struct ChainSearch {
    pub chains: Vec<Chain>,
    pub nodes_visited: usize,
    pub truncated: bool,
}

/// Scale-normalized graph residual |F(a, b)|, evaluated in the charts where
/// both coordinates have modulus <= 1.
pub(crate) fn graph_residual(f: &Corr1, a: P1Point, b: P1Point) -> f64 {
    let mut g: BiPoly<C64> = f.graph_c64().clone();
    let an = a.normalized();
    let bn = b.normalized();
    if an.chart_index() == 1 {
        g = g.reversed(Var::Z);
    }
    if bn.chart_index() == 1 {
        g = g.reversed(Var::W);
    }
    let scale: f64 = g
        .terms()
        .map(|(_, _, c)| c.norm())
        .sum::<f64>()
        .max(f64::MIN_POSITIVE);
    g.eval(&an.chart_coord(), &bn.chart_coord()).norm() / scale
}

/// Depth-first enumeration of chains of length `n` from `w0`. When
/// `require_cycle`, only chains whose closing step returns to `w0` within
/// the residual bound are kept.
pub fn find_chains(
    f: &Corr1,
    w0: P1Point,
    n: usize,
    require_cycle: bool,
) -> Result<ChainSearch, CorrError> {
    find_chains_with(f, w0, n, require_cycle, tol::TOL_CHAIN, tol::CAP_BRANCHES)
}

pub fn find_chains_with(
    f: &Corr1,
    w0: P1Point,
    n: usize,
    require_cycle: bool,
    tol_chain: f64,
    cap_branches: usize,
) -> Result<ChainSearch, CorrError> {
    assert!(n >= 1);
    let mut search = ChainSearch::default();
    let mut stack = vec![w0];
    dfs(f, n, require_cycle, tol_chain, cap_branches, &mut stack, &mut search)?;
    Ok(search)
}

fn dfs(
    f: &Corr1,
    n: usize,
    require_cycle: bool,
    tol_chain: f64,
    cap: usize,
    stack: &mut Vec<P1Point>,
    search: &mut ChainSearch,
) -> Result<(), CorrError> {
    search.nodes_visited += 1;
    if search.nodes_visited > cap {
        search.truncated = true;
        return Ok(());
    }
    if stack.len() == n {
        let mut points = stack.clone();
        refine_chain(f, &mut points);
        let mut residuals: Vec<f64> = points
            .windows(2)
            .map(|w| graph_residual(f, w[0], w[1]))
            .collect();
        let is_cycle = {
            let closing = graph_residual(f, points[n - 1], points[0]);
            if n >= 1 && require_cycle {
                residuals.push(closing);
            }
            closing <= tol_chain
        };
        if residuals.iter().all(|r| *r <= tol_chain) && (!require_cycle || is_cycle) {
            search.chains.push(Chain {
                points,
                is_cycle,
                residuals,
            });
        }
        return Ok(());
    }
    let current = *stack.last().unwrap();
    let fiber = match f.forward(current) {
        Ok(fib) => fib,
        Err(CorrError::Poly(_)) | Err(CorrError::DegenerateFiber) => return Ok(()),
        Err(e) => return Err(e),
    };
    for (p, _) in fiber.points {
        if search.truncated {
            return Ok(());
        }
        stack.push(p);
        dfs(f, n, require_cycle, tol_chain, cap, stack, search)?;
        stack.pop();
    }
    Ok(())
}

/// One Newton step on the stacked system F(w_{i-1}, w_i) = 0, i = 1..n-1,
/// with w_0 fixed. The Jacobian is lower bidiagonal, so the update solves by
/// forward substitution. Points at infinity are left untouched.
fn refine_chain(f: &Corr1, points: &mut [P1Point]) {
    let n = points.len();
    if n < 2 {
        return;
    }
    let affine: Option<Vec<C64>> = points.iter().map(|p| p.to_affine()).collect();
    let Some(mut w) = affine else { return };
    let g = f.graph_c64();
    let gz = g.derivative(Var::Z);
    let gw = g.derivative(Var::W);
    let mut delta_prev = C64::new(0.0, 0.0);
    for i in 1..n {
        let r = g.eval(&w[i - 1], &w[i]);
        let jz = gz.eval(&w[i - 1], &w[i]);
        let jw = gw.eval(&w[i - 1], &w[i]);
        if jw.norm() < 1e-12 {
            delta_prev = C64::new(0.0, 0.0);
            continue;
        }
        let delta = (-r - jz * delta_prev) / jw;
        w[i] += delta;
        delta_prev = delta;
    }
    for (p, wi) in points.iter_mut().zip(w) {
        *p = P1Point::finite(wi);
    }
}

/// Convenience: does any chain in the search end (cyclically or not) at a
/// point chordally close to `target`?
pub fn any_endpoint_near(search: &ChainSearch, target: P1Point, tol_dist: f64) -> bool {
    search
        .chains
        .iter()
        .any(|c| chordal_dist(*c.points.last().unwrap(), target) <= tol_dist)
}

#[cfg(test)]
mod tests {
    use super::super::tests::squaring;
    use super::*;

    #[test]
    fn fixed_point_cycle_length_one() {
        let f = squaring();
        let s = find_chains(&f, P1Point::finite(C64::new(0.0, 0.0)), 1, true).unwrap();
        assert_eq!(s.chains.len(), 1);
        assert!(s.chains[0].is_cycle);
    }

    #[test]
    fn fixed_point_cycle_length_two() {
        let f = squaring();
        let s = find_chains(&f, P1Point::finite(C64::new(1.0, 0.0)), 2, true).unwrap();
        assert_eq!(s.chains.len(), 1);
        assert_eq!(s.chains[0].points.len(), 2);
        assert!(s.chains[0].residuals.iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn backward_lift_of_period_two_cycle() {
        // F = w^2 - z: forward branches are the square roots. The cycle
        // {e^{2pi i/3}, e^{4pi i/3}} of squaring is a cycle of this adjoint.
        let f = squaring().adjoint();
        let theta = 2.0 * std::f64::consts::PI / 3.0;
        let w0 = P1Point::finite(C64::from_polar(1.0, theta));
        let s = find_chains(&f, w0, 2, true).unwrap();
        assert!(!s.chains.is_empty());
        let c = &s.chains[0];
        let w1 = c.points[1].to_affine().unwrap();
        assert!((w1 - C64::from_polar(1.0, 2.0 * theta)).norm() < 1e-8);
    }

    #[test]
    fn non_cycle_rejected() {
        let f = squaring();
        let s = find_chains(&f, P1Point::finite(C64::new(2.0, 0.0)), 2, true).unwrap();
        assert!(s.chains.is_empty());
    }

    #[test]
    fn branch_cap_reports_truncation() {
        // d0 = 2 gives 2^(n-1) branches; a tiny cap must truncate loudly.
        let f = squaring().adjoint();
        let s = find_chains_with(&f, P1Point::finite(C64::new(1.0, 0.0)), 12, false, 1e-8, 50)
            .unwrap();
        assert!(s.truncated);
    }
}
