//! Exact elimination for critical chains and cycles of the parameter
//! family z^d1 (w^d0 + 3w + 1) = w^d0 + c.
//!
//! Three systems over the integers certify, respectively, a critical orbit
//! reaching infinity, a critical cycle, and an orbit of the secondary
//! critical set reaching infinity. Iterated Sylvester resultants collapse
//! each system to an exact obstruction polynomial in c; a nonzero value at
//! a given c rules the chain out, exactly.

use crate::corr1::{any_endpoint_near, find_chains, Corr1, CorrError, P1Point};
use crate::polyalg::{self, bareiss_det, BiPoly, Poly, PolyError, Var, C64, CQ};
use crate::tol;
use num::rational::BigRational;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgresError {
    #[error("elimination blowup: {0}")]
    EliminationBlowup(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Corr(#[from] CorrError),
}

/// Which displayed system to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SystemKind {
    /// Critical orbit (roots of w^d0 + c) reaching infinity after n steps.
    ToInfinity,
    /// Critical cycle of length n.
    Cycle,
    /// Secondary critical orbit (roots of w^d0 + 3w + 1) reaching infinity.
    ToCritical,
}

impl SystemKind {
    pub fn tag(&self) -> &'static str {
        match self {
            SystemKind::ToInfinity => "to-infinity",
            SystemKind::Cycle => "cycle",
            SystemKind::ToCritical => "to-critical",
        }
    }
}

/// One equation, polynomial in the chain variable w_{var} whose
/// coefficients are bivariate in (w_{aux}, c); aux is absent for the
/// opening and plain closing equations.
#[derive(Clone, Debug)]
pub struct ChainEquation {
    pub var: usize,
    pub aux: Option<usize>,
    /// coeffs[j] multiplies w_var^j; rows = aux powers, cols = c powers.
    pub coeffs: Vec<BiPoly<CQ>>,
}

impl ChainEquation {
    pub fn degree_in_var(&self) -> usize {
        self.coeffs.len() - 1
    }
}

#[derive(Clone, Debug)]
pub struct ChainSystem {
    pub kind: SystemKind,
    pub d0: usize,
    pub d1: usize,
    pub n: usize,
    pub equations: Vec<ChainEquation>,
}

fn one_cq() -> CQ {
    Complex::new(BigRational::one(), BigRational::zero())
}

fn int_cq(k: i64) -> CQ {
    Complex::new(BigRational::from_integer(k.into()), BigRational::zero())
}

/// c as a coefficient: column 1 in the (aux, c) matrix.
fn c_term() -> BiPoly<CQ> {
    BiPoly::monomial(one_cq(), 0, 1)
}

fn aux_pow(k: usize) -> BiPoly<CQ> {
    BiPoly::monomial(one_cq(), k, 0)
}

fn const_term(k: i64) -> BiPoly<CQ> {
    BiPoly::constant(int_cq(k))
}

/// w^d0 + c, the opening equation of the primary critical set.
fn opening_primary(d0: usize) -> ChainEquation {
    let mut coeffs = vec![BiPoly::zero(); d0 + 1];
    coeffs[0] = c_term();
    coeffs[d0] = const_term(1);
    ChainEquation {
        var: 0,
        aux: None,
        coeffs,
    }
}

/// w^d0 + 3w + 1, the opening equation of the secondary critical set.
fn opening_secondary(d0: usize) -> ChainEquation {
    let mut coeffs = vec![BiPoly::zero(); d0 + 1];
    coeffs[0] = const_term(1);
    coeffs[1] = coeffs[1].add(&const_term(3));
    coeffs[d0] = coeffs[d0].add(&const_term(1));
    ChainEquation {
        var: 0,
        aux: None,
        coeffs,
    }
}

/// The forward-step equation
/// w_{i-1}^d1 (w_i^d0 + 3 w_i + 1) - (w_i^d0 + c) = 0,
/// polynomial in w_i over (w_{i-1}, c).
fn step_equation(d0: usize, d1: usize, i: usize) -> ChainEquation {
    let mut coeffs = vec![BiPoly::zero(); d0 + 1];
    coeffs[d0] = coeffs[d0].add(&aux_pow(d1)).sub(&const_term(1));
    coeffs[1] = coeffs[1].add(&aux_pow(d1).scale(&int_cq(3)));
    coeffs[0] = coeffs[0].add(&aux_pow(d1)).sub(&c_term());
    ChainEquation {
        var: i,
        aux: Some(i - 1),
        coeffs,
    }
}

/// The escape equation w_{n-1}^d1 - 1 = 0 (the backward image of infinity
/// is exactly the d1-th roots of unity).
fn escape_equation(d1: usize, var: usize) -> ChainEquation {
    let mut coeffs = vec![BiPoly::zero(); d1 + 1];
    coeffs[0] = const_term(-1);
    coeffs[d1] = const_term(1);
    ChainEquation {
        var,
        aux: None,
        coeffs,
    }
}

/// The cycle-closing equation
/// w_{n-1}^d1 (w_0^d0 + 3 w_0 + 1) - (w_0^d0 + c) = 0,
/// polynomial in w_{n-1} over (w_0, c).
fn closing_equation(d0: usize, d1: usize, n: usize) -> ChainEquation {
    let mut coeffs = vec![BiPoly::zero(); d1 + 1];
    let inner = aux_pow(d0)
        .add(&aux_pow(1).scale(&int_cq(3)))
        .add(&const_term(1));
    coeffs[d1] = inner;
    coeffs[0] = aux_pow(d0).neg().sub(&c_term());
    ChainEquation {
        var: if n >= 1 { n - 1 } else { 0 },
        aux: Some(0),
        coeffs,
    }
}

/// Build the displayed system of equations for the given kind and length.
pub fn build_system(d0: usize, d1: usize, n: usize, kind: SystemKind) -> ChainSystem {
    assert!(d0 >= 1 && d1 >= 1 && n >= 1);
    let mut equations = Vec::with_capacity(n + 1);
    equations.push(match kind {
        SystemKind::ToCritical => opening_secondary(d0),
        _ => opening_primary(d0),
    });
    for i in 1..n {
        equations.push(step_equation(d0, d1, i));
    }
    equations.push(match kind {
        SystemKind::Cycle => {
            if n == 1 {
                // closing step returns to w_0 itself
                let mut eq = closing_equation(d0, d1, 1);
                eq.aux = None;
                // merge the aux variable (w_0) with the chain variable: the
                // closing equation of a fixed point is univariate in w_0.
                eq.coeffs = merge_aux_into_var(&closing_equation(d0, d1, 1));
                eq
            } else {
                closing_equation(d0, d1, n)
            }
        }
        _ => escape_equation(d1, n - 1),
    });
    ChainSystem {
        kind,
        d0,
        d1,
        n,
        equations,
    }
}

/// For a length-1 cycle the closing equation's aux variable coincides with
/// the chain variable; fold the aux powers into the variable powers.
fn merge_aux_into_var(eq: &ChainEquation) -> Vec<BiPoly<CQ>> {
    let mut out: Vec<BiPoly<CQ>> = Vec::new();
    for (j, coeff) in eq.coeffs.iter().enumerate() {
        for (i, k, v) in coeff.terms() {
            let deg = j + i;
            if out.len() <= deg {
                out.resize(deg + 1, BiPoly::zero());
            }
            out[deg] = out[deg].add(&BiPoly::monomial(v.clone(), 0, k));
        }
    }
    while out.last().map_or(false, |c| c.is_zero()) {
        out.pop();
    }
    out
}

/// Elimination trace: the exact obstruction polynomial with the removed
/// contents and intermediate degrees on record.
#[derive(Clone, Debug)]
pub struct EliminationRun {
    /// P(c), content-normalized to integer coefficients.
    pub obstruction: Poly<CQ>,
    /// (aux degree, c degree) after each elimination step.
    pub intermediate_degrees: Vec<(usize, usize)>,
    /// polynomial contents (factors in one variable alone) divided out,
    /// rendered as strings; they can only carry extraneous roots.
    pub contents_removed: Vec<String>,
    pub identically_zero: bool,
}

/// Iterated resultants down the chain: eliminate w_{n-1}, ..., w_0 in turn.
pub fn eliminate(system: &ChainSystem) -> Result<EliminationRun, AlgresError> {
    let eqs = &system.equations;
    let n = system.n;
    let mut degrees = Vec::new();
    let mut contents = Vec::new();

    // acc: polynomial in w_i over (w_{i-1}, c), starting from the closing
    // equation paired with the last step equation.
    let mut acc: Vec<BiPoly<CQ>> = eqs[n].coeffs.clone();
    let mut acc_aux: Option<usize> = eqs[n].aux;
    for i in (1..n).rev() {
        let step = &eqs[i];
        // both must be polynomials in w_i over a shared aux (w_{i-1});
        // anything else would need a third kept variable.
        if let Some(a) = acc_aux {
            if a != step.aux.unwrap() {
                return Err(AlgresError::EliminationBlowup(format!(
                    "eliminating w_{i} would keep both w_{} and w_{}; \
                     cycles longer than 2 need multivariate elimination",
                    a,
                    step.aux.unwrap()
                )));
            }
        }
        let res = resultant_chain_step(&step.coeffs, &acc)?;
        let res = strip_contents(res, &mut contents);
        check_cap(&res, &mut degrees)?;
        // res is bivariate in (w_{i-1}, c); reinterpret as a polynomial in
        // w_{i-1} with c-only coefficients.
        acc = res
            .as_poly_coeffs(Var::Z)
            .into_iter()
            .map(|p| BiPoly::from_poly_coeffs(Var::Z, &[p]))
            .collect();
        // acc is now a polynomial in w_{i-1} with c-only coefficients
        acc_aux = None;
    }
    if let Some(a) = acc_aux {
        if a != 0 {
            return Err(AlgresError::EliminationBlowup(format!(
                "final accumulator still depends on w_{a}"
            )));
        }
    }
    // final step: eliminate w_0 against the opening equation
    let opening = &eqs[0];
    let res = resultant_chain_step(&opening.coeffs, &acc)?;
    let res = strip_final_integer_content(res);
    check_cap(&res, &mut degrees)?;
    // the result must be free of the aux variable
    if res.deg(Var::Z).unwrap_or(0) > 0 {
        return Err(AlgresError::EliminationBlowup(
            "residual chain variable after full elimination".into(),
        ));
    }
    let p_c = res
        .as_poly_coeffs(Var::Z)
        .into_iter()
        .next()
        .unwrap_or_else(Poly::zero);
    let identically_zero = p_c.is_zero();
    let p_c = if identically_zero {
        p_c
    } else {
        p_c.content_normalize()
    };
    Ok(EliminationRun {
        obstruction: p_c,
        intermediate_degrees: degrees,
        contents_removed: contents,
        identically_zero,
    })
}

/// Sylvester resultant in the shared chain variable of two coefficient
/// stacks over (aux, c), via the fraction-free determinant.
fn resultant_chain_step(
    a: &[BiPoly<CQ>],
    b: &[BiPoly<CQ>],
) -> Result<BiPoly<CQ>, AlgresError> {
    let da = a.len() - 1;
    let db = b.len() - 1;
    if da == 0 || db == 0 {
        return Err(AlgresError::Precondition(
            "chain equations must have positive degree in the eliminated variable".into(),
        ));
    }
    let nn = da + db;
    let mut m = vec![vec![BiPoly::<CQ>::zero(); nn]; nn];
    for row in 0..db {
        for (k, coeff) in a.iter().enumerate() {
            m[row][row + da - k] = coeff.clone();
        }
    }
    for row in 0..da {
        for (k, coeff) in b.iter().enumerate() {
            m[db + row][row + db - k] = coeff.clone();
        }
    }
    Ok(bareiss_det(m))
}

/// Remove single-variable polynomial contents (and the integer content),
/// logging what was removed. The stripped factors can only contribute
/// extraneous parameter roots.
fn strip_contents(raw: BiPoly<CQ>, log: &mut Vec<String>) -> BiPoly<CQ> {
    if raw.is_zero() {
        return raw;
    }
    let mut out = raw;
    let c_only = out.content_in(Var::Z);
    if c_only.degree().unwrap_or(0) > 0 {
        let embedded = BiPoly::from_poly_coeffs(Var::Z, std::slice::from_ref(&c_only));
        out = out.div_exact(&embedded).expect("content divides");
        log.push(format!("c-content degree {}", c_only.degree().unwrap()));
    }
    let aux_only = out.content_in(Var::W);
    if aux_only.degree().unwrap_or(0) > 0 {
        let embedded = BiPoly::from_poly_coeffs(Var::W, std::slice::from_ref(&aux_only));
        out = out.div_exact(&embedded).expect("content divides");
        log.push(format!(
            "chain-variable content degree {}",
            aux_only.degree().unwrap()
        ));
    }
    out.content_normalize()
}

fn strip_final_integer_content(raw: BiPoly<CQ>) -> BiPoly<CQ> {
    if raw.is_zero() {
        raw
    } else {
        raw.content_normalize()
    }
}

fn check_cap(
    res: &BiPoly<CQ>,
    degrees: &mut Vec<(usize, usize)>,
) -> Result<(), AlgresError> {
    let dz = res.deg(Var::Z).unwrap_or(0);
    let dw = res.deg(Var::W).unwrap_or(0);
    degrees.push((dz, dw));
    if dz.max(dw) > tol::CAP_ELIMINATION_DEGREE {
        return Err(AlgresError::EliminationBlowup(format!(
            "intermediate degree ({dz}, {dw}) exceeds the cap {} (degrees so far {:?})",
            tol::CAP_ELIMINATION_DEGREE,
            degrees
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Periodicity obstruction verdicts
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionRow {
    pub kind: &'static str,
    pub n: usize,
    /// exact P(c) as a decimal string (rational in lowest terms)
    pub value: String,
    pub exact_zero: bool,
    pub obstruction_identically_zero: bool,
    pub numeric_chain_found: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionVerdict {
    pub rows: Vec<ObstructionRow>,
    /// true when every system evaluates to a nonzero value: no chain
    /// certificate up to n_max.
    pub no_chain_up_to_nmax: bool,
}

/// Evaluate every obstruction polynomial at the exact parameter value and
/// cross-check against the numeric chain search.
pub fn periodicity_obstruction_test(
    d0: usize,
    d1: usize,
    c: &CQ,
    n_max: usize,
) -> Result<ObstructionVerdict, AlgresError> {
    let f = Corr1::family(d0, d1, c.clone())?;
    let mut rows = Vec::new();
    for n in 1..=n_max {
        for kind in [SystemKind::ToInfinity, SystemKind::Cycle, SystemKind::ToCritical] {
            let system = build_system(d0, d1, n, kind);
            let run = eliminate(&system)?;
            let value = run.obstruction.eval(c);
            let exact_zero = value.is_zero() && !run.identically_zero;
            let numeric = numeric_chain_check(&f, d0, d1, c, n, kind)?;
            rows.push(ObstructionRow {
                kind: kind.tag(),
                n,
                value: cq_decimal(&value),
                exact_zero: exact_zero || run.identically_zero,
                obstruction_identically_zero: run.identically_zero,
                numeric_chain_found: numeric,
                agree: (exact_zero || run.identically_zero) == numeric,
            });
        }
    }
    let no_chain = rows.iter().all(|r| !r.exact_zero);
    Ok(ObstructionVerdict {
        rows,
        no_chain_up_to_nmax: no_chain,
    })
}

fn cq_decimal(v: &CQ) -> String {
    if v.im.is_zero() {
        format!("{}", v.re)
    } else {
        format!("{}+{}i", v.re, v.im)
    }
}

/// Numeric counterpart of one obstruction row: start from the critical set
/// and look for the matching chain within tolerance.
fn numeric_chain_check(
    f: &Corr1,
    d0: usize,
    d1: usize,
    c: &CQ,
    n: usize,
    kind: SystemKind,
) -> Result<bool, AlgresError> {
    let cf = crate::polyalg::cq_to_c64(c);
    let starts: Vec<C64> = match kind {
        SystemKind::ToInfinity | SystemKind::Cycle => {
            let mut coeffs = vec![C64::new(0.0, 0.0); d0 + 1];
            coeffs[0] = cf;
            coeffs[d0] = C64::new(1.0, 0.0);
            polyalg::roots(&Poly::new(coeffs))?
                .points
                .iter()
                .map(|(v, _)| *v)
                .collect()
        }
        SystemKind::ToCritical => {
            let mut coeffs = vec![C64::new(0.0, 0.0); d0 + 1];
            coeffs[0] = C64::new(1.0, 0.0);
            coeffs[1] += C64::new(3.0, 0.0);
            coeffs[d0] += C64::new(1.0, 0.0);
            polyalg::roots(&Poly::new(coeffs))?
                .points
                .iter()
                .map(|(v, _)| *v)
                .collect()
        }
    };
    for w0 in starts {
        let start = P1Point::finite(w0);
        match kind {
            SystemKind::Cycle => {
                let search = find_chains(f, start, n, true)?;
                if !search.chains.is_empty() {
                    return Ok(true);
                }
            }
            _ => {
                // a chain of n points whose endpoint maps to infinity, i.e.
                // the endpoint is a d1-th root of unity
                let search = find_chains(f, start, n, false)?;
                let hits = search.chains.iter().any(|ch| {
                    let last = ch.points.last().unwrap();
                    match last.to_affine() {
                        Some(w) => (w.powu(d1 as u32) - C64::new(1.0, 0.0)).norm() < 1e-6,
                        None => false,
                    }
                });
                if hits {
                    return Ok(true);
                }
                // also catch the endpoint-at-infinity formulation directly
                if any_endpoint_near(&search, P1Point::infinity(), tol::TOL_PROJECTIVE) {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corr1::cq;
    use crate::polyalg::{cq_to_c64, resultant_uni_cq};

    #[test]
    fn p_system_shape_n1() {
        // {w0^2 + c, w0^3 - 1}
        let s = build_system(2, 3, 1, SystemKind::ToInfinity);
        assert_eq!(s.equations.len(), 2);
        let p0 = &s.equations[0];
        assert_eq!(p0.degree_in_var(), 2);
        assert_eq!(p0.coeffs[0], c_term());
        assert_eq!(p0.coeffs[2], const_term(1));
        let p1 = &s.equations[1];
        assert_eq!(p1.degree_in_var(), 3);
        assert_eq!(p1.coeffs[0], const_term(-1));
    }

    #[test]
    fn q_system_has_three_equations_at_n2() {
        let s = build_system(2, 3, 2, SystemKind::Cycle);
        assert_eq!(s.equations.len(), 3);
        assert_eq!(s.equations[2].aux, Some(0));
    }

    #[test]
    fn r_system_opens_with_secondary_critical_set() {
        let s = build_system(2, 3, 1, SystemKind::ToCritical);
        let r0 = &s.equations[0];
        assert_eq!(r0.coeffs[0], const_term(1));
        assert_eq!(r0.coeffs[1], const_term(3));
        assert_eq!(r0.coeffs[2], const_term(1));
    }

    #[test]
    fn elimination_matches_direct_resultant_n1() {
        // Res_{w0}(w0^2 + c, w0^3 - 1) = +-(c^3 + 1)
        let s = build_system(2, 3, 1, SystemKind::ToInfinity);
        let run = eliminate(&s).unwrap();
        assert!(!run.identically_zero);
        let p = run.obstruction;
        assert_eq!(p.degree(), Some(3));
        // compare against the generic bivariate resultant oracle: treat c as
        // the kept variable of BiPoly (z = c here).
        let f = BiPoly::from_poly_coeffs(
            Var::W,
            &[
                Poly::new(vec![CQ::zero(), one_cq()]), // + c
                Poly::zero(),
                Poly::new(vec![one_cq()]),
            ],
        );
        let g = BiPoly::from_poly_coeffs(
            Var::W,
            &[
                Poly::new(vec![int_cq(-1)]),
                Poly::zero(),
                Poly::zero(),
                Poly::new(vec![one_cq()]),
            ],
        );
        let oracle = polyalg::resultant_bi_cq(&f, &g, Var::W).unwrap().content_normalize();
        let pn = p.content_normalize();
        assert!(pn == oracle || pn == oracle.neg(), "{pn:?} vs {oracle:?}");
        // and the root-product oracle: value at c = 2 equals
        // lc^3 prod (r^2 + 2) over cube roots of unity = 2^3 + 1 = 9
        let at2 = p.eval(&int_cq(2));
        assert_eq!(cq_to_c64(&at2).re.abs().round() as i64, 9);
    }

    #[test]
    fn planted_shared_root_vanishes() {
        // c = -1 makes w0 = 1 a common root of w0^2 + c and w0^3 - 1.
        let s = build_system(2, 3, 1, SystemKind::ToInfinity);
        let run = eliminate(&s).unwrap();
        let v = run.obstruction.eval(&int_cq(-1));
        assert!(v.is_zero());
    }

    #[test]
    fn degenerate_identical_equations_flagged_zero() {
        // Res of an equation with itself is identically zero.
        let s = build_system(2, 3, 1, SystemKind::ToInfinity);
        let eq = &s.equations[0];
        let res = resultant_chain_step(&eq.coeffs, &eq.coeffs).unwrap();
        assert!(res.is_zero());
        // through the full pipeline: a crafted system with duplicated rows
        let crafted = ChainSystem {
            kind: SystemKind::ToInfinity,
            d0: 2,
            d1: 3,
            n: 1,
            equations: vec![eq.clone(), eq.clone()],
        };
        let run = eliminate(&crafted).unwrap();
        assert!(run.identically_zero);
    }

    #[test]
    fn cycle_system_n2_eliminates_exactly() {
        let s = build_system(2, 3, 2, SystemKind::Cycle);
        let run = eliminate(&s).unwrap();
        assert!(!run.identically_zero);
        assert!(run.obstruction.degree().unwrap() >= 1);
    }

    #[test]
    fn generic_parameter_has_no_certificates() {
        // c = 7/5: all systems evaluate nonzero and the numeric search
        // agrees for n <= 2.
        let c = Complex::new(BigRational::new(7.into(), 5.into()), BigRational::zero());
        let verdict = periodicity_obstruction_test(2, 3, &c, 2).unwrap();
        assert!(verdict.no_chain_up_to_nmax);
        for row in &verdict.rows {
            assert!(row.agree, "disagreement: {row:?}");
        }
    }

    #[test]
    fn planted_root_agrees_both_ways() {
        // c = -1: the to-infinity system at n = 1 vanishes and a numeric
        // chain exists (w0 = 1 is a cube root of unity).
        let c = int_cq(-1);
        let verdict = periodicity_obstruction_test(2, 3, &c, 1).unwrap();
        let row = verdict
            .rows
            .iter()
            .find(|r| r.kind == "to-infinity")
            .unwrap();
        assert!(row.exact_zero);
        assert!(row.numeric_chain_found);
        assert!(row.agree);
        assert!(!verdict.no_chain_up_to_nmax);
    }

    #[test]
    fn c_zero_edge_case() {
        let verdict = periodicity_obstruction_test(2, 3, &CQ::zero(), 1).unwrap();
        for row in &verdict.rows {
            assert!(!row.value.is_empty());
        }
    }

    #[test]
    fn elimination_order_invariance_n2() {
        // Reverse elimination order for the to-infinity chain at n = 2:
        // eliminate w0 first, then w1. The root sets in c agree up to
        // extraneous factors; check by evaluating both at shared planted
        // roots and comparing vanishing.
        let d0 = 2;
        let d1 = 3;
        let s = build_system(d0, d1, 2, SystemKind::ToInfinity);
        let forward = eliminate(&s).unwrap().obstruction;

        // manual reverse order with the generic machinery
        let p0 = &s.equations[0].coeffs;
        let p1 = &s.equations[1].coeffs;
        let p2 = &s.equations[2].coeffs;
        // eliminate w0 between P0 (in w0, coeffs c-only) and P1 (in w1 over
        // (w0, c)): view P1 as polynomial in w0.
        // P1 = w0^d1 * (w1^d0 + 3 w1 + 1) - (w1^d0 + c): in w0 the
        // coefficients live in (w1, c).
        let mut p1_in_w0: Vec<BiPoly<CQ>> = vec![BiPoly::zero(); d1 + 1];
        // w1^d0 + 3w1 + 1 with w1 as the aux variable
        p1_in_w0[d1] = aux_pow(d0).add(&aux_pow(1).scale(&int_cq(3))).add(&const_term(1));
        p1_in_w0[0] = aux_pow(d0).neg().sub(&c_term());
        let p0_lift: Vec<BiPoly<CQ>> = p0.clone();
        let inner = resultant_chain_step(&p0_lift, &p1_in_w0).unwrap();
        // inner is (w1, c); eliminate w1 against P2 = w1^d1 - 1
        let inner_stack: Vec<BiPoly<CQ>> = inner
            .as_poly_coeffs(Var::Z)
            .into_iter()
            .map(|p| BiPoly::from_poly_coeffs(Var::Z, &[p]))
            .collect();
        let p2_stack: Vec<BiPoly<CQ>> = p2.clone();
        let rev = resultant_chain_step(&p2_stack, &inner_stack).unwrap();
        let rev_poly = rev
            .as_poly_coeffs(Var::Z)
            .into_iter()
            .next()
            .unwrap()
            .content_normalize();

        // same vanishing at the planted root set: roots of the forward
        // polynomial must kill the reverse one
        let froots = polyalg::roots(&forward.to_c64()).unwrap();
        for (r, _) in froots.points {
            let v = rev_poly.to_c64().eval(&r);
            let scale = rev_poly.to_c64().max_coeff_mag();
            assert!(
                v.norm() <= 1e-6 * scale * r.norm().max(1.0).powi(rev_poly.degree().unwrap() as i32),
                "forward root {r} does not kill the reverse elimination"
            );
        }
    }

    #[test]
    fn family_and_cq_helpers_line_up() {
        let c = cq(5.0, 0.0);
        let f = Corr1::family(2, 3, c).unwrap();
        assert_eq!((f.d0(), f.d1()), (2, 3));
    }
}
