//! Sylvester resultants and discriminants.
//!
//! Exact domain: fraction-free Bareiss elimination on the Sylvester matrix,
//! with polynomial entries when a variable is kept. Float domain: pointwise
//! scalar determinants at scaled roots of unity, then inverse DFT.

use super::bipoly::{BiPoly, Var};
use super::poly::Poly;
use super::scalar::{C64, CQ};
use super::PolyError;
use num_complex::Complex;
use num_traits::{One, Zero};

/// Ring interface for the fraction-free determinant: exact multiplication,
/// subtraction and guaranteed-exact division by prior pivots.
pub trait BareissRing: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn mul(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Division known to be exact by Bareiss' identity.
    fn div_exact(&self, rhs: &Self) -> Self;
}

impl BareissRing for CQ {
    fn ring_zero() -> Self {
        num_traits::Zero::zero()
    }
    fn ring_one() -> Self {
        num_traits::One::one()
    }
    fn ring_is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }
    fn sub(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }
}

impl BareissRing for Poly<CQ> {
    fn ring_zero() -> Self {
        Poly::zero()
    }
    fn ring_one() -> Self {
        Poly::one()
    }
    fn ring_is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Poly::mul(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Poly::sub(self, rhs)
    }
    fn neg(&self) -> Self {
        Poly::neg(self)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        Poly::div_exact(self, rhs).expect("Bareiss division is exact")
    }
}

impl BareissRing for BiPoly<CQ> {
    fn ring_zero() -> Self {
        BiPoly::zero()
    }
    fn ring_one() -> Self {
        BiPoly::constant(num_traits::One::one())
    }
    fn ring_is_zero(&self) -> bool {
        BiPoly::is_zero(self)
    }
    fn mul(&self, rhs: &Self) -> Self {
        BiPoly::mul(self, rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        BiPoly::sub(self, rhs)
    }
    fn neg(&self) -> Self {
        BiPoly::neg(self)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        BiPoly::div_exact(self, rhs).expect("Bareiss division is exact")
    }
}

/// Fraction-free determinant (Bareiss). Exact over any integral domain.
pub fn bareiss_det<R: BareissRing>(mut m: Vec<Vec<R>>) -> R {
    let n = m.len();
    if n == 0 {
        return R::ring_one();
    }
    let mut sign_flip = false;
    let mut prev = R::ring_one();
    for k in 0..n - 1 {
        if m[k][k].ring_is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].ring_is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign_flip = !sign_flip;
                }
                None => return R::ring_zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[k][k].mul(&m[i][j]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = t.div_exact(&prev);
            }
            m[i][k] = R::ring_zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign_flip {
        det.neg()
    } else {
        det
    }
}

/// Sylvester matrix of two coefficient sequences (ascending, in the
/// eliminated variable). Rows: deg_q shifts of p, then deg_p shifts of q.
fn sylvester<R: Clone>(p: &[R], q: &[R], zero: R) -> Vec<Vec<R>> {
    let dp = p.len() - 1;
    let dq = q.len() - 1;
    let n = dp + dq;
    let mut m = vec![vec![zero; n]; n];
    for row in 0..dq {
        for (k, c) in p.iter().enumerate() {
            m[row][row + dp - k] = c.clone();
        }
    }
    for row in 0..dp {
        for (k, c) in q.iter().enumerate() {
            m[dq + row][row + dq - k] = c.clone();
        }
    }
    m
}

/// Complex LU determinant with partial pivoting.
fn lu_det(mut m: Vec<Vec<C64>>) -> C64 {
    let n = m.len();
    if n == 0 {
        return C64::one();
    }
    let mut det = C64::one();
    for k in 0..n {
        let (pivot_row, pivot_mag) = (k..n)
            .map(|i| (i, m[i][k].norm()))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if pivot_mag == 0.0 {
            return C64::zero();
        }
        if pivot_row != k {
            m.swap(k, pivot_row);
            det = -det;
        }
        let pv = m[k][k];
        det *= pv;
        for i in k + 1..n {
            let f = m[i][k] / pv;
            for j in k + 1..n {
                let sub = f * m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    det
}

/// Resultant of two univariate polynomials over C64 (Sylvester determinant).
pub fn resultant_uni_c64(p: &Poly<C64>, q: &Poly<C64>) -> Result<C64, PolyError> {
    check_positive_degree(p.degree(), q.degree())?;
    let m = sylvester(p.coeffs(), q.coeffs(), C64::zero());
    Ok(lu_det(m))
}

/// Resultant of two univariate polynomials over CQ (exact Bareiss).
pub fn resultant_uni_cq(p: &Poly<CQ>, q: &Poly<CQ>) -> Result<CQ, PolyError> {
    check_positive_degree(p.degree(), q.degree())?;
    let m = sylvester(p.coeffs(), q.coeffs(), CQ::zero());
    Ok(bareiss_det(m))
}

fn check_positive_degree(dp: Option<usize>, dq: Option<usize>) -> Result<(), PolyError> {
    match (dp, dq) {
        (Some(a), Some(b)) if a >= 1 && b >= 1 => Ok(()),
        _ => Err(PolyError::Precondition(
            "resultant needs positive degree in the eliminated variable".into(),
        )),
    }
}

/// Resultant of univariate polynomials: exact when both inputs are exact.
pub fn resultant_uni(p: &Poly<CQ>, q: &Poly<CQ>) -> Result<CQ, PolyError> {
    resultant_uni_cq(p, q)
}

/// Exact resultant of two bivariate polynomials, eliminating `var`.
/// Entries of the Sylvester matrix are univariate polynomials in the kept
/// variable; Bareiss keeps everything exact.
pub fn resultant_bi_cq(
    p: &BiPoly<CQ>,
    q: &BiPoly<CQ>,
    eliminate: Var,
) -> Result<Poly<CQ>, PolyError> {
    let dp = p.deg(eliminate);
    let dq = q.deg(eliminate);
    check_positive_degree(dp, dq)?;
    let pc = p.as_poly_coeffs(eliminate);
    let qc = q.as_poly_coeffs(eliminate);
    if pc.last().unwrap().is_zero() || qc.last().unwrap().is_zero() {
        return Err(PolyError::DegenerateLeadingCoefficient);
    }
    let m = sylvester(&pc, &qc, Poly::zero());
    Ok(bareiss_det(m))
}

/// Float resultant of two bivariate polynomials, eliminating `var`, by
/// evaluation at scaled roots of unity and inverse DFT in the kept variable.
pub fn resultant_bi_c64(
    p: &BiPoly<C64>,
    q: &BiPoly<C64>,
    eliminate: Var,
) -> Result<Poly<C64>, PolyError> {
    let dp = p.deg(eliminate);
    let dq = q.deg(eliminate);
    check_positive_degree(dp, dq)?;
    let kept = eliminate.other();
    let (dp, dq) = (dp.unwrap(), dq.unwrap());
    let kp = p.deg(kept).unwrap_or(0);
    let kq = q.deg(kept).unwrap_or(0);
    // Degree bound of Res in the kept variable.
    let bound = dp * kq + dq * kp;
    let n = bound + 1;
    let radius = 1.0;
    let mut samples = Vec::with_capacity(n);
    for j in 0..n {
        let theta = 2.0 * std::f64::consts::PI * (j as f64) / (n as f64);
        // Slight rotation offset avoids hitting structured zeros.
        let x = Complex::from_polar(radius, theta + 0.37);
        let pj = p.eval_var(kept, &x);
        let qj = q.eval_var(kept, &x);
        if pj.degree() != Some(dp) || qj.degree() != Some(dq) {
            // Leading coefficient vanished at the sample: degenerate row
            // structure; detect the identically-degenerate case.
            let lc_p = p.as_poly_coeffs(eliminate).pop().unwrap();
            let lc_q = q.as_poly_coeffs(eliminate).pop().unwrap();
            if lc_p.is_zero() || lc_q.is_zero() {
                return Err(PolyError::DegenerateLeadingCoefficient);
            }
            // pad to the declared degrees so the Sylvester shape stays fixed
            let mut pc = pj.coeffs().to_vec();
            pc.resize(dp + 1, C64::zero());
            let mut qc = qj.coeffs().to_vec();
            qc.resize(dq + 1, C64::zero());
            samples.push(lu_det(sylvester(&pc, &qc, C64::zero())));
            continue;
        }
        let m = sylvester(pj.coeffs(), qj.coeffs(), C64::zero());
        samples.push(lu_det(m));
    }
    // Inverse DFT on the rotated circle.
    let mut coeffs = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = C64::zero();
        for (j, s) in samples.iter().enumerate() {
            let theta = -2.0 * std::f64::consts::PI * (j as f64) * (k as f64) / (n as f64);
            acc += s * Complex::from_polar(1.0, theta);
        }
        let base = Complex::from_polar(radius, 0.37).powu(k as u32);
        coeffs.push(acc / (n as f64) / base);
    }
    let raw = Poly::new(coeffs);
    Ok(raw.truncate_small(1e-12))
}

/// Resultant of two bivariate polynomials eliminating `var`; exact path.
pub fn resultant_bi(p: &BiPoly<CQ>, q: &BiPoly<CQ>, eliminate: Var) -> Result<Poly<CQ>, PolyError> {
    resultant_bi_cq(p, q, eliminate)
}

fn disc_sign(d: usize) -> bool {
    // (-1)^(d(d-1)/2) negative?
    (d * (d - 1) / 2) % 2 == 1
}

/// Discriminant of a univariate polynomial over CQ:
/// (-1)^(d(d-1)/2) Res(p, p') / lc(p). Zero iff p has a multiple root.
pub fn discriminant_uni(p: &Poly<CQ>) -> Result<CQ, PolyError> {
    let d = p
        .degree()
        .ok_or_else(|| PolyError::Precondition("discriminant needs degree >= 2".into()))?;
    if d < 2 {
        return Err(PolyError::Precondition(
            "discriminant needs degree >= 2".into(),
        ));
    }
    let dp = p.derivative();
    let res = resultant_uni_cq(p, &dp)?;
    let lc = p.leading().unwrap().clone();
    let v = res / lc;
    Ok(if disc_sign(d) { -v } else { v })
}

/// Discriminant of a bivariate polynomial in `var`: a polynomial in the other
/// variable, vanishing exactly at values where the `var`-fiber has a multiple
/// root.
pub fn discriminant_bi(p: &BiPoly<CQ>, var: Var) -> Result<Poly<CQ>, PolyError> {
    let d = p
        .deg(var)
        .ok_or_else(|| PolyError::Precondition("discriminant needs degree >= 2".into()))?;
    if d < 2 {
        return Err(PolyError::Precondition(
            "discriminant needs degree >= 2".into(),
        ));
    }
    let dp = p.derivative(var);
    let res = resultant_bi_cq(p, &dp, var)?;
    let lc = p.as_poly_coeffs(var).pop().unwrap();
    let quot = res
        .div_exact(&lc)
        .expect("leading coefficient divides Res(p, p')");
    Ok(if disc_sign(d) { quot.neg() } else { quot })
}

#[cfg(test)]
mod tests {
    use super::super::scalar::{cq_from_c64, cq_to_c64};
    use super::*;

    fn c(re: f64) -> C64 {
        Complex::new(re, 0.0)
    }

    fn poly_q(v: &[f64]) -> Poly<CQ> {
        Poly::new(v.iter().map(|&x| cq_from_c64(c(x))).collect())
    }

    #[test]
    fn resultant_shared_root_is_zero() {
        // Res(p, p) = 0 for nonconstant p
        let p = poly_q(&[1.0, 2.0, 1.0]);
        assert!(resultant_uni_cq(&p, &p).unwrap().is_zero());
    }

    #[test]
    fn resultant_classic_value() {
        // Res_x(x^2+1, x^2-1) = 4 (root product: (i^2-1)(-i^2-1)... = 4)
        let p = poly_q(&[1.0, 0.0, 1.0]);
        let q = poly_q(&[-1.0, 0.0, 1.0]);
        let r = resultant_uni_cq(&p, &q).unwrap();
        assert_eq!(cq_to_c64(&r), c(4.0));
    }

    #[test]
    fn resultant_linear_difference() {
        // Res_x(x-a, x-b) = a-b with a=5, b=3
        let p = poly_q(&[-5.0, 1.0]);
        let q = poly_q(&[-3.0, 1.0]);
        let r = resultant_uni_cq(&p, &q).unwrap();
        // Res(x-a, x-b) = lc(p)^1 * q(a) = a - b = 2
        assert_eq!(cq_to_c64(&r), c(2.0));
    }

    #[test]
    fn discriminant_quadratic() {
        // disc(x^2 + bx + c) = b^2 - 4c with b=3, c=1 -> 5
        let p = poly_q(&[1.0, 3.0, 1.0]);
        let d = discriminant_uni(&p).unwrap();
        assert_eq!(cq_to_c64(&d), c(5.0));
    }

    #[test]
    fn discriminant_double_root_zero() {
        // (x-1)^2 = x^2 - 2x + 1
        let p = poly_q(&[1.0, -2.0, 1.0]);
        assert!(discriminant_uni(&p).unwrap().is_zero());
    }

    #[test]
    fn discriminant_cubic() {
        // disc(x^3 - 1) = -27
        let p = poly_q(&[-1.0, 0.0, 0.0, 1.0]);
        let d = discriminant_uni(&p).unwrap();
        assert_eq!(cq_to_c64(&d), c(-27.0));
    }

    #[test]
    fn float_bivariate_matches_exact() {
        // F = w^2 - z^3 - 1, G = w - z: Res_w over both domains.
        let f = BiPoly::new(vec![
            vec![c(-1.0), c(0.0), c(1.0)],
            vec![c(0.0), c(0.0), c(0.0)],
            vec![c(0.0), c(0.0), c(0.0)],
            vec![c(-1.0), c(0.0), c(0.0)],
        ]);
        let g = BiPoly::new(vec![vec![c(0.0), c(1.0)], vec![c(-1.0), c(0.0)]]);
        let exact = resultant_bi_cq(&f.to_cq(), &g.to_cq(), Var::W).unwrap();
        let float = resultant_bi_c64(&f, &g, Var::W).unwrap();
        assert_eq!(exact.degree(), float.degree());
        for k in 0..=exact.degree().unwrap() {
            let e = cq_to_c64(&exact.coeff(k));
            let fl = float.coeff(k);
            assert!((e - fl).norm() < 1e-9, "coeff {k}: {e} vs {fl}");
        }
    }
}
