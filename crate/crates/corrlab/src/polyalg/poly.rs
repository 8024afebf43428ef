//! Dense univariate polynomials with ascending coefficients.

use super::scalar::{Scalar, C64, CQ};
use num::bigint::BigInt;
use num::rational::BigRational;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

/// Univariate polynomial. The empty coefficient vector is the zero
/// polynomial; otherwise the leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn constant(c: T) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(T::one())
    }

    /// Monomial c * x^k.
    pub fn monomial(c: T, k: usize) -> Self {
        let mut v = vec![T::zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> T {
        self.coeffs.get(k).cloned().unwrap_or_else(T::zero)
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let mut kc = T::zero();
            for _ in 0..k {
                kc = kc + c.clone();
            }
            out.push(kc);
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &T) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        Poly::new(out)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone().neg()).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        let mut acc = Poly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Euclidean division over the coefficient field: self = q * div + r.
    pub fn div_rem(&self, div: &Self) -> (Self, Self) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree().unwrap();
        let lead = div.leading().unwrap().clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![T::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].clone();
            if c.is_zero() {
                continue;
            }
            let q = c / lead.clone();
            quot[k - dd] = q.clone();
            for j in 0..=dd {
                let t = rem[k - dd + j].clone() - q.clone() * div.coeffs[j].clone();
                rem[k - dd + j] = t;
            }
        }
        (Poly::new(quot), Poly::new(rem))
    }

    /// Exact division; None when the remainder is nonzero. Used by the
    /// fraction-free elimination, where divisibility is guaranteed.
    pub fn div_exact(&self, div: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (q, r) = self.div_rem(div);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Substitute another polynomial for the variable.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(inner).add(&Poly::constant(c.clone()));
        }
        acc
    }

    /// Coefficients reversed to fixed degree d: x^d * p(1/x), used for chart
    /// flips at infinity. Requires d >= deg p.
    pub fn reversed_to_degree(&self, d: usize) -> Self {
        let mut out = vec![T::zero(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[d - k] = c.clone();
        }
        Poly::new(out)
    }

    pub fn max_coeff_mag(&self) -> f64 {
        self.coeffs.iter().map(|c| c.approx_mag()).fold(0.0, f64::max)
    }
}

impl<T: Scalar> Poly<T> {
    /// Monic gcd over the coefficient field (Euclid). Exact for `CQ`; for
    /// floats prefer the rank-based estimate in `roots`.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            return a;
        }
        let lead = a.leading().unwrap().clone();
        a.scale(&(T::one() / lead))
    }
}

impl Poly<CQ> {
    pub fn to_c64(&self) -> Poly<C64> {
        Poly::new(self.coeffs.iter().map(super::scalar::cq_to_c64).collect())
    }

    /// Clear denominators and divide by the integer content of all numerators
    /// (real and imaginary parts together); normalize the leading
    /// coefficient's sign so the representative is canonical up to units.
    pub fn content_normalize(&self) -> Self {
        let parts: Vec<&BigRational> = self
            .coeffs
            .iter()
            .flat_map(|c| [&c.re, &c.im])
            .collect();
        let scale = content_scale(&parts);
        let scaled = self.scale(&Complex::new(scale, BigRational::zero()));
        sign_normalize(scaled)
    }
}

impl Poly<C64> {
    pub fn to_cq(&self) -> Poly<CQ> {
        Poly::new(self.coeffs.iter().map(|c| super::scalar::cq_from_c64(*c)).collect())
    }

    /// Drop coefficients below `rel_tol` times the largest magnitude.
    pub fn truncate_small(&self, rel_tol: f64) -> Self {
        let m = self.max_coeff_mag();
        if m == 0.0 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| if c.norm() <= rel_tol * m { C64::zero() } else { *c })
                .collect(),
        )
    }
}

/// Rational multiplier that turns a family of rationals into content-one
/// integers: lcm of denominators over gcd of the resulting numerators.
pub(crate) fn content_scale(parts: &[&BigRational]) -> BigRational {
    let mut lcm_den = BigInt::one();
    for p in parts {
        if !p.is_zero() {
            lcm_den = num::Integer::lcm(&lcm_den, p.denom());
        }
    }
    let mut gcd_num = BigInt::zero();
    for p in parts {
        if !p.is_zero() {
            let scaled = p.numer() * (&lcm_den / p.denom());
            gcd_num = num::Integer::gcd(&gcd_num, &scaled);
        }
    }
    if gcd_num.is_zero() {
        return BigRational::one();
    }
    BigRational::new(lcm_den, gcd_num)
}

fn sign_normalize(p: Poly<CQ>) -> Poly<CQ> {
    let Some(lead) = p.leading() else { return p };
    let flip = if !lead.re.is_zero() {
        lead.re.is_negative()
    } else {
        lead.im.is_negative()
    };
    if flip {
        p.neg()
    } else {
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    #[test]
    fn eval_and_derivative() {
        // p = 1 + 2x + 3x^2
        let p = Poly::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        assert_eq!(p.eval(&c(2.0, 0.0)), c(17.0, 0.0));
        assert_eq!(p.derivative().coeffs(), &[c(2.0, 0.0), c(6.0, 0.0)]);
    }

    #[test]
    fn div_rem_roundtrip() {
        let p = Poly::new(vec![c(-6.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]); // (x-2)(x+3)
        let d = Poly::new(vec![c(-2.0, 0.0), c(1.0, 0.0)]);
        let (q, r) = p.div_rem(&d);
        assert!(r.is_zero());
        assert_eq!(q.coeffs(), &[c(3.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn exact_content_normalize() {
        use super::super::scalar::{q_from_f64, Q};
        // (2/3) x + 4 -> content-one integers: x + 6 after scaling by 3/2.
        let p: Poly<CQ> = Poly::new(vec![
            Complex::new(q_from_f64(4.0), Q::zero()),
            Complex::new(q_from_f64(2.0) / q_from_f64(3.0), Q::zero()),
        ]);
        let n = p.content_normalize();
        assert_eq!(n.coeff(0), Complex::new(q_from_f64(6.0), Q::zero()));
        assert_eq!(n.coeff(1), Complex::new(q_from_f64(1.0), Q::zero()));
    }

    #[test]
    fn gcd_detects_shared_factor() {
        // (x-1)^2 (x+2) and (x-1)(x-5) share (x-1)
        let a = Poly::new(vec![c(1.0, 0.0), c(-1.0, 0.0)])
            .pow(2)
            .mul(&Poly::new(vec![c(2.0, 0.0), c(1.0, 0.0)]));
        let a = Poly::new(a.coeffs().to_vec()).to_cq();
        let b = Poly::new(vec![c(1.0, 0.0), c(-1.0, 0.0)])
            .mul(&Poly::new(vec![c(-5.0, 0.0), c(1.0, 0.0)]))
            .to_cq();
        let g = a.gcd(&b);
        assert_eq!(g.degree(), Some(1));
    }
}
