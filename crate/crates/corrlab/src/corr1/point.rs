//! Chart-tagged points on the Riemann sphere.

use crate::polyalg::C64;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

/// A point of P^1 in one of two affine charts: `Affine` holds z itself,
/// `Inverted` holds u = 1/z (so u = 0 is the point at infinity).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum P1Point {
    Affine { re: f64, im: f64 },
    Inverted { re: f64, im: f64 },
}

impl P1Point {
    pub fn finite(z: C64) -> Self {
        P1Point::Affine { re: z.re, im: z.im }
    }

    pub fn infinity() -> Self {
        P1Point::Inverted { re: 0.0, im: 0.0 }
    }

    pub fn from_inverted(u: C64) -> Self {
        P1Point::Inverted { re: u.re, im: u.im }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, P1Point::Inverted { re, im } if *re == 0.0 && *im == 0.0)
    }

    /// Affine coordinate, or None for the point at infinity.
    pub fn to_affine(&self) -> Option<C64> {
        match self {
            P1Point::Affine { re, im } => Some(Complex::new(*re, *im)),
            P1Point::Inverted { re, im } => {
                let u = Complex::new(*re, *im);
                if u.norm() == 0.0 {
                    None
                } else {
                    Some(1.0 / u)
                }
            }
        }
    }

    /// Coordinate in the inverted chart u = 1/z; None for z = 0.
    pub fn to_inverted(&self) -> Option<C64> {
        match self {
            P1Point::Inverted { re, im } => Some(Complex::new(*re, *im)),
            P1Point::Affine { re, im } => {
                let z = Complex::new(*re, *im);
                if z.norm() == 0.0 {
                    None
                } else {
                    Some(1.0 / z)
                }
            }
        }
    }

    /// Re-express in the chart where the coordinate has modulus <= 1.
    pub fn normalized(&self) -> Self {
        match self {
            P1Point::Affine { re, im } => {
                let z = Complex::new(*re, *im);
                if z.norm() > 1.0 {
                    let u = 1.0 / z;
                    P1Point::Inverted { re: u.re, im: u.im }
                } else {
                    *self
                }
            }
            P1Point::Inverted { re, im } => {
                let u = Complex::new(*re, *im);
                if u.norm() > 1.0 {
                    let z = 1.0 / u;
                    P1Point::Affine { re: z.re, im: z.im }
                } else {
                    *self
                }
            }
        }
    }

    /// Chart tag for serialization: 0 = affine, 1 = inverted.
    pub fn chart_index(&self) -> u8 {
        match self {
            P1Point::Affine { .. } => 0,
            P1Point::Inverted { .. } => 1,
        }
    }

    pub fn chart_coord(&self) -> C64 {
        match self {
            P1Point::Affine { re, im } | P1Point::Inverted { re, im } => Complex::new(*re, *im),
        }
    }
}

/// Chordal (Fubini–Study) distance on P^1, bounded by 1 in this scaling:
/// |z - w| / (sqrt(1+|z|^2) sqrt(1+|w|^2)), extended continuously to
/// infinity.
pub fn chordal_dist(a: P1Point, b: P1Point) -> f64 {
    match (a.to_affine(), b.to_affine()) {
        (Some(z), Some(w)) => {
            // Rewrite through inverted charts when both are huge, to avoid
            // loss of precision at infinity.
            let d = (z - w).norm();
            d / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
        }
        (Some(z), None) | (None, Some(z)) => 1.0 / (1.0 + z.norm_sqr()).sqrt(),
        (None, None) => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_roundtrip() {
        let p = P1Point::infinity();
        assert!(p.is_infinity());
        assert!(p.to_affine().is_none());
        assert_eq!(p.to_inverted(), Some(C64::new(0.0, 0.0)));
    }

    #[test]
    fn chordal_symmetry_and_infinity() {
        let a = P1Point::finite(C64::new(3.0, 0.0));
        let b = P1Point::finite(C64::new(0.0, 4.0));
        assert!((chordal_dist(a, b) - chordal_dist(b, a)).abs() < 1e-15);
        let inf = P1Point::infinity();
        assert!(chordal_dist(inf, inf) == 0.0);
        // d(z, inf) -> 0 as z -> inf
        let big = P1Point::finite(C64::new(1e8, 0.0));
        assert!(chordal_dist(big, inf) < 1e-7);
    }

    #[test]
    fn normalized_picks_small_chart() {
        let p = P1Point::finite(C64::new(10.0, 0.0)).normalized();
        assert_eq!(p.chart_index(), 1);
        assert!((p.chart_coord() - C64::new(0.1, 0.0)).norm() < 1e-15);
    }
}
