//! Smooth test functions evaluable on both charts of the sphere, with
//! declared C^2-norm bounds verified on a grid at construction.

use crate::corr1::P1Point;
use crate::polyalg::C64;

/// The supported shapes. `RationalFs` is a real polynomial in (Re z, Im z)
/// divided by (1 + |z|^2)^m with total degree < 2m, so it extends by 0 to
/// infinity; `Gaussian` bumps decay to 0; `Constant` is constant.
#[derive(Clone, Debug)]
pub enum TestKind {
    RationalFs {
        /// coeffs[(i, j)] multiplies x^i y^j.
        coeffs: Vec<(usize, usize, f64)>,
        weight: u32,
    },
    Gaussian {
        center: C64,
        sigma: f64,
        amp: f64,
    },
    Constant(f64),
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    pub kind: TestKind,
    pub name: String,
    /// Declared bound on max(|phi|, |D phi|, |D^2 phi|) over both charts,
    /// verified on a grid at construction.
    pub declared_c2: f64,
}

impl TestFunction {
    pub fn gaussian(center: C64, sigma: f64, amp: f64) -> Self {
        Self::build(
            TestKind::Gaussian { center, sigma, amp },
            format!("gauss({:.2}{:+.2}i,{sigma})", center.re, center.im),
        )
    }

    pub fn constant(v: f64) -> Self {
        Self::build(TestKind::Constant(v), format!("const({v})"))
    }

    /// p(x, y) / (1 + |z|^2)^m; panics if the degree reaches 2m (the
    /// function must extend continuously by 0 to infinity).
    pub fn rational_fs(coeffs: Vec<(usize, usize, f64)>, weight: u32) -> Self {
        let deg = coeffs.iter().map(|(i, j, _)| i + j).max().unwrap_or(0);
        assert!(
            (deg as u32) < 2 * weight,
            "numerator degree must be < 2 * weight"
        );
        Self::build(
            TestKind::RationalFs { coeffs, weight },
            format!("fsrat(deg{deg},w{weight})"),
        )
    }

    fn build(kind: TestKind, name: String) -> Self {
        let mut f = TestFunction {
            kind,
            name,
            declared_c2: 0.0,
        };
        f.declared_c2 = 1.05 * f.c2_estimate(41);
        f
    }

    fn eval_affine(&self, z: C64) -> f64 {
        match &self.kind {
            TestKind::RationalFs { coeffs, weight } => {
                let denom = (1.0 + z.norm_sqr()).powi(*weight as i32);
                let mut num = 0.0;
                for (i, j, c) in coeffs {
                    num += c * z.re.powi(*i as i32) * z.im.powi(*j as i32);
                }
                num / denom
            }
            TestKind::Gaussian { center, sigma, amp } => {
                let d2 = (z - center).norm_sqr();
                amp * (-d2 / (2.0 * sigma * sigma)).exp()
            }
            TestKind::Constant(v) => *v,
        }
    }

    fn eval_at_infinity(&self) -> f64 {
        match &self.kind {
            TestKind::RationalFs { .. } | TestKind::Gaussian { .. } => 0.0,
            TestKind::Constant(v) => *v,
        }
    }

    /// Chart-aware evaluation.
    pub fn eval(&self, p: P1Point) -> f64 {
        match p.to_affine() {
            Some(z) => {
                if z.norm() > 1e100 {
                    self.eval_at_infinity()
                } else {
                    self.eval_affine(z)
                }
            }
            None => self.eval_at_infinity(),
        }
    }

    /// Grid estimate of the C^2 norm over both charts, by central finite
    /// differences in the chart coordinates.
    pub fn c2_estimate(&self, n: usize) -> f64 {
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        let mut probe = |eval: &dyn Fn(f64, f64) -> f64, x: f64, y: f64| {
            let f00 = eval(x, y);
            let fx = (eval(x + h, y) - eval(x - h, y)) / (2.0 * h);
            let fy = (eval(x, y + h) - eval(x, y - h)) / (2.0 * h);
            let fxx = (eval(x + h, y) - 2.0 * f00 + eval(x - h, y)) / (h * h);
            let fyy = (eval(x, y + h) - 2.0 * f00 + eval(x, y - h)) / (h * h);
            let fxy = (eval(x + h, y + h) - eval(x + h, y - h) - eval(x - h, y + h)
                + eval(x - h, y - h))
                / (4.0 * h * h);
            for v in [f00, fx, fy, fxx, fyy, fxy] {
                worst = worst.max(v.abs());
            }
        };
        let affine = |x: f64, y: f64| self.eval_affine(C64::new(x, y));
        let inverted = |x: f64, y: f64| {
            let u = C64::new(x, y);
            if u.norm() < 1e-9 {
                self.eval_at_infinity()
            } else {
                self.eval_affine(1.0 / u)
            }
        };
        for i in 0..n {
            for j in 0..n {
                let x = -1.1 + 2.2 * (i as f64) / (n as f64 - 1.0);
                let y = -1.1 + 2.2 * (j as f64) / (n as f64 - 1.0);
                probe(&affine, x, y);
                if C64::new(x, y).norm() > 2.0 * h {
                    probe(&inverted, x, y);
                }
            }
        }
        worst
    }

    /// Grid estimate of the C^1 norm (values and first derivatives only),
    /// over both charts.
    pub fn c2_estimate_order1(&self, n: usize) -> f64 {
        let h = 1e-4;
        let mut worst: f64 = 0.0;
        let mut probe = |eval: &dyn Fn(f64, f64) -> f64, x: f64, y: f64| {
            let f00 = eval(x, y);
            let fx = (eval(x + h, y) - eval(x - h, y)) / (2.0 * h);
            let fy = (eval(x, y + h) - eval(x, y - h)) / (2.0 * h);
            for v in [f00, fx, fy] {
                worst = worst.max(v.abs());
            }
        };
        let affine = |x: f64, y: f64| self.eval_affine(C64::new(x, y));
        let inverted = |x: f64, y: f64| {
            let u = C64::new(x, y);
            if u.norm() < 1e-9 {
                self.eval_at_infinity()
            } else {
                self.eval_affine(1.0 / u)
            }
        };
        for i in 0..n {
            for j in 0..n {
                let x = -1.1 + 2.2 * (i as f64) / (n as f64 - 1.0);
                let y = -1.1 + 2.2 * (j as f64) / (n as f64 - 1.0);
                probe(&affine, x, y);
                if C64::new(x, y).norm() > 2.0 * h {
                    probe(&inverted, x, y);
                }
            }
        }
        worst
    }

    /// Rescale so the declared C^2 norm is 1.
    pub fn normalized_c2(&self) -> TestFunction {
        let s = 1.0 / self.declared_c2.max(1e-300);
        let kind = match &self.kind {
            TestKind::RationalFs { coeffs, weight } => TestKind::RationalFs {
                coeffs: coeffs.iter().map(|(i, j, c)| (*i, *j, c * s)).collect(),
                weight: *weight,
            },
            TestKind::Gaussian { center, sigma, amp } => TestKind::Gaussian {
                center: *center,
                sigma: *sigma,
                amp: amp * s,
            },
            TestKind::Constant(v) => TestKind::Constant(v * s),
        };
        TestFunction {
            kind,
            name: format!("{}/c2", self.name),
            declared_c2: 1.0,
        }
    }
}

/// The fixed, versioned test dictionary (v1): low-order rational forms and
/// a spread of Gaussian bumps. Used by the interpolation-norm estimates and
/// the empirical-uniqueness checks.
pub fn dictionary() -> Vec<TestFunction> {
    let mut out = vec![
        TestFunction::rational_fs(vec![(1, 0, 1.0)], 1), // x / (1+|z|^2)
        TestFunction::rational_fs(vec![(0, 1, 1.0)], 1), // y / (1+|z|^2)
        TestFunction::rational_fs(vec![(2, 0, 1.0), (0, 2, -1.0)], 2),
        TestFunction::rational_fs(vec![(1, 1, 1.0)], 2),
        TestFunction::rational_fs(vec![(0, 0, 1.0)], 1), // 1 / (1+|z|^2)
        TestFunction::rational_fs(vec![(2, 0, 1.0), (0, 2, 1.0)], 2),
    ];
    for (cx, cy, sigma) in [
        (0.0, 0.0, 0.6),
        (1.0, 0.0, 0.5),
        (0.0, 1.0, 0.5),
        (-0.7, 0.4, 0.8),
    ] {
        out.push(TestFunction::gaussian(C64::new(cx, cy), sigma, 1.0));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_decays_to_zero_at_infinity() {
        let g = TestFunction::gaussian(C64::new(0.5, 0.0), 0.7, 2.0);
        assert!((g.eval(P1Point::finite(C64::new(0.5, 0.0))) - 2.0).abs() < 1e-12);
        assert_eq!(g.eval(P1Point::infinity()), 0.0);
    }

    #[test]
    fn rational_fs_extends_by_zero() {
        let f = TestFunction::rational_fs(vec![(1, 0, 1.0)], 1);
        // x/(1+|z|^2) at z = 1 is 1/2
        assert!((f.eval(P1Point::finite(C64::new(1.0, 0.0))) - 0.5).abs() < 1e-12);
        assert_eq!(f.eval(P1Point::infinity()), 0.0);
        // large |z| tends to 0
        assert!(f.eval(P1Point::finite(C64::new(1e8, 0.0))).abs() < 1e-7);
    }

    #[test]
    fn declared_norm_dominates_grid_estimate() {
        for f in dictionary() {
            assert!(f.declared_c2 >= f.c2_estimate(21) * 0.99, "{}", f.name);
            let n = f.normalized_c2();
            assert!((n.declared_c2 - 1.0).abs() < 1e-12);
        }
    }
}
