//! Atomic measures on the sphere and their normalized pullbacks.

use super::testfn::TestFunction;
use super::GreenError;
use crate::corr1::{Corr1, P1Point};
use crate::tol;
use serde_json::{json, Value};

/// Weighted point masses with chart-aware coordinates.
#[derive(Clone, Debug, Default)]
pub struct AtomicMeasure {
    pub atoms: Vec<(P1Point, f64)>,
}

impl AtomicMeasure {
    pub fn dirac(p: P1Point) -> Self {
        AtomicMeasure {
            atoms: vec![(p, 1.0)],
        }
    }

    pub fn total_mass(&self) -> f64 {
        super::sample::pairwise_sum(&self.atoms.iter().map(|(_, w)| *w).collect::<Vec<_>>())
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - 1.0).abs() <= tol::TOL_MASS
    }

    /// Pair against a test function: sum of w_i phi(x_i), chart-aware,
    /// summed pairwise for reproducible rounding.
    pub fn pair(&self, phi: &TestFunction) -> f64 {
        let terms: Vec<f64> = self
            .atoms
            .iter()
            .map(|(p, w)| w * phi.eval(*p))
            .collect();
        super::sample::pairwise_sum(&terms)
    }

    /// CSV rows (re, im, weight, chart), in the stored chart coordinates.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,weight,chart\n");
        for (p, w) in &self.atoms {
            let c = p.chart_coord();
            out.push_str(&format!("{},{},{},{}\n", c.re, c.im, w, p.chart_index()));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!(self
            .atoms
            .iter()
            .map(|(p, w)| {
                let c = p.chart_coord();
                json!([c.re, c.im, w, p.chart_index()])
            })
            .collect::<Vec<_>>())
    }
}

/// Normalized pullback of an atomic measure: each atom (a, w) spreads over
/// the d1 backward solutions with weights w * mult / d1, preserving total
/// mass.
pub fn pullback_measure(f: &Corr1, mu: &AtomicMeasure) -> Result<AtomicMeasure, GreenError> {
    let d1 = f.d1() as f64;
    let mut atoms = Vec::with_capacity(mu.atoms.len() * f.d1());
    for (a, w) in &mu.atoms {
        let fiber = f.backward(*a)?;
        for (z, m) in fiber.points {
            atoms.push((z, w * (m as f64) / d1));
        }
    }
    Ok(AtomicMeasure { atoms })
}

/// Exact n-step normalized pullback of a Dirac mass: full enumeration of
/// the d1^n backward tree.
pub fn pullback_iterate_exact(
    f: &Corr1,
    a: P1Point,
    n: usize,
) -> Result<AtomicMeasure, GreenError> {
    let mut mu = AtomicMeasure::dirac(a);
    for _ in 0..n {
        mu = pullback_measure(f, &mu)?;
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::super::tests::squaring;
    use super::*;
    use crate::polyalg::C64;

    #[test]
    fn pullback_of_squaring_dirac() {
        let f = squaring();
        let mu = pullback_measure(&f, &AtomicMeasure::dirac(P1Point::finite(C64::new(4.0, 0.0))))
            .unwrap();
        assert_eq!(mu.atoms.len(), 2);
        assert!(mu.is_probability());
        for (p, w) in &mu.atoms {
            assert!((w - 0.5).abs() < 1e-15);
            let v = p.to_affine().unwrap();
            assert!((v * v - C64::new(4.0, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn pullback_cube_root_weights() {
        // F = w^2 - z^3 has d1 = 3; delta at w = 1 pulls back to the three
        // cube roots of 1, each with weight 1/3.
        let rows = vec![
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0); 3],
            vec![C64::new(0.0, 0.0); 3],
            vec![C64::new(-1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ];
        let f = crate::corr1::Corr1::from_c64(&crate::polyalg::BiPoly::new(rows)).unwrap();
        let mu = pullback_measure(&f, &AtomicMeasure::dirac(P1Point::finite(C64::new(1.0, 0.0))))
            .unwrap();
        assert_eq!(mu.atoms.len(), 3);
        assert!(mu.is_probability());
        for (p, w) in &mu.atoms {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
            let v = p.to_affine().unwrap();
            assert!((v.powu(3) - C64::new(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn mass_preserved_over_random_pulls() {
        use rand::{Rng, SeedableRng};
        let f = crate::corr1::Corr1::family(2, 3, crate::corr1::cq(0.3, 0.1)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a = P1Point::finite(C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));
            let mu = pullback_iterate_exact(&f, a, 3).unwrap();
            assert!((mu.total_mass() - 1.0).abs() < tol::TOL_MASS);
        }
    }
}
