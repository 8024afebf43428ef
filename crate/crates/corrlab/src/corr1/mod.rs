//! Holomorphic correspondences on the Riemann sphere, given by a reduced
//! square-free bivariate graph polynomial F(z, w). The bidegree (d0, d1)
//! counts forward images (deg_w F) and backward images (deg_z F), both with
//! multiplicity and including points at infinity.

mod chains;
mod point;

pub use chains::{any_endpoint_near, find_chains, find_chains_with, Chain, ChainSearch};
pub use point::{chordal_dist, P1Point};

use crate::polyalg::{
    self, bipoly_cq_from_json, bipoly_cq_to_json, cq_from_c64, roots, BiPoly, Poly, PolyError,
    RootSet, Var, C64, CQ, Q,
};
use num::rational::BigRational;
use num_complex::Complex;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorrError {
    #[error("graph polynomial must depend on both variables")]
    NotBivariate,
    #[error("graph contains a fibre component ({0})")]
    FiberComponent(String),
    #[error("fiber polynomial vanishes identically at the base point")]
    DegenerateFiber,
    #[error("composition resultant vanishes identically: inputs share a component")]
    ExtraneousFactorUnresolved,
    #[error("chain search truncated at {visited} nodes")]
    BranchCap { visited: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A holomorphic correspondence on P^1. The exact graph drives all algebra
/// (composition, adjoint, critical values); a cached float mirror serves the
/// numeric fiber solves.
#[derive(Clone, Debug)]
pub struct Corr1 {
    graph: BiPoly<CQ>,
    graph_c: BiPoly<C64>,
    d0: usize,
    d1: usize,
}

/// Factors removed while reducing a composition to a square-free graph.
#[derive(Clone, Debug, Default)]
pub struct ReductionLog {
    /// gcd(F, dF/dw) that was divided out (a product of repeated factors),
    /// with the total degree drop it caused in each variable.
    pub removed: Option<(BiPoly<CQ>, usize, usize)>,
    /// Univariate factor in the input variable alone (degree-drop artifact
    /// of the elimination), divided out.
    pub removed_content_z: Option<Poly<CQ>>,
    /// Univariate factor in the output variable alone, divided out.
    pub removed_content_w: Option<Poly<CQ>>,
    /// Bidegree of the raw resultant before reduction.
    pub raw_bidegree: (usize, usize),
}

impl Corr1 {
    /// Build from an exact graph polynomial. Validates the invariants:
    /// genuinely bivariate, square-free, and free of fibre components
    /// (factors depending on a single variable).
    pub fn new(graph: BiPoly<CQ>) -> Result<Self, CorrError> {
        let graph = graph.content_normalize();
        let d1 = graph.deg(Var::Z).ok_or(CorrError::NotBivariate)?;
        let d0 = graph.deg(Var::W).ok_or(CorrError::NotBivariate)?;
        if d0 == 0 || d1 == 0 {
            return Err(CorrError::NotBivariate);
        }
        // A factor in z alone is the content of the coefficients in w, and
        // symmetrically.
        let content_z = graph.content_in(Var::W);
        if content_z.degree().unwrap_or(0) > 0 {
            return Err(CorrError::FiberComponent("factor in z alone".into()));
        }
        let content_w = graph.content_in(Var::Z);
        if content_w.degree().unwrap_or(0) > 0 {
            return Err(CorrError::FiberComponent("factor in w alone".into()));
        }
        let (sf, removed) = graph.squarefree_in(Var::W);
        if removed.deg(Var::Z).unwrap_or(0) > 0 || removed.deg(Var::W).unwrap_or(0) > 0 {
            return Err(CorrError::FiberComponent(
                "graph is not square-free".into(),
            ));
        }
        let graph = sf;
        let graph_c = graph.to_c64();
        Ok(Corr1 {
            graph,
            graph_c,
            d0,
            d1,
        })
    }

    /// Build from float coefficients. Every f64 is an exact rational, so the
    /// exact graph mirrors the input bit-for-bit.
    pub fn from_c64(graph: &BiPoly<C64>) -> Result<Self, CorrError> {
        Self::new(graph.to_cq())
    }

    /// The family z^d1 (w^d0 + 3w + 1) = w^d0 + c, a correspondence sending
    /// z to w whose backward image of infinity is the d1-th roots of unity.
    pub fn family(d0: usize, d1: usize, c: CQ) -> Result<Self, CorrError> {
        assert!(d0 >= 1 && d1 >= 1);
        let one = CQ::one();
        // w^d0 + 3w + 1 as a w-column vector
        let mut inner = BiPoly::monomial(one.clone(), 0, d0);
        inner = inner.add(&BiPoly::monomial(CQ::new(BigRational::from_integer(3.into()), Q::zero()), 0, 1));
        inner = inner.add(&BiPoly::monomial(one.clone(), 0, 0));
        let zpart = BiPoly::monomial(one.clone(), d1, 0).mul(&inner);
        let rhs = BiPoly::monomial(one.clone(), 0, d0).add(&BiPoly::constant(c));
        Self::new(zpart.sub(&rhs))
    }

    pub fn graph(&self) -> &BiPoly<CQ> {
        &self.graph
    }

    pub fn graph_c64(&self) -> &BiPoly<C64> {
        &self.graph_c
    }

    /// Generic number of forward images, counted with multiplicity.
    pub fn d0(&self) -> usize {
        self.d0
    }

    /// Generic number of backward images, counted with multiplicity.
    pub fn d1(&self) -> usize {
        self.d1
    }

    /// Swap the variable roles: the graph of the inverse relation.
    pub fn adjoint(&self) -> Corr1 {
        let graph = self.graph.swap_vars().content_normalize();
        Corr1 {
            graph_c: graph.to_c64(),
            graph,
            d0: self.d1,
            d1: self.d0,
        }
    }

    /// Fiber polynomial for the forward direction: F(z0, .) as a polynomial
    /// in w, with the base point allowed at infinity (handled via the chart
    /// flip z -> 1/z).
    fn fiber_poly(&self, side: Side, base: P1Point) -> Poly<C64> {
        let g = match side {
            Side::Forward => self.graph_c.clone(),
            Side::Backward => self.graph_c.swap_vars(),
        };
        match base.to_affine() {
            Some(z0) => g.eval_var(Var::Z, &z0),
            None => g.reversed(Var::Z).eval_var(Var::Z, &C64::zero()),
        }
    }

    /// Forward image f(z): the d0 solutions w of F(z, w) = 0, with
    /// multiplicity; a degree drop of m is the point at infinity with
    /// multiplicity m.
    pub fn forward(&self, z: P1Point) -> Result<Fiber, CorrError> {
        self.image(Side::Forward, z)
    }

    /// Backward image f^{-1}(w): the d1 solutions z of F(z, w) = 0.
    pub fn backward(&self, w: P1Point) -> Result<Fiber, CorrError> {
        self.image(Side::Backward, w)
    }

    fn image(&self, side: Side, base: P1Point) -> Result<Fiber, CorrError> {
        let full = match side {
            Side::Forward => self.d0,
            Side::Backward => self.d1,
        };
        let p = self.fiber_poly(side, base);
        if p.is_zero() {
            return Err(CorrError::DegenerateFiber);
        }
        let finite = roots(&p)?;
        let drop = full - finite.total_multiplicity();
        let mut points: Vec<(P1Point, usize)> = finite
            .points
            .iter()
            .map(|(v, m)| (P1Point::finite(*v), *m))
            .collect();
        if drop > 0 {
            points.push((P1Point::infinity(), drop));
        }
        Ok(Fiber { points })
    }

    /// Composition f . g (apply g first): the graph is the square-free,
    /// content-reduced resultant eliminating the middle variable. Bidegrees
    /// multiply before reduction; removed factors are logged.
    pub fn compose(f: &Corr1, g: &Corr1) -> Result<(Corr1, ReductionLog), CorrError> {
        // Res_y(G(x, y), F(y, z)): view g's graph with w renamed to the
        // middle variable and f's graph with z renamed likewise.
        let g_mid = g.graph.clone(); // variables (x, y): z-power = x, w-power = y
        let f_mid = f.graph.clone(); // variables (y, z)
        let raw = resultant_middle(&g_mid, &f_mid)?;
        if raw.is_zero() {
            return Err(CorrError::ExtraneousFactorUnresolved);
        }
        let mut raw = raw.content_normalize();
        let raw_bidegree = (
            raw.deg(Var::W).unwrap_or(0),
            raw.deg(Var::Z).unwrap_or(0),
        );
        let mut log = ReductionLog {
            raw_bidegree,
            ..ReductionLog::default()
        };
        // Degree-drop artifacts of the elimination show up as factors in one
        // variable alone; divide them out before square-free reduction.
        let cz = raw.content_in(Var::W);
        if cz.degree().unwrap_or(0) > 0 {
            let embedded = BiPoly::from_poly_coeffs(
                Var::Z,
                &cz.coeffs()
                    .iter()
                    .map(|c| Poly::constant(c.clone()))
                    .collect::<Vec<_>>(),
            );
            raw = raw.div_exact(&embedded).expect("content divides");
            log.removed_content_z = Some(cz);
        }
        let cw = raw.content_in(Var::Z);
        if cw.degree().unwrap_or(0) > 0 {
            let embedded = BiPoly::from_poly_coeffs(
                Var::W,
                &cw.coeffs()
                    .iter()
                    .map(|c| Poly::constant(c.clone()))
                    .collect::<Vec<_>>(),
            );
            raw = raw.div_exact(&embedded).expect("content divides");
            log.removed_content_w = Some(cw);
        }
        let (sf, removed) = raw.squarefree_in(Var::W);
        let rz = removed.deg(Var::Z).unwrap_or(0);
        let rw = removed.deg(Var::W).unwrap_or(0);
        if rz > 0 || rw > 0 {
            log.removed = Some((removed, rz, rw));
        }
        let corr = Corr1::new(sf)?;
        Ok((corr, log))
    }

    /// n-fold composition with itself, with extraneous-factor logging.
    pub fn iterate(&self, n: usize) -> Result<(Corr1, Vec<ReductionLog>), CorrError> {
        assert!(n >= 1);
        let mut acc = self.clone();
        let mut logs = Vec::new();
        for _ in 1..n {
            let (next, log) = Corr1::compose(&acc, self)?;
            logs.push(log);
            acc = next;
        }
        Ok((acc, logs))
    }

    /// Critical values of the correspondence: w-coordinates of ramification
    /// points of the projection to the second factor, computed as the roots
    /// of the square-free part of Res_z(F, dF/dz) in w. Empty when d1 < 2.
    pub fn critical_values(&self, side: Side) -> Result<RootSet, CorrError> {
        let g = match side {
            Side::Forward => self.graph.clone(),
            // The other projection: swap roles and reuse the same logic.
            Side::Backward => self.graph.swap_vars(),
        };
        if g.deg(Var::Z).unwrap() < 2 {
            return Ok(RootSet::default());
        }
        let dz = g.derivative(Var::Z);
        if dz.is_zero() || dz.deg(Var::Z).is_none() {
            return Ok(RootSet::default());
        }
        // Res_z needs positive z-degree on both sides; dF/dz may drop to a
        // polynomial in w alone, in which case its roots are directly
        // ramification candidates.
        let res = if dz.deg(Var::Z).unwrap_or(0) == 0 {
            dz.as_poly_coeffs(Var::Z).remove(0)
        } else {
            polyalg::resultant_bi_cq(&g, &dz, Var::Z)?
        };
        if res.is_zero() {
            return Err(CorrError::FiberComponent(
                "discriminant locus is the whole line".into(),
            ));
        }
        // Square-free part over the exact domain, then numeric roots.
        let sf = {
            let d = res.derivative();
            if d.is_zero() {
                res.clone()
            } else {
                let g = res.gcd(&d);
                if g.degree().unwrap_or(0) == 0 {
                    res.clone()
                } else {
                    res.div_exact(&g).expect("gcd divides")
                }
            }
        };
        Ok(roots(&sf.to_c64())?)
    }

    /// Serialize: the graph JSON plus declared bidegrees.
    pub fn to_json(&self) -> Value {
        let mut v = bipoly_cq_to_json(&self.graph);
        v["d0"] = json!(self.d0);
        v["d1"] = json!(self.d1);
        v
    }

    pub fn from_json(v: &Value) -> Result<Self, CorrError> {
        let graph = if v.get("domain").and_then(Value::as_str) == Some("exact") {
            bipoly_cq_from_json(v)?
        } else {
            polyalg::bipoly_c64_from_json(v)?.to_cq()
        };
        let corr = Corr1::new(graph)?;
        if let Some(d0) = v.get("d0").and_then(Value::as_u64) {
            if d0 as usize != corr.d0 {
                return Err(CorrError::FiberComponent(format!(
                    "declared d0 = {} but graph has d0 = {}",
                    d0, corr.d0
                )));
            }
        }
        if let Some(d1) = v.get("d1").and_then(Value::as_u64) {
            if d1 as usize != corr.d1 {
                return Err(CorrError::FiberComponent(format!(
                    "declared d1 = {} but graph has d1 = {}",
                    d1, corr.d1
                )));
            }
        }
        Ok(corr)
    }
}

/// Direction selector for fibers and critical values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Forward,
    Backward,
}

/// A fiber on P^1: chart-aware points with multiplicities.
#[derive(Clone, Debug)]
pub struct Fiber {
    pub points: Vec<(P1Point, usize)>,
}

impl Fiber {
    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|(_, m)| m).sum()
    }

    pub fn max_multiplicity(&self) -> usize {
        self.points.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }

    pub fn with_multiplicity(&self) -> Vec<P1Point> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for (p, m) in &self.points {
            for _ in 0..*m {
                out.push(*p);
            }
        }
        out
    }

    /// Finite points only, repeated by multiplicity.
    pub fn finite_with_multiplicity(&self) -> Vec<C64> {
        self.points
            .iter()
            .filter_map(|(p, m)| p.to_affine().map(|v| (v, *m)))
            .flat_map(|(v, m)| std::iter::repeat(v).take(m))
            .collect()
    }
}

/// Resultant eliminating the shared middle variable of G(x, y) and F(y, z).
/// G is stored as BiPoly in (x=z-slot, y=w-slot); F as BiPoly in (y=z-slot,
/// z=w-slot). The result is a BiPoly in (x=z-slot, z=w-slot).
fn resultant_middle(g: &BiPoly<CQ>, f: &BiPoly<CQ>) -> Result<BiPoly<CQ>, CorrError> {
    let dy_g = g.deg(Var::W).unwrap();
    let dy_f = f.deg(Var::Z).unwrap();
    // Coefficients of y-powers: for G these are polynomials in x, for F in z.
    let gc: Vec<Poly<CQ>> = g.as_poly_coeffs(Var::W);
    let fc: Vec<Poly<CQ>> = f.as_poly_coeffs(Var::Z);

    // Linear elimination shortcut: when one side is degree 1 in y, the
    // resultant is a homogenized substitution, much cheaper than a
    // determinant. Used heavily by graph iteration of single-valued maps.
    if dy_g == 1 {
        // G = a(x) y + b(x); substitute y = -b/a into F and clear a^deg.
        let a = &gc[1];
        let b = &gc[0];
        let d = dy_f;
        let mut acc = BiPoly::zero();
        for (j, fj) in fc.iter().enumerate() {
            // term: F_j(z) * (-b(x))^j * a(x)^(d-j)
            let xb = b.neg().pow(j).mul(&a.pow(d - j));
            let xpart = BiPoly::from_poly_coeffs(Var::Z, &xb.coeffs().iter().map(|c| Poly::constant(c.clone())).collect::<Vec<_>>());
            let zpart = BiPoly::from_poly_coeffs(Var::W, &fj.coeffs().iter().map(|c| Poly::constant(c.clone())).collect::<Vec<_>>());
            acc = acc.add(&xpart.mul(&zpart));
        }
        return Ok(acc);
    }
    if dy_f == 1 {
        let a = &fc[1];
        let b = &fc[0];
        let d = dy_g;
        let mut acc = BiPoly::zero();
        for (j, gj) in gc.iter().enumerate() {
            let zb = b.neg().pow(j).mul(&a.pow(d - j));
            let zpart = BiPoly::from_poly_coeffs(Var::W, &zb.coeffs().iter().map(|c| Poly::constant(c.clone())).collect::<Vec<_>>());
            let xpart = BiPoly::from_poly_coeffs(Var::Z, &gj.coeffs().iter().map(|c| Poly::constant(c.clone())).collect::<Vec<_>>());
            acc = acc.add(&zpart.mul(&xpart));
        }
        return Ok(acc);
    }

    // General case: Sylvester determinant with BiPoly entries. G rows carry
    // x-only entries, F rows carry z-only entries; minors mix both.
    let embed_x = |p: &Poly<CQ>| -> BiPoly<CQ> {
        BiPoly::from_poly_coeffs(
            Var::Z,
            &p.coeffs()
                .iter()
                .map(|c| Poly::constant(c.clone()))
                .collect::<Vec<_>>(),
        )
    };
    let embed_z = |p: &Poly<CQ>| -> BiPoly<CQ> {
        BiPoly::from_poly_coeffs(
            Var::W,
            &p.coeffs()
                .iter()
                .map(|c| Poly::constant(c.clone()))
                .collect::<Vec<_>>(),
        )
    };
    let n = dy_g + dy_f;
    let mut m = vec![vec![BiPoly::zero(); n]; n];
    for row in 0..dy_f {
        for (k, c) in gc.iter().enumerate() {
            m[row][row + dy_g - k] = embed_x(c);
        }
    }
    for row in 0..dy_g {
        for (k, c) in fc.iter().enumerate() {
            m[dy_f + row][row + dy_f - k] = embed_z(c);
        }
    }
    Ok(polyalg::bareiss_det(m))
}

/// Exact complex-rational from components.
pub fn cq(re: f64, im: f64) -> CQ {
    cq_from_c64(Complex::new(re, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::cq_to_c64;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    /// w - z^2, the graph of squaring.
    pub(crate) fn squaring() -> Corr1 {
        let g = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
        ]);
        Corr1::from_c64(&g).unwrap()
    }

    /// z - w^3: forward images are cube roots.
    pub(crate) fn cube_root_graph() -> Corr1 {
        let g = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        Corr1::from_c64(&g).unwrap()
    }

    #[test]
    fn bidegrees() {
        let f = squaring();
        assert_eq!((f.d0(), f.d1()), (1, 2));
        let a = f.adjoint();
        assert_eq!((a.d0(), a.d1()), (2, 1));
    }

    #[test]
    fn forward_of_squaring() {
        let f = squaring();
        let fib = f.forward(P1Point::finite(c(3.0, 0.0))).unwrap();
        assert_eq!(fib.points.len(), 1);
        assert_eq!(fib.points[0].1, 1);
        assert!((fib.points[0].0.to_affine().unwrap() - c(9.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn backward_of_squaring() {
        let f = squaring();
        let fib = f.backward(P1Point::finite(c(4.0, 0.0))).unwrap();
        assert_eq!(fib.total_multiplicity(), 2);
        let mut re: Vec<f64> = fib
            .finite_with_multiplicity()
            .iter()
            .map(|v| v.re)
            .collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-10 && (re[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn backward_triple_root() {
        // F = w^2 - z^3: backward of w=0 is z=0 with multiplicity 3.
        let g = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let f = Corr1::from_c64(&g).unwrap();
        let fib = f.backward(P1Point::finite(c(0.0, 0.0))).unwrap();
        assert_eq!(fib.points.len(), 1);
        assert_eq!(fib.points[0].1, 3);
    }

    #[test]
    fn forward_with_sqrt_branches() {
        // F = w^2 - z^3 - c at z = 0: w = ±sqrt(c), c = 4 -> ±2.
        let g = BiPoly::new(vec![
            vec![c(-4.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0); 3],
            vec![c(0.0, 0.0); 3],
            vec![c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        ]);
        let f = Corr1::from_c64(&g).unwrap();
        let fib = f.forward(P1Point::finite(c(0.0, 0.0))).unwrap();
        assert_eq!(fib.total_multiplicity(), 2);
        let mut re: Vec<f64> = fib
            .finite_with_multiplicity()
            .iter()
            .map(|v| v.re)
            .collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 2.0).abs() < 1e-10 && (re[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn family_degree_drop_at_roots_of_unity() {
        // At z with z^d1 = 1, the w-degree drops: infinity enters the fiber.
        let f = Corr1::family(2, 3, cq(5.0, 0.0)).unwrap();
        assert_eq!((f.d0(), f.d1()), (2, 3));
        let fib = f.forward(P1Point::finite(c(1.0, 0.0))).unwrap();
        assert!(fib.points.iter().any(|(p, _)| p.is_infinity()));
        assert_eq!(fib.total_multiplicity(), 2);
        // Backward image of infinity is the d1-th roots of unity.
        let back = f.backward(P1Point::infinity()).unwrap();
        assert_eq!(back.total_multiplicity(), 3);
        for (p, _) in &back.points {
            let v = p.to_affine().unwrap();
            assert!((v.norm() - 1.0).abs() < 1e-9);
            assert!((v.powu(3) - c(1.0, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn compose_power_maps() {
        let f = squaring();
        let (ff, log) = Corr1::compose(&f, &f).unwrap();
        assert_eq!((ff.d0(), ff.d1()), (1, 4));
        assert!(log.removed.is_none());
        // graph should be w - z^4 up to scalar
        let fib = ff.forward(P1Point::finite(c(2.0, 0.0))).unwrap();
        assert!((fib.points[0].0.to_affine().unwrap() - c(16.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn compose_with_adjoint_reduces_identity_factor() {
        // f . f^{-1} for squaring: raw resultant (x - z)^2 reduces to the
        // identity graph with the repeated factor logged.
        let f = squaring();
        let (h, log) = Corr1::compose(&f, &f.adjoint()).unwrap();
        assert_eq!((h.d0(), h.d1()), (1, 1));
        let removed = log.removed.expect("repeated factor is logged");
        assert_eq!(removed.1, 1);
        assert_eq!(removed.2, 1);
    }

    #[test]
    fn compose_branch_multiset_matches() {
        // forward(compose(f, g), x) = union over y in g(x) of f(y).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let f = Corr1::family(2, 3, cq(5.0, 0.0)).unwrap();
        let g = squaring();
        let (fg, _) = Corr1::compose(&f, &g).unwrap();
        assert_eq!((fg.d0(), fg.d1()), (f.d0() * g.d0(), f.d1() * g.d1()));
        for _ in 0..10 {
            let x = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let direct = fg.forward(P1Point::finite(x)).unwrap();
            let mut via: Vec<P1Point> = Vec::new();
            for y in g.forward(P1Point::finite(x)).unwrap().with_multiplicity() {
                via.extend(f.forward(y).unwrap().with_multiplicity());
            }
            let mut d = direct.with_multiplicity();
            assert_eq!(d.len(), via.len());
            // greedy match within tolerance
            for p in via {
                let (idx, dist) = d
                    .iter()
                    .enumerate()
                    .map(|(i, q)| (i, chordal_dist(p, *q)))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(dist < 1e-6, "unmatched branch point {p:?} (best {dist})");
                d.swap_remove(idx);
            }
        }
    }

    #[test]
    fn adjoint_involutive_and_antihomomorphism() {
        let f = Corr1::family(2, 3, cq(5.0, 0.0)).unwrap();
        let g = squaring();
        let ff = f.adjoint().adjoint();
        assert_eq!(ff.graph(), f.graph());
        let (lhs, _) = Corr1::compose(&f, &g).unwrap();
        let lhs = lhs.adjoint();
        let (rhs, _) = Corr1::compose(&g.adjoint(), &f.adjoint()).unwrap();
        assert_eq!(lhs.graph(), rhs.graph());
    }

    #[test]
    fn critical_values_of_simple_graphs() {
        // z - w^3: dF/dz = 1 never vanishes, no critical values forward side.
        let f = cube_root_graph();
        let cv = f.critical_values(Side::Forward).unwrap();
        assert!(cv.points.is_empty());
        // z^2 - w: branch point of z -> ±sqrt(w) at w = 0.
        let g = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ]);
        let g = Corr1::from_c64(&g).unwrap();
        let cv = g.critical_values(Side::Forward).unwrap();
        assert_eq!(cv.points.len(), 1);
        assert!(cv.points[0].0.norm() < 1e-12);
    }

    #[test]
    fn critical_values_of_family_land_in_predicted_set() {
        let f = Corr1::family(2, 3, cq(5.0, 0.0)).unwrap();
        let cv = f.critical_values(Side::Forward).unwrap();
        assert!(!cv.points.is_empty());
        for (w, _) in &cv.points {
            let in_first = (w * w + c(5.0, 0.0)).norm() < 1e-6;
            let in_second = (w * w + 3.0 * w + c(1.0, 0.0)).norm() < 1e-6;
            assert!(
                in_first || in_second,
                "critical value {w} outside predicted set"
            );
        }
    }

    #[test]
    fn mass_bookkeeping_at_random_points() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let f = Corr1::family(2, 3, cq(0.5, 0.25)).unwrap();
        for _ in 0..100 {
            let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            assert_eq!(
                f.forward(P1Point::finite(z)).unwrap().total_multiplicity(),
                f.d0()
            );
            assert_eq!(
                f.backward(P1Point::finite(z)).unwrap().total_multiplicity(),
                f.d1()
            );
        }
    }

    #[test]
    fn json_roundtrip_with_bidegrees() {
        let f = Corr1::family(2, 3, cq(0.5, 0.0)).unwrap();
        let v = f.to_json();
        let g = Corr1::from_json(&v).unwrap();
        assert_eq!(f.graph(), g.graph());
        let resc = cq_to_c64(&f.graph().coeff(0, 0));
        assert!(resc.is_finite());
    }

    #[test]
    fn rejects_fiber_component() {
        // (z - 1)(w - z^2) has a fibre of the first projection.
        let zm1 = BiPoly::new(vec![vec![c(-1.0, 0.0)], vec![c(1.0, 0.0)]]);
        let sq = BiPoly::new(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(-1.0, 0.0), c(0.0, 0.0)],
        ]);
        let bad = zm1.mul(&sq);
        assert!(matches!(
            Corr1::from_c64(&bad),
            Err(CorrError::FiberComponent(_))
        ));
    }
}
