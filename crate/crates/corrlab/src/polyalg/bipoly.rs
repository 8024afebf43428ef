//! Dense bivariate polynomials F(z, w), stored as a coefficient matrix
//! indexed by (z-power, w-power).

use super::poly::{content_scale, Poly};
use super::scalar::{Scalar, C64, CQ};
use num::rational::BigRational;
use num_complex::Complex;
use num_traits::{One, Signed, Zero};

/// Variable tag for bivariate operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Var {
    Z,
    W,
}

impl Var {
    pub fn other(self) -> Var {
        match self {
            Var::Z => Var::W,
            Var::W => Var::Z,
        }
    }
}

/// Bivariate polynomial; `rows[i][j]` is the coefficient of z^i w^j. The
/// zero polynomial is the empty matrix; otherwise trailing all-zero rows and
/// columns are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct BiPoly<T: Scalar> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> BiPoly<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Self {
        let mut rows = rows;
        let width = rows.iter().map(Vec::len).max().unwrap_or(0);
        for r in &mut rows {
            r.resize(width, T::zero());
        }
        let mut bp = BiPoly { rows };
        bp.trim();
        bp
    }

    pub fn zero() -> Self {
        BiPoly { rows: vec![] }
    }

    pub fn constant(c: T) -> Self {
        BiPoly::new(vec![vec![c]])
    }

    /// Monomial c * z^i w^j.
    pub fn monomial(c: T, i: usize, j: usize) -> Self {
        let mut rows = vec![vec![T::zero(); j + 1]; i + 1];
        rows[i][j] = c;
        BiPoly::new(rows)
    }

    fn trim(&mut self) {
        while self
            .rows
            .last()
            .map_or(false, |r| r.iter().all(|c| c.is_zero()))
        {
            self.rows.pop();
        }
        if self.rows.is_empty() {
            return;
        }
        let mut width = self.rows[0].len();
        while width > 0 && self.rows.iter().all(|r| r[width - 1].is_zero()) {
            width -= 1;
        }
        if width == 0 {
            self.rows.clear();
            return;
        }
        for r in &mut self.rows {
            r.truncate(width);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn deg(&self, var: Var) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        match var {
            Var::Z => Some(self.rows.len() - 1),
            Var::W => Some(self.rows[0].len() - 1),
        }
    }

    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.rows
            .get(i)
            .and_then(|r| r.get(j))
            .cloned()
            .unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(move |(j, c)| (i, j, c))
        })
    }

    pub fn eval(&self, z: &T, w: &T) -> T {
        // Horner in z over Horner-in-w row values.
        let mut acc = T::zero();
        for row in self.rows.iter().rev() {
            let mut rv = T::zero();
            for c in row.iter().rev() {
                rv = rv * w.clone() + c.clone();
            }
            acc = acc * z.clone() + rv;
        }
        acc
    }

    /// Partial evaluation: fix the given variable, producing a univariate
    /// polynomial in the other one.
    pub fn eval_var(&self, var: Var, value: &T) -> Poly<T> {
        let coeffs = self.as_poly_coeffs(var.other());
        // coeffs[k] is a Poly<T> in `var`; evaluate each at `value`.
        Poly::new(coeffs.iter().map(|p| p.eval(value)).collect())
    }

    /// Coefficient list of the polynomial viewed in `var`: entry k is the
    /// coefficient of var^k, a univariate polynomial in the other variable.
    pub fn as_poly_coeffs(&self, var: Var) -> Vec<Poly<T>> {
        if self.is_zero() {
            return vec![];
        }
        match var {
            Var::Z => {
                let dz = self.rows.len();
                (0..dz).map(|i| Poly::new(self.rows[i].clone())).collect()
            }
            Var::W => {
                let dw = self.rows[0].len();
                (0..dw)
                    .map(|j| Poly::new(self.rows.iter().map(|r| r[j].clone()).collect()))
                    .collect()
            }
        }
    }

    /// Rebuild from coefficients in `var` (inverse of `as_poly_coeffs`).
    pub fn from_poly_coeffs(var: Var, coeffs: &[Poly<T>]) -> Self {
        let mut out = BiPoly::zero();
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in p.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let (i, j) = match var {
                    Var::Z => (k, m),
                    Var::W => (m, k),
                };
                out = out.add(&BiPoly::monomial(c.clone(), i, j));
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let nr = self.rows.len().max(rhs.rows.len());
        let nc = self
            .rows
            .first()
            .map_or(0, |r| r.len())
            .max(rhs.rows.first().map_or(0, |r| r.len()));
        let mut rows = vec![vec![T::zero(); nc]; nr];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.coeff(i, j) + rhs.coeff(i, j);
            }
        }
        BiPoly::new(rows)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        BiPoly::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| c.clone().neg()).collect())
                .collect(),
        )
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let nr = self.rows.len() + rhs.rows.len() - 1;
        let nc = self.rows[0].len() + rhs.rows[0].len() - 1;
        let mut rows = vec![vec![T::zero(); nc]; nr];
        for (i, a, j, b) in self.rows.iter().enumerate().flat_map(|(i, ra)| {
            rhs.rows
                .iter()
                .enumerate()
                .map(move |(j, rb)| (i, ra, j, rb))
        }) {
            for (p, ca) in a.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (q, cb) in b.iter().enumerate() {
                    if cb.is_zero() {
                        continue;
                    }
                    rows[i + j][p + q] = rows[i + j][p + q].clone() + ca.clone() * cb.clone();
                }
            }
        }
        BiPoly::new(rows)
    }

    pub fn scale(&self, s: &T) -> Self {
        BiPoly::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| c.clone() * s.clone()).collect())
                .collect(),
        )
    }

    pub fn derivative(&self, var: Var) -> Self {
        let coeffs = self.as_poly_coeffs(var);
        if coeffs.len() <= 1 {
            return BiPoly::zero();
        }
        let mut out = Vec::with_capacity(coeffs.len() - 1);
        for (k, p) in coeffs.iter().enumerate().skip(1) {
            let mut acc = Poly::zero();
            for _ in 0..k {
                acc = acc.add(p);
            }
            out.push(acc);
        }
        BiPoly::from_poly_coeffs(var, &out)
    }

    /// Swap the roles of z and w (matrix transpose).
    pub fn swap_vars(&self) -> Self {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let nr = self.rows.len();
        let nc = self.rows[0].len();
        let mut rows = vec![vec![T::zero(); nr]; nc];
        for i in 0..nr {
            for j in 0..nc {
                rows[j][i] = self.rows[i][j].clone();
            }
        }
        BiPoly::new(rows)
    }

    /// Chart flip in `var`: returns var^d * F(..., 1/var, ...), the graph
    /// polynomial in the coordinate u = 1/var.
    pub fn reversed(&self, var: Var) -> Self {
        let coeffs = self.as_poly_coeffs(var);
        let rev: Vec<Poly<T>> = coeffs.into_iter().rev().collect();
        BiPoly::from_poly_coeffs(var, &rev)
    }

    pub fn max_coeff_mag(&self) -> f64 {
        self.rows
            .iter()
            .flat_map(|r| r.iter())
            .map(|c| c.approx_mag())
            .fold(0.0, f64::max)
    }

    /// Exact division; None when not divisible. Operates recursively on the
    /// representation in w with coefficients in the other variable.
    pub fn div_exact(&self, div: &Self) -> Option<Self> {
        if self.is_zero() {
            return Some(BiPoly::zero());
        }
        if div.is_zero() {
            return None;
        }
        let da = self.as_poly_coeffs(Var::W);
        let db = div.as_poly_coeffs(Var::W);
        let (mut rem, db) = (da, db);
        let dd = db.len() - 1;
        let lead = db[dd].clone();
        if rem.len() < db.len() {
            return None;
        }
        let mut quot: Vec<Poly<T>> = vec![Poly::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            if rem[k].is_zero() {
                continue;
            }
            let q = rem[k].div_exact(&lead)?;
            for j in 0..=dd {
                let t = rem[k - dd + j].sub(&q.mul(&db[j]));
                rem[k - dd + j] = t;
            }
            quot[k - dd] = q;
        }
        if rem.iter().any(|p| !p.is_zero()) {
            return None;
        }
        Some(BiPoly::from_poly_coeffs(Var::W, &quot))
    }
}

impl BiPoly<CQ> {
    pub fn to_c64(&self) -> BiPoly<C64> {
        BiPoly::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(super::scalar::cq_to_c64).collect())
                .collect(),
        )
    }

    /// Canonical representative up to scalar multiples: content-one Gaussian
    /// integer coefficients with a deterministic sign for the leading term.
    pub fn content_normalize(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let parts: Vec<&BigRational> = self
            .rows
            .iter()
            .flat_map(|r| r.iter())
            .flat_map(|c| [&c.re, &c.im])
            .collect();
        let scale = content_scale(&parts);
        let scaled = self.scale(&Complex::new(scale, BigRational::zero()));
        // Sign convention: highest (z-power, w-power) term has positive real
        // part (or positive imaginary part when real is zero).
        let lead = scaled
            .terms()
            .max_by_key(|(i, j, _)| (*i, *j))
            .map(|(_, _, c)| c.clone())
            .unwrap();
        let flip = if !lead.re.is_zero() {
            lead.re.is_negative()
        } else {
            lead.im.is_negative()
        };
        if flip {
            scaled.neg()
        } else {
            scaled
        }
    }

    /// Content of the polynomial viewed in `var`: gcd of its coefficient
    /// polynomials in the other variable (monic). Nontrivial content means a
    /// factor depending on the other variable alone.
    pub fn content_in(&self, var: Var) -> Poly<CQ> {
        let coeffs = self.as_poly_coeffs(var);
        let mut g = Poly::zero();
        for p in &coeffs {
            if p.is_zero() {
                continue;
            }
            g = if g.is_zero() { p.clone() } else { g.gcd(p) };
            if g.degree() == Some(0) {
                break;
            }
        }
        g
    }

    /// Primitive-PRS gcd in the representation `(other var coefficients)[var]`.
    /// Both inputs nonzero.
    pub fn gcd_in(&self, other: &Self, var: Var) -> BiPoly<CQ> {
        let ca = self.content_in(var);
        let cb = other.content_in(var);
        let content_gcd = ca.gcd(&cb);
        let pa = self.primitive_part(var, &ca);
        let pb = other.primitive_part(var, &cb);
        let prim_gcd = primitive_prs_gcd(pa, pb, var);
        let content_bi = BiPoly::from_poly_coeffs(var, &[content_gcd]);
        prim_gcd.mul(&content_bi).content_normalize()
    }

    fn primitive_part(&self, var: Var, content: &Poly<CQ>) -> BiPoly<CQ> {
        if content.degree() == Some(0) || content.is_zero() {
            // Normalize the constant away.
            let c = if content.is_zero() {
                return self.clone();
            } else {
                content.coeff(0)
            };
            return self.scale(&(CQ::from(BigRational::from_integer(1.into())) / c));
        }
        let coeffs = self.as_poly_coeffs(var);
        let out: Vec<Poly<CQ>> = coeffs
            .iter()
            .map(|p| p.div_exact(content).expect("content divides coefficients"))
            .collect();
        BiPoly::from_poly_coeffs(var, &out)
    }

    /// Square-free part with respect to `var`: self / gcd(self, d self/d var).
    /// Returns (square-free part, removed factor).
    pub fn squarefree_in(&self, var: Var) -> (BiPoly<CQ>, BiPoly<CQ>) {
        let deriv = self.derivative(var);
        if deriv.is_zero() {
            return (self.clone(), BiPoly::constant(CQ::from(BigRational::one())));
        }
        let g = self.gcd_in(&deriv, var);
        if g.deg(Var::Z).unwrap_or(0) == 0 && g.deg(Var::W).unwrap_or(0) == 0 {
            return (
                self.clone(),
                BiPoly::constant(CQ::from(BigRational::one())),
            );
        }
        let sf = self
            .div_exact(&g)
            .expect("gcd divides the polynomial")
            .content_normalize();
        (sf, g)
    }
}

impl BiPoly<C64> {
    pub fn to_cq(&self) -> BiPoly<CQ> {
        BiPoly::new(
            self.rows
                .iter()
                .map(|r| r.iter().map(|c| super::scalar::cq_from_c64(*c)).collect())
                .collect(),
        )
    }
}

/// Primitive polynomial remainder sequence over (field[other])[var], keeping
/// coefficients primitive at each step to control growth.
fn primitive_prs_gcd(a: BiPoly<CQ>, b: BiPoly<CQ>, var: Var) -> BiPoly<CQ> {
    let (mut a, mut b) = (a, b);
    loop {
        if b.is_zero() {
            let ca = a.content_in(var);
            return a.primitive_part(var, &ca);
        }
        let r = pseudo_rem(&a, &b, var);
        a = b;
        b = if r.is_zero() {
            BiPoly::zero()
        } else {
            let cr = r.content_in(var);
            r.primitive_part(var, &cr).content_normalize()
        };
    }
}

/// Pseudo-remainder of a by b in `var`, up to a factor in the coefficient
/// ring (discarded by the primitive PRS). deg_var of the result is < deg_var b.
fn pseudo_rem(a: &BiPoly<CQ>, b: &BiPoly<CQ>, var: Var) -> BiPoly<CQ> {
    let da = a.deg(var).expect("nonzero");
    let db = b.deg(var).expect("nonzero");
    if da < db {
        return a.clone();
    }
    let rb = b.as_poly_coeffs(var);
    let lead = rb[db].clone();
    let mut r = a.as_poly_coeffs(var);
    loop {
        while r.last().map_or(false, |p| p.is_zero()) {
            r.pop();
        }
        if r.len() <= db {
            break;
        }
        let dr = r.len() - 1;
        let top = r[dr].clone();
        // r <- lc(b) * r - top * var^(dr-db) * b; the top term cancels.
        for item in r.iter_mut() {
            *item = item.mul(&lead);
        }
        for j in 0..=db {
            r[dr - db + j] = r[dr - db + j].sub(&top.mul(&rb[j]));
        }
        debug_assert!(r[dr].is_zero());
    }
    BiPoly::from_poly_coeffs(var, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    fn c(re: f64) -> C64 {
        Complex::new(re, 0.0)
    }

    fn bi_c64(rows: Vec<Vec<f64>>) -> BiPoly<C64> {
        BiPoly::new(
            rows.into_iter()
                .map(|r| r.into_iter().map(c).collect())
                .collect(),
        )
    }

    #[test]
    fn degrees_and_eval() {
        // F = w - z^2: rows z^0..z^2, cols w^0..w^1
        let f = bi_c64(vec![vec![0.0, 1.0], vec![0.0, 0.0], vec![-1.0, 0.0]]);
        assert_eq!(f.deg(Var::Z), Some(2));
        assert_eq!(f.deg(Var::W), Some(1));
        assert_eq!(f.eval(&c(3.0), &c(9.0)), c(0.0));
        let fiber = f.eval_var(Var::Z, &c(3.0));
        assert_eq!(fiber.coeffs(), &[c(-9.0), c(1.0)]);
    }

    #[test]
    fn swap_and_reverse() {
        let f = bi_c64(vec![vec![0.0, 1.0], vec![0.0, 0.0], vec![-1.0, 0.0]]);
        let g = f.swap_vars(); // z - w^2
        assert_eq!(g.deg(Var::Z), Some(1));
        assert_eq!(g.deg(Var::W), Some(2));
        // Reverse in z: z^2 * F(1/z, w) = z^2 w - 1
        let r = f.reversed(Var::Z);
        assert_eq!(r.coeff(2, 1), c(1.0));
        assert_eq!(r.coeff(0, 0), c(-1.0));
    }

    #[test]
    fn exact_squarefree_reduction() {
        // (z - w)^2 reduces to (z - w), removed factor has degree 1.
        let zw = bi_c64(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).to_cq();
        let sq = zw.mul(&zw);
        let (sf, removed) = sq.squarefree_in(Var::W);
        assert_eq!(sf.deg(Var::W), Some(1));
        assert_eq!(sf.deg(Var::Z), Some(1));
        assert_eq!(removed.deg(Var::W), Some(1));
    }

    #[test]
    fn exact_gcd_bivariate() {
        // gcd((z-w)(z+w), (z-w)(z^2+1)) = (z-w) up to scalar
        let zmw = bi_c64(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).to_cq();
        let zpw = bi_c64(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).to_cq();
        let z2p1 = bi_c64(vec![vec![1.0], vec![0.0], vec![1.0]]).to_cq();
        let a = zmw.mul(&zpw);
        let b = zmw.mul(&z2p1);
        let g = a.gcd_in(&b, Var::W);
        assert_eq!(g.deg(Var::W), Some(1));
        assert_eq!(g.deg(Var::Z), Some(1));
    }

    #[test]
    fn div_exact_verifies() {
        let zmw = bi_c64(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).to_cq();
        let zpw = bi_c64(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).to_cq();
        let prod = zmw.mul(&zpw);
        let q = prod.div_exact(&zmw).unwrap();
        assert_eq!(q, zpw);
        assert!(prod.div_exact(&z2p1()).is_none());
    }

    fn z2p1() -> BiPoly<CQ> {
        bi_c64(vec![vec![1.0], vec![0.0], vec![1.0]]).to_cq()
    }
}
