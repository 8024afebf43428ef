//! Jordan-derived spectral data for real (not necessarily invertible)
//! matrices, and the normalized power operators they control.
//!
//! Jordan structure over floats is decided from staircase ranks of
//! (M - lambda I)^j at a relative tolerance, with an explicit conditioning
//! margin reported.

use super::CohomError;
use crate::tol;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

type CMat = DMatrix<Complex<f64>>;

/// A linear map expected to preserve a cone (the cone itself is optional:
/// when generators are supplied they are checked at construction).
#[derive(Clone, Debug)]
pub struct ConeMap {
    matrix: DMatrix<f64>,
    cone_generators: Option<Vec<DVector<f64>>>,
}

impl ConeMap {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self, CohomError> {
        if !matrix.is_square() {
            return Err(CohomError::NotSquare);
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(CohomError::Precondition("matrix entries must be finite".into()));
        }
        Ok(ConeMap {
            matrix,
            cone_generators: None,
        })
    }

    /// Attach cone generators and verify the map sends each generator to a
    /// nonnegative combination (within tolerance, via least squares).
    pub fn with_cone(mut self, generators: Vec<DVector<f64>>) -> Result<Self, CohomError> {
        let h = self.matrix.nrows();
        if generators.is_empty() || generators.iter().any(|g| g.len() != h) {
            return Err(CohomError::Precondition("bad cone generator shapes".into()));
        }
        let g = DMatrix::from_columns(&generators);
        let svd = g.clone().svd(true, true);
        for gen in &generators {
            let img = &self.matrix * gen;
            let x = svd
                .solve(&img, 1e-12)
                .map_err(|_| CohomError::Precondition("cone solve failed".into()))?;
            let resid = (&g * &x - &img).norm();
            let scale = img.norm().max(1.0);
            if resid > 1e-8 * scale || x.iter().any(|c| *c < -1e-8 * scale) {
                return Err(CohomError::ConeViolated);
            }
        }
        self.cone_generators = Some(generators);
        Ok(self)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

/// Spectral data: radius, its multiplicity (max dominant Jordan block
/// size), real bases of the dominant and strictly dominant eigenspaces, and
/// the dominant direction on the torus.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub lambda: f64,
    /// Multiplicity of the spectral radius: largest Jordan block size among
    /// eigenvalues of maximal modulus.
    pub m: usize,
    /// Real basis of the dominant eigenspace F (eigenlines of the size-m
    /// blocks of maximal modulus, closed under conjugation).
    pub f_basis: Vec<DVector<f64>>,
    /// Real basis of the strictly dominant eigenspace H (same, restricted
    /// to the eigenvalue lambda itself).
    pub h_basis: Vec<DVector<f64>>,
    /// One angle per dominant block, in [0, 1): lambda_i = lambda e^{2 pi i
    /// theta_i}.
    pub theta: Vec<f64>,
    /// Distinct eigenvalues with (algebraic multiplicity, max block size).
    pub eigen_summary: Vec<(Complex<f64>, usize, usize)>,
    /// Smallest margin (ratio to the rank tolerance) over all rank
    /// decisions; small margins mean an ambiguous Jordan structure.
    pub rank_margin: f64,
}

impl SpectralData {
    pub fn dim_f(&self) -> usize {
        self.f_basis.len()
    }

    pub fn dim_h(&self) -> usize {
        self.h_basis.len()
    }
}

fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex::new(x, 0.0))
}

/// Rank with margin tracking: returns (rank, margin factor of the decision).
fn rank_with_margin(m: &CMat, rel_tol: f64) -> (usize, f64) {
    let svd = m.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return (0, f64::INFINITY);
    }
    let cut = rel_tol * smax;
    let mut rank = 0;
    let mut margin = f64::INFINITY;
    for s in svd.singular_values.iter() {
        if *s > cut {
            rank += 1;
            margin = margin.min(*s / cut);
        } else if *s > 0.0 {
            margin = margin.min(cut / *s);
        }
    }
    (rank, margin)
}

/// Orthonormal basis of the null space (columns), with margin.
fn null_space(m: &CMat, rel_tol: f64) -> Vec<DVector<Complex<f64>>> {
    let n = m.ncols();
    let svd = m.clone().svd(false, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * smax.max(1e-300);
    let vt = svd.v_t.expect("requested");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s <= cut {
            out.push(vt.row(i).transpose().map(|c| c.conj()));
        }
    }
    // Rows of V^T beyond the singular value count are also null directions
    // for wide matrices; square here, so the loop covers everything.
    let _ = n;
    out
}

/// Orthonormal basis of the column space.
fn col_space(m: &CMat, rel_tol: f64) -> Vec<DVector<Complex<f64>>> {
    let svd = m.clone().svd(true, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cut = rel_tol * smax.max(1e-300);
    let u = svd.u.expect("requested");
    let mut out = Vec::new();
    for (i, s) in svd.singular_values.iter().enumerate() {
        if *s > cut {
            out.push(u.column(i).into_owned());
        }
    }
    out
}

/// Intersection of two subspaces given by orthonormal column bases: the
/// null space of [A | -B] maps to common vectors A x.
fn intersect(a: &[DVector<Complex<f64>>], b: &[DVector<Complex<f64>>]) -> Vec<DVector<Complex<f64>>> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let n = a[0].len();
    let mut m = CMat::zeros(n, a.len() + b.len());
    for (j, v) in a.iter().enumerate() {
        m.set_column(j, v);
    }
    for (j, v) in b.iter().enumerate() {
        m.set_column(a.len() + j, &v.map(|c| -c));
    }
    let nulls = null_space(&m, tol::TOL_RANK);
    let amat = {
        let mut am = CMat::zeros(n, a.len());
        for (j, v) in a.iter().enumerate() {
            am.set_column(j, v);
        }
        am
    };
    let mut out: Vec<DVector<Complex<f64>>> = Vec::new();
    for nv in nulls {
        let x = nv.rows(0, a.len()).into_owned();
        let v = &amat * x;
        let norm = v.norm();
        if norm > 1e-10 {
            let v = v / Complex::new(norm, 0.0);
            // Gram-Schmidt against already accepted vectors.
            let mut w = v.clone();
            for u in &out {
                let proj = u.dotc(&w);
                w -= u * proj;
            }
            if w.norm() > 1e-8 {
                let wn = w.norm();
                out.push(w / Complex::new(wn, 0.0));
            }
        }
    }
    out
}

/// Full spectral analysis of a cone map.
pub fn spectral_data(map: &ConeMap) -> Result<SpectralData, CohomError> {
    let h = map.dim();
    let m_real = map.matrix();
    let scale = m_real.norm().max(1e-300);
    let eig = m_real.complex_eigenvalues();

    // Cluster the eigenvalues into distinct values.
    let tol_eig = 1e-7 * (1.0 + scale);
    let mut distinct: Vec<(Complex<f64>, usize)> = Vec::new();
    for lam in eig.iter() {
        match distinct
            .iter_mut()
            .find(|(mu, _)| (mu.clone() - lam).norm() <= tol_eig)
        {
            Some((mu, count)) => {
                // running mean keeps the cluster centered
                *mu = (mu.clone() * (*count as f64) + lam) / (*count as f64 + 1.0);
                *count += 1;
            }
            None => distinct.push((*lam, 1)),
        }
    }

    let mc = to_complex(m_real);
    let mut rank_margin = f64::INFINITY;
    // Per distinct eigenvalue: staircase ranks give block structure.
    // blocks[i] = list of block sizes (one entry per block).
    let mut summaries: Vec<(Complex<f64>, usize, Vec<usize>)> = Vec::new();
    for (lam, alg_mult) in &distinct {
        let shifted = &mc - &(CMat::identity(h, h) * Complex::from(1.0) * *lam);
        let mut ranks = vec![h];
        let mut power = CMat::identity(h, h);
        let mut sizes: Vec<usize> = Vec::new();
        for j in 1..=*alg_mult {
            power = &power * &shifted;
            let (r, margin) = rank_with_margin(&power, tol::TOL_RANK);
            rank_margin = rank_margin.min(margin);
            ranks.push(r);
            let nullity_growth = ranks[j - 1] - ranks[j];
            // number of blocks of size >= j
            if nullity_growth == 0 {
                break;
            }
            sizes.push(nullity_growth);
            if h - r >= *alg_mult {
                break;
            }
        }
        // sizes[j-1] = #blocks of size >= j; convert to per-size counts when
        // needed; the max block size is sizes.len().
        summaries.push((*lam, *alg_mult, sizes));
    }

    let lambda = distinct
        .iter()
        .map(|(l, _)| l.norm())
        .fold(0.0, f64::max);
    let mod_tol = 1e-7 * (1.0 + lambda);

    // m = max block size among eigenvalues of maximal modulus.
    let mut m_top = 0usize;
    for (lam, _, sizes) in &summaries {
        if (lam.norm() - lambda).abs() <= mod_tol {
            m_top = m_top.max(sizes.len());
        }
    }
    if lambda == 0.0 {
        // Entirely nilpotent: spectral radius 0, F = {0}.
        return Ok(SpectralData {
            lambda: 0.0,
            m: m_top.max(1),
            f_basis: vec![],
            h_basis: vec![],
            theta: vec![],
            eigen_summary: summaries
                .iter()
                .map(|(l, a, s)| (*l, *a, s.len()))
                .collect(),
            rank_margin,
        });
    }

    // Dominant blocks: size m with |eigenvalue| = lambda. Their eigenlines
    // span F^C; restricting to eigenvalue ~ lambda (theta = 0) gives H^C.
    let mut f_basis: Vec<DVector<f64>> = Vec::new();
    let mut h_basis: Vec<DVector<f64>> = Vec::new();
    let mut theta: Vec<f64> = Vec::new();
    for (lam, _, sizes) in &summaries {
        if (lam.norm() - lambda).abs() > mod_tol || sizes.len() != m_top {
            continue;
        }
        // count of size-m blocks: #(>= m) (m is maximal, so >= m means = m)
        let n_blocks = *sizes.last().unwrap();
        let mut th = lam.arg() / (2.0 * std::f64::consts::PI);
        if th < 0.0 {
            th += 1.0;
        }
        for _ in 0..n_blocks {
            theta.push(th);
        }
        // Only keep one of each conjugate pair for the real basis.
        if lam.im < -mod_tol {
            continue;
        }
        let shifted = &mc - &(CMat::identity(h, h) * Complex::from(1.0) * *lam);
        let kernel = null_space(&shifted, tol::TOL_RANK);
        let lines = if m_top == 1 {
            kernel
        } else {
            let mut power = CMat::identity(h, h);
            for _ in 0..m_top - 1 {
                power = &power * &shifted;
            }
            let range = col_space(&power, tol::TOL_RANK);
            intersect(&kernel, &range)
        };
        let real_line = lam.im.abs() <= mod_tol;
        for v in lines {
            if real_line {
                // Rotate the complex phase away and take the real part.
                let phase = v
                    .iter()
                    .cloned()
                    .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                    .unwrap_or(Complex::new(1.0, 0.0));
                let u = v.map(|c| (c * phase.conj() / phase.norm()).re);
                let n = u.norm();
                if n > 1e-10 {
                    let u = u / n;
                    f_basis.push(u.clone());
                    if lam.re > 0.0 {
                        h_basis.push(u);
                    }
                }
            } else {
                let re = v.map(|c| c.re);
                let im = v.map(|c| c.im);
                for u in [re, im] {
                    let n = u.norm();
                    if n > 1e-10 {
                        f_basis.push(u / n);
                    }
                }
            }
        }
    }

    if rank_margin < 2.0 {
        return Err(CohomError::IllConditioned { gap: rank_margin });
    }

    // Order the summary: by modulus descending, nilpotent blocks last.
    let mut eigen_summary: Vec<(Complex<f64>, usize, usize)> = summaries
        .iter()
        .map(|(l, a, s)| (*l, *a, s.len()))
        .collect();
    eigen_summary.sort_by(|a, b| {
        b.0.norm()
            .total_cmp(&a.0.norm())
            .then(b.2.cmp(&a.2))
    });

    Ok(SpectralData {
        lambda,
        m: m_top,
        f_basis,
        h_basis,
        theta,
        eigen_summary,
        rank_margin,
    })
}

/// Normalized power operator n^{1-m} lambda^{-n} M^n, computed by repeated
/// squaring of M / lambda so no intermediate overflows.
pub fn lambda_n(map: &ConeMap, data: &SpectralData, n: u64) -> Result<DMatrix<f64>, CohomError> {
    if data.lambda == 0.0 {
        return Err(CohomError::NilpotentMap);
    }
    if n == 0 {
        return Err(CohomError::Precondition("n must be >= 1".into()));
    }
    let h = map.dim();
    let base = map.matrix() / data.lambda;
    let mut acc = DMatrix::<f64>::identity(h, h);
    let mut sq = base;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &sq;
        }
        sq = &sq * &sq;
        e >>= 1;
    }
    let factor = (n as f64).powi(1 - data.m as i32);
    Ok(acc * factor)
}

/// Convergence report for the normalized powers along a subsequence,
/// against the torus motion of the dominant direction.
#[derive(Clone, Debug)]
pub struct SubsequenceReport {
    /// Successive gaps ||L_{n_{i+1}} - L_{n_i}|| along the subsequence.
    pub gaps: Vec<f64>,
    /// Successive torus distances of n_i theta.
    pub theta_gaps: Vec<f64>,
    /// Is the final gap within the requested tolerance?
    pub lambda_cauchy: bool,
    pub theta_cauchy: bool,
    /// Numeric rank of the last iterate.
    pub limit_rank: usize,
    pub dim_f: usize,
    /// Largest residual of projecting the limit's columns onto span(F).
    pub colspace_residual: f64,
}

/// Verify the surjectivity-onto-F picture along a subsequence: when the
/// normalized powers converge, the limit has rank = dim F and its column
/// space is span(F).
pub fn check_surjectivity_limit(
    map: &ConeMap,
    data: &SpectralData,
    subsequence: &[u64],
    tol_cauchy: f64,
) -> Result<SubsequenceReport, CohomError> {
    if subsequence.len() < 2 {
        return Err(CohomError::Precondition("need at least two indices".into()));
    }
    let mats: Vec<DMatrix<f64>> = subsequence
        .iter()
        .map(|&n| lambda_n(map, data, n))
        .collect::<Result<_, _>>()?;
    let gaps: Vec<f64> = mats.windows(2).map(|w| (&w[1] - &w[0]).norm()).collect();
    let theta_gaps: Vec<f64> = subsequence
        .windows(2)
        .map(|w| {
            data.theta
                .iter()
                .map(|t| {
                    let a = torus_frac(*t * w[0] as f64);
                    let b = torus_frac(*t * w[1] as f64);
                    torus_dist(a, b)
                })
                .fold(0.0, f64::max)
        })
        .collect();
    let lambda_cauchy = gaps.last().map_or(true, |g| *g <= tol_cauchy);
    let theta_cauchy = theta_gaps
        .last()
        .map_or(true, |g| *g <= tol_cauchy);

    let limit = mats.last().unwrap();
    let climit = to_complex(limit);
    let (limit_rank, _) = rank_with_margin(&climit, tol::TOL_RANK);

    // Residual of the limit's columns against span(F).
    let colspace_residual = if data.f_basis.is_empty() {
        limit.norm()
    } else {
        let mut fb = DMatrix::<f64>::zeros(map.dim(), data.f_basis.len());
        for (j, v) in data.f_basis.iter().enumerate() {
            fb.set_column(j, v);
        }
        let qr = fb.qr();
        let q = qr.q();
        let proj = &q * (q.transpose() * limit);
        let denom = limit.norm().max(1e-300);
        (limit - proj).norm() / denom
    };

    Ok(SubsequenceReport {
        gaps,
        theta_gaps,
        lambda_cauchy,
        theta_cauchy,
        limit_rank,
        dim_f: data.dim_f(),
        colspace_residual,
    })
}

fn torus_frac(x: f64) -> f64 {
    x - x.floor()
}

fn torus_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).abs() % 1.0;
    d.min(1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> ConeMap {
        let h = rows.len();
        let m = DMatrix::from_fn(h, rows[0].len(), |i, j| rows[i][j]);
        ConeMap::new(m).unwrap()
    }

    #[test]
    fn jordan_block_two() {
        let m = mat(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let s = spectral_data(&m).unwrap();
        assert!((s.lambda - 2.0).abs() < 1e-10);
        assert_eq!(s.m, 2);
        assert_eq!(s.dim_f(), 1);
        assert_eq!(s.dim_h(), 1);
        // The eigenline of the block is e1.
        assert!((s.f_basis[0][0].abs() - 1.0).abs() < 1e-8);
        assert!(s.f_basis[0][1].abs() < 1e-8);
    }

    #[test]
    fn diagonal_with_nilpotent_block() {
        let m = mat(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 0.0]]);
        let s = spectral_data(&m).unwrap();
        assert!((s.lambda - 3.0).abs() < 1e-12);
        assert_eq!(s.m, 1);
        assert_eq!(s.dim_f(), 1);
        // zero eigenvalue ordered last in the summary
        assert!(s.eigen_summary.last().unwrap().0.norm() < 1e-9);
    }

    #[test]
    fn rotation_block_has_complex_pair() {
        let th = 2.0 * std::f64::consts::PI * 0.618_033_988_749_894_9;
        let m = mat(&[
            &[2.0 * th.cos(), -2.0 * th.sin(), 0.0],
            &[2.0 * th.sin(), 2.0 * th.cos(), 0.0],
            &[0.0, 0.0, 1.0],
        ]);
        let s = spectral_data(&m).unwrap();
        assert!((s.lambda - 2.0).abs() < 1e-10);
        assert_eq!(s.m, 1);
        assert_eq!(s.dim_f(), 2, "real form of one complex pair");
        assert_eq!(s.dim_h(), 0, "no eigenvalue equal to lambda itself");
        assert_eq!(s.theta.len(), 2);
    }

    #[test]
    fn lambda_n_jordan_binomial_oracle() {
        // n^{1-m} lambda^{-n} J^n = [[1/n, 1/lambda], [0, 1/n]] exactly.
        let m = mat(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let s = spectral_data(&m).unwrap();
        let l40 = lambda_n(&m, &s, 40).unwrap();
        let oracle = DMatrix::from_row_slice(2, 2, &[1.0 / 40.0, 0.5, 0.0, 1.0 / 40.0]);
        assert!((l40 - oracle).norm() < 1e-12);
    }

    #[test]
    fn lambda_n_diagonal() {
        let m = mat(&[&[3.0, 0.0], &[0.0, 2.0]]);
        let s = spectral_data(&m).unwrap();
        let l = lambda_n(&m, &s, 40).unwrap();
        assert!((l[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((l[(1, 1)] - (2.0f64 / 3.0).powi(40)).abs() < 1e-12);
    }

    #[test]
    fn surjectivity_limit_rank_matches_dim_f() {
        let m = mat(&[&[2.0, 1.0], &[0.0, 2.0]]);
        let s = spectral_data(&m).unwrap();
        let seq: Vec<u64> = (1..=8).map(|j| 10u64.pow(j)).collect();
        let rep = check_surjectivity_limit(&m, &s, &seq, 1e-6).unwrap();
        assert!(rep.lambda_cauchy);
        assert_eq!(rep.limit_rank, 1);
        assert_eq!(rep.dim_f, 1);
        assert!(rep.colspace_residual < 1e-6);
    }

    #[test]
    fn cone_check_accepts_positive_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let gens = vec![
            DVector::from_column_slice(&[1.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0]),
        ];
        assert!(ConeMap::new(m).unwrap().with_cone(gens).is_ok());
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, -2.0, 0.0, 1.0]);
        let gens = vec![
            DVector::from_column_slice(&[1.0, 0.0]),
            DVector::from_column_slice(&[0.0, 1.0]),
        ];
        assert!(matches!(
            ConeMap::new(neg).unwrap().with_cone(gens),
            Err(CohomError::ConeViolated)
        ));
    }
}
