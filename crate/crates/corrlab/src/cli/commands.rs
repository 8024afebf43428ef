//! Per-command execution: each command resolves to a stream of JSON rows
//! plus log lines (and optional side files such as CSV measures).

use super::config::{
    invalid, parse_complex, parse_rational, parse_xi_grid, ConfigError, RunConfig,
};
use crate::cohomlin::{
    self, check_surjectivity_limit, lambda_n, spectral_data, ConeMap, DegreeProfile,
};
use crate::corr1::{Corr1, P1Point};
use crate::green::{backward_orbit_sample, dictionary, equidist_rate};
use crate::mult;
use crate::polyalg::{q_to_f64, C64, CQ, Q};
use crate::regcal;
use crate::symprod;
use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CmdError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("computation failed: {0}")]
    Compute(String),
}

/// Map any module error into the computational-failure exit class.
pub fn compute_err(e: impl std::fmt::Display) -> CmdError {
    CmdError::Compute(e.to_string())
}

#[derive(Default)]
pub struct CommandOutput {
    pub rows: Vec<Value>,
    pub log: Vec<String>,
    /// extra artifacts: (relative file name, contents)
    pub files: Vec<(String, String)>,
}

pub fn execute(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    match cfg {
        RunConfig::Degrees { .. } => run_degrees(cfg),
        RunConfig::Mult { .. } => run_mult(cfg),
        RunConfig::Compose { .. } => run_compose(cfg),
        RunConfig::Equidist { .. } => run_equidist(cfg),
        RunConfig::Loja { .. } => run_loja(cfg),
        RunConfig::CertifyRate { .. } => run_certify(cfg),
        RunConfig::CriticalOrbit { .. } => run_critical_orbit(cfg),
        RunConfig::Symprod { .. } => run_symprod(cfg),
        RunConfig::Jordan { .. } => run_jordan(cfg),
    }
}

fn profile_json(p: &DegreeProfile) -> Value {
    json!({
        "degrees": p.degrees.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "degrees_f64": p.as_f64(),
    })
}

fn run_degrees(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Degrees { model, s, s1, s2, d0, d1, k } = cfg else { unreachable!() };
    let need = |v: &Option<u64>, name: &str| {
        v.map(|x| x as u128)
            .ok_or_else(|| CmdError::Config(invalid(name, format!("{model} model needs --{name}"))))
    };
    let profile = match model.as_str() {
        "projective" => cohomlin::degrees_projective(need(s, "s")?, *k),
        "graph-sum" => cohomlin::degrees_graph_sum(need(s1, "s1")?, need(s2, "s2")?, *k),
        "sym-product" => cohomlin::degrees_sym_product(need(d0, "d0")?, need(d1, "d1")?, *k),
        other => {
            return Err(CmdError::Config(invalid(
                "model",
                format!("unknown model '{other}' (projective | graph-sum | sym-product)"),
            )))
        }
    };
    let mono = cohomlin::monotonicity_check(&profile);
    let kunneth = cohomlin::kunneth_bound(&profile);
    let mut out = CommandOutput::default();
    out.rows.push(json!({
        "model": model,
        "k": k,
        "profile": profile_json(&profile),
        "monotonicity": mono,
        "kunneth_bounds": kunneth,
    }));
    out.log.push(format!(
        "degrees {:?} monotone: {}",
        profile.degrees, mono.holds
    ));
    Ok(out)
}

fn run_mult(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Mult { source, k, q } = cfg else { unreachable!() };
    let f = source.load()?;
    let report = mult::report(&f, *k, *q).map_err(compute_err)?;
    let mut out = CommandOutput::default();
    out.rows.push(json!({
        "d0": f.d0(),
        "d1": f.d1(),
        "rho": report.rho,
        "delta": report.delta,
        "kappa": rational_str(&report.kappa),
        "kappa_f64": q_to_f64(&report.kappa),
        "kappa_tilde": rational_str(&report.kappa_tilde),
        "kappa_tilde_f64": q_to_f64(&report.kappa_tilde),
        "witnesses": report.witnesses.iter().map(|(b, p, m)| json!({
            "base": point_json(b),
            "fiber_point": point_json(p),
            "multiplicity": m,
        })).collect::<Vec<_>>(),
    }));
    out.log.push(format!(
        "rho = {}, delta = {}, kappa = {}",
        report.rho,
        report.delta,
        rational_str(&report.kappa)
    ));
    Ok(out)
}

fn rational_str(q: &Q) -> String {
    format!("{q}")
}

fn point_json(p: &P1Point) -> Value {
    let c = p.chart_coord();
    json!({"re": c.re, "im": c.im, "chart": p.chart_index()})
}

fn run_compose(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Compose { f, g, check_points, seed } = cfg else { unreachable!() };
    let load = |path: &str| -> Result<Corr1, CmdError> {
        let text = std::fs::read_to_string(path).map_err(ConfigError::from)?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(ConfigError::from)?;
        Corr1::from_json(&v).map_err(|e| CmdError::Config(invalid("graph", e.to_string())))
    };
    let fc = load(f)?;
    let gc = load(g)?;
    let (h, logrec) = Corr1::compose(&fc, &gc).map_err(compute_err)?;
    let mut out = CommandOutput::default();

    // independent bidegree oracle: branch counting at random base points
    let mut verified = 0usize;
    if *check_points > 0 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
        for _ in 0..*check_points {
            let z = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let n = h
                .forward(P1Point::finite(z))
                .map_err(compute_err)?
                .total_multiplicity();
            if n == h.d0() {
                verified += 1;
            }
        }
    }
    out.rows.push(json!({
        "d0": h.d0(),
        "d1": h.d1(),
        "expected_before_reduction": [fc.d0() * gc.d0(), fc.d1() * gc.d1()],
        "raw_bidegree": [logrec.raw_bidegree.0, logrec.raw_bidegree.1],
        "removed_repeated_factor_degrees": logrec.removed.as_ref().map(|(_, dz, dw)| json!([dz, dw])),
        "removed_content_z_degree": logrec.removed_content_z.as_ref().map(|p| p.degree()),
        "removed_content_w_degree": logrec.removed_content_w.as_ref().map(|p| p.degree()),
        "branch_checks_passed": verified,
        "graph": h.to_json(),
    }));
    out.log.push(format!(
        "composed bidegree ({}, {}), raw ({}, {})",
        h.d0(),
        h.d1(),
        logrec.raw_bidegree.0,
        logrec.raw_bidegree.1
    ));
    Ok(out)
}

fn run_equidist(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Equidist { source, start, depth, paths, seed, csv_out } = cfg else {
        unreachable!()
    };
    let f = source.load()?;
    let a = parse_complex(start)
        .map_err(|e| CmdError::Config(invalid("start", e)))?;
    let a = P1Point::finite(a);
    let sample = backward_orbit_sample(&f, a, *depth, *paths, *seed).map_err(compute_err)?;
    let dict = dictionary();
    let mut out = CommandOutput::default();
    let pairings: Vec<Value> = dict
        .iter()
        .map(|phi| {
            json!({
                "test_function": phi.name,
                "value": sample.measure.pair(phi),
            })
        })
        .collect();
    out.rows.push(json!({
        "depth": depth,
        "paths": paths,
        "seed": seed,
        "total_mass": sample.measure.total_mass(),
        "resampled_paths": sample.stats.resampled_paths,
        "perturbed_steps": sample.stats.perturbed_steps,
        "pairings": pairings,
    }));
    // rate fit against the first dictionary function over all depths
    match equidist_rate(&f, a, &dict[0], *depth, 1 << 14, (*paths).min(20_000), *seed, None) {
        Ok(fit) => {
            out.rows.push(json!({
                "rate_fit": {
                    "lambda": fit.lambda,
                    "constant": fit.constant,
                    "r2": fit.r2,
                    "fitted_depths": fit.fitted_range,
                    "pairings_by_depth": fit.pairs,
                }
            }));
        }
        Err(e) => out.log.push(format!("rate fit skipped: {e}")),
    }
    if let Some(path) = csv_out {
        out.files.push((path.clone(), sample.measure.to_csv()));
    }
    out.log.push(format!(
        "sampled {} paths at depth {} (mass {:.12})",
        paths,
        depth,
        sample.measure.total_mass()
    ));
    Ok(out)
}

fn run_loja(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Loja { source, z0, radius0, radius_factor, radius_count } = cfg else {
        unreachable!()
    };
    let f = source.load()?;
    let z0 = parse_complex(z0).map_err(|e| CmdError::Config(invalid("z0", e)))?;
    let radii: Vec<f64> = (0..*radius_count)
        .map(|j| radius0 * radius_factor.powi(j as i32))
        .collect();
    let fit = mult::loja_exponent(&f, z0, &radii).map_err(compute_err)?;
    let mut out = CommandOutput::default();
    out.rows.push(json!({
        "z0": [z0.re, z0.im],
        "slope": fit.slope,
        "intercept": fit.intercept,
        "r2": fit.r2,
        "log_pairs": fit.pairs,
    }));
    out.log.push(format!("fitted exponent {:.6} (R^2 {:.4})", fit.slope, fit.r2));
    Ok(out)
}

fn run_certify(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::CertifyRate { dq, dqm1, rho, k, q, xi_grid, delta, r_plus } = cfg else {
        unreachable!()
    };
    let grid = parse_xi_grid(xi_grid).map_err(|e| CmdError::Config(invalid("xi_grid", e)))?;
    let kappa = q_to_f64(&mult::kappa(*k, *q, *rho));
    let cert = regcal::certify_log_rate(*dq, *dqm1, kappa, &grid, None).map_err(compute_err)?;
    // the adjoint-multiplicity default mirrors rho unless given
    let delta_mult = delta.unwrap_or(*rho);
    let kappa_tilde = q_to_f64(&mult::kappa_tilde(*k, *q, delta_mult));
    let lambda = regcal::rate_lambda(*dq, *dqm1, kappa_tilde, *r_plus, 0.01);
    let mut out = CommandOutput::default();
    out.rows.push(json!({
        "kappa": kappa,
        "kappa_tilde": kappa_tilde,
        "delta_choice": cert.delta_choice,
        "D": cert.big_d,
        "r": cert.r,
        "r_max": cert.r_max,
        "c5": cert.c5,
        "all_pass": cert.all_pass,
        "grid": cert.rows,
        "lambda": match &lambda {
            Ok(l) => json!({"feasible": true, "base": l.base, "lambda0": l.lambda0, "lambda1": l.lambda1}),
            Err(e) => json!({"feasible": false, "reason": e.to_string()}),
        },
    }));
    if !cert.all_pass {
        return Err(CmdError::Compute(
            "certificate violated on the supplied grid".into(),
        ));
    }
    out.log.push(format!(
        "certificate passed on {} grid points (r = {:.6}, C5 = {:.6})",
        grid.len(),
        cert.r,
        cert.c5
    ));
    Ok(out)
}

fn run_critical_orbit(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::CriticalOrbit { d0, d1, c, nmax } = cfg else { unreachable!() };
    let cq_val: CQ = Complex::new(
        parse_rational(c).map_err(|e| CmdError::Config(invalid("c", e)))?,
        Q::zero(),
    );
    let verdict =
        crate::algres::periodicity_obstruction_test(*d0, *d1, &cq_val, *nmax).map_err(compute_err)?;
    let mut out = CommandOutput::default();
    out.rows.push(json!({
        "d0": d0, "d1": d1, "c": c, "nmax": nmax,
        "no_chain_up_to_nmax": verdict.no_chain_up_to_nmax,
        "rows": verdict.rows,
    }));
    out.log.push(format!(
        "critical-orbit verdict: no chain up to n = {}: {}",
        nmax, verdict.no_chain_up_to_nmax
    ));
    Ok(out)
}

fn run_symprod(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Symprod { source, k, samples, seed } = cfg else { unreachable!() };
    let h = source.load()?;
    let rep = symprod::semiconjugacy_check(&h, *k, *samples, *seed).map_err(compute_err)?;
    let degrees = symprod::induced_degrees(h.d0() as u128, h.d1() as u128, *k);
    let delta_h = mult::adjoint_multiplicity(&h).map_err(compute_err)?;
    let delta_hat = symprod::delta_hat_of_product(delta_h, *k);
    let mut out = CommandOutput::default();
    out.rows.push(json!({
        "k": k,
        "bidegree": [h.d0(), h.d1()],
        "induced_degrees": profile_json(&degrees),
        "semiconjugacy": {"samples": rep.samples, "max_residual": rep.max_residual},
        "delta_h": delta_h,
        "delta_hat_product": delta_hat,
        "delta_bound": symprod::delta_product_bound(delta_hat, *k),
    }));
    out.log.push(format!(
        "semiconjugacy residual {:.3e} over {} samples",
        rep.max_residual, rep.samples
    ));
    Ok(out)
}

fn run_jordan(cfg: &RunConfig) -> Result<CommandOutput, CmdError> {
    let RunConfig::Jordan { matrix, n, subsequence } = cfg else { unreachable!() };
    let text = std::fs::read_to_string(matrix).map_err(ConfigError::from)?;
    let rows: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(ConfigError::from)?;
    let h = rows.len();
    if h == 0 || rows.iter().any(|r| r.len() != h) {
        return Err(CmdError::Config(invalid("matrix", "must be square and nonempty")));
    }
    let m = DMatrix::from_fn(h, h, |i, j| rows[i][j]);
    let map = ConeMap::new(m).map_err(compute_err)?;
    let data = spectral_data(&map).map_err(compute_err)?;
    let mut out = CommandOutput::default();
    let lam_n = lambda_n(&map, &data, *n).map_err(compute_err)?;
    out.rows.push(json!({
        "lambda": data.lambda,
        "m": data.m,
        "dim_f": data.dim_f(),
        "dim_h": data.dim_h(),
        "theta": data.theta,
        "rank_margin": data.rank_margin,
        "eigen_summary": data.eigen_summary.iter().map(|(l, a, s)| json!({
            "eigenvalue": [l.re, l.im], "algebraic_multiplicity": a, "max_block": s,
        })).collect::<Vec<_>>(),
        "normalized_power_n": n,
        "normalized_power": matrix_json(&lam_n),
    }));
    if subsequence.len() >= 2 {
        let rep = check_surjectivity_limit(&map, &data, subsequence, 1e-6).map_err(compute_err)?;
        out.rows.push(json!({
            "subsequence": subsequence,
            "gaps": rep.gaps,
            "theta_gaps": rep.theta_gaps,
            "lambda_cauchy": rep.lambda_cauchy,
            "theta_cauchy": rep.theta_cauchy,
            "limit_rank": rep.limit_rank,
            "dim_f": rep.dim_f,
            "colspace_residual": rep.colspace_residual,
        }));
    }
    out.log.push(format!(
        "lambda = {:.6}, m = {}, dim F = {}",
        data.lambda,
        data.m,
        data.dim_f()
    ));
    Ok(out)
}

fn matrix_json(m: &DMatrix<f64>) -> Value {
    json!((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}
