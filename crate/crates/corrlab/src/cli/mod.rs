//! Experiment driver: parse a config (file plus flag overrides), dispatch
//! the subcommand, and persist reproducible run artifacts.
//!
//! Every run writes `runs/<name>/{config.json, results.jsonl, log.txt}`.
//! All randomness derives from the single recorded seed, and reductions are
//! deterministic, so re-running a config reproduces `results.jsonl` byte
//! for byte.

mod commands;
mod config;

pub use commands::{execute, CmdError, CommandOutput};
pub use config::{
    parse_complex, parse_rational, parse_xi_grid, ConfigError, FamilySpec, GraphSource, RunConfig,
};

use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_COMPUTE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "corrlab",
    about = "computational laboratory for holomorphic correspondences on the sphere",
    version
)]
pub struct Cli {
    /// Run name (directory under --runs-dir); defaults to
    /// <command>-<config fingerprint>.
    #[arg(long, global = true)]
    pub name: Option<String>,

    /// Directory collecting run artifacts.
    #[arg(long, global = true, default_value = "runs")]
    pub runs_dir: PathBuf,

    /// Bound the worker pool.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    /// Override the results.jsonl path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dynamical-degree profiles of the model actions.
    Degrees(DegreesArgs),
    /// Local and adjoint multiplicities with the exponent constants.
    Mult(MultArgs),
    /// Compose two correspondences with reduction logging.
    Compose(ComposeArgs),
    /// Backward-orbit sampling and pairing statistics.
    Equidist(EquidistArgs),
    /// Fiber-motion exponent fit at a base point.
    Loja(LojaArgs),
    /// Log-rate certificate on a regularity grid.
    CertifyRate(CerttArgs),
    /// Exact chain/cycle obstruction polynomials for the parameter family.
    CriticalOrbit(CritArgs),
    /// Symmetric-product semiconjugacy and degree bounds.
    Symprod(SymprodArgs),
    /// Jordan-derived spectral data and normalized powers.
    Jordan(JordanArgs),
}

#[derive(Args, Debug, Default)]
pub struct CommonConfig {
    /// JSON config file; explicit flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DegreesArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    /// projective | graph-sum | sym-product
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long)]
    pub s1: Option<u64>,
    #[arg(long)]
    pub s2: Option<u64>,
    #[arg(long)]
    pub d0: Option<u64>,
    #[arg(long)]
    pub d1: Option<u64>,
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct MultArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    /// graph polynomial JSON file
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// built-in family instance "d0,d1,c" (c rational, e.g. 2,3,7/5)
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
}

#[derive(Args, Debug)]
pub struct ComposeArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    #[arg(long)]
    pub f: Option<PathBuf>,
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// random base points for the bidegree branch-count oracle
    #[arg(long)]
    pub check_points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct EquidistArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    /// starting atom, e.g. 1.0+0i
    #[arg(long)]
    pub start: Option<String>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// also export the sampled measure as CSV (re, im, weight, chart)
    #[arg(long)]
    pub csv_out: Option<String>,
}

#[derive(Args, Debug)]
pub struct LojaArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub z0: Option<String>,
    #[arg(long)]
    pub radius0: Option<f64>,
    #[arg(long)]
    pub radius_factor: Option<f64>,
    #[arg(long)]
    pub radius_count: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CerttArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    #[arg(long)]
    pub dq: Option<f64>,
    #[arg(long)]
    pub dqm1: Option<f64>,
    #[arg(long)]
    pub rho: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    /// e.g. log:-4:-16:13 or a comma list
    #[arg(long)]
    pub xi_grid: Option<String>,
    #[arg(long)]
    pub delta: Option<usize>,
    #[arg(long)]
    pub r_plus: Option<f64>,
}

#[derive(Args, Debug)]
pub struct CritArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    #[arg(long)]
    pub d0: Option<usize>,
    #[arg(long)]
    pub d1: Option<usize>,
    /// exact rational parameter, e.g. 7/5
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long)]
    pub nmax: Option<usize>,
}

#[derive(Args, Debug)]
pub struct SymprodArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    /// base correspondence on the sphere
    #[arg(long = "h")]
    pub h_graph: Option<PathBuf>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct JordanArgs {
    #[command(flatten)]
    pub common: CommonConfig,
    /// JSON matrix file [[row], ...]
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<u64>,
    /// comma-separated subsequence for the convergence report
    #[arg(long)]
    pub subsequence: Option<String>,
}

fn load_base(common: &CommonConfig) -> Result<serde_json::Value, ConfigError> {
    match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(serde_json::from_str(&text)?)
        }
        None => Ok(serde_json::json!({})),
    }
}

fn set_if<T: serde::Serialize>(v: &mut serde_json::Value, key: &str, val: &Option<T>) {
    if let Some(x) = val {
        v[key] = serde_json::to_value(x).expect("flag serializes");
    }
}

fn parse_family_flag(
    v: &mut serde_json::Value,
    family: &Option<String>,
) -> Result<(), ConfigError> {
    if let Some(f) = family {
        let parts: Vec<&str> = f.split(',').collect();
        if parts.len() != 3 {
            return Err(config::invalid("family", "expected d0,d1,c"));
        }
        let d0: usize = parts[0]
            .trim()
            .parse()
            .map_err(|e: std::num::ParseIntError| config::invalid("family.d0", e.to_string()))?;
        let d1: usize = parts[1]
            .trim()
            .parse()
            .map_err(|e: std::num::ParseIntError| config::invalid("family.d1", e.to_string()))?;
        v["family"] = serde_json::json!({"d0": d0, "d1": d1, "c": parts[2].trim()});
        if let Some(obj) = v.as_object_mut() {
            obj.remove("graph");
        }
    }
    Ok(())
}

/// Merge file config and flags into the resolved run config.
pub fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let mut v = match &cli.command {
        Command::Degrees(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "degrees".into();
            set_if(&mut v, "model", &a.model);
            set_if(&mut v, "s", &a.s);
            set_if(&mut v, "s1", &a.s1);
            set_if(&mut v, "s2", &a.s2);
            set_if(&mut v, "d0", &a.d0);
            set_if(&mut v, "d1", &a.d1);
            set_if(&mut v, "k", &a.k);
            v
        }
        Command::Mult(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "mult".into();
            set_if(&mut v, "graph", &a.graph.as_ref().map(|p| p.display().to_string()));
            parse_family_flag(&mut v, &a.family)?;
            set_if(&mut v, "k", &a.k);
            set_if(&mut v, "q", &a.q);
            v
        }
        Command::Compose(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "compose".into();
            set_if(&mut v, "f", &a.f.as_ref().map(|p| p.display().to_string()));
            set_if(&mut v, "g", &a.g.as_ref().map(|p| p.display().to_string()));
            set_if(&mut v, "check_points", &a.check_points);
            set_if(&mut v, "seed", &a.seed.or(Some(0)));
            v
        }
        Command::Equidist(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "equidist".into();
            set_if(&mut v, "graph", &a.graph.as_ref().map(|p| p.display().to_string()));
            parse_family_flag(&mut v, &a.family)?;
            set_if(&mut v, "start", &a.start);
            set_if(&mut v, "depth", &a.depth);
            set_if(&mut v, "paths", &a.paths);
            set_if(&mut v, "seed", &a.seed);
            set_if(&mut v, "csv_out", &a.csv_out);
            v
        }
        Command::Loja(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "loja".into();
            set_if(&mut v, "graph", &a.graph.as_ref().map(|p| p.display().to_string()));
            parse_family_flag(&mut v, &a.family)?;
            set_if(&mut v, "z0", &a.z0);
            set_if(&mut v, "radius0", &a.radius0);
            set_if(&mut v, "radius_factor", &a.radius_factor);
            set_if(&mut v, "radius_count", &a.radius_count);
            v
        }
        Command::CertifyRate(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "certify-rate".into();
            set_if(&mut v, "dq", &a.dq);
            set_if(&mut v, "dqm1", &a.dqm1);
            set_if(&mut v, "rho", &a.rho);
            set_if(&mut v, "k", &a.k);
            set_if(&mut v, "q", &a.q);
            set_if(&mut v, "xi_grid", &a.xi_grid);
            set_if(&mut v, "delta", &a.delta);
            set_if(&mut v, "r_plus", &a.r_plus);
            v
        }
        Command::CriticalOrbit(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "critical-orbit".into();
            set_if(&mut v, "d0", &a.d0);
            set_if(&mut v, "d1", &a.d1);
            set_if(&mut v, "c", &a.c);
            set_if(&mut v, "nmax", &a.nmax);
            v
        }
        Command::Symprod(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "symprod".into();
            set_if(&mut v, "graph", &a.h_graph.as_ref().map(|p| p.display().to_string()));
            parse_family_flag(&mut v, &a.family)?;
            set_if(&mut v, "k", &a.k);
            set_if(&mut v, "samples", &a.samples);
            set_if(&mut v, "seed", &a.seed.or(Some(0)));
            v
        }
        Command::Jordan(a) => {
            let mut v = load_base(&a.common)?;
            v["command"] = "jordan".into();
            set_if(&mut v, "matrix", &a.matrix.as_ref().map(|p| p.display().to_string()));
            set_if(&mut v, "n", &a.n);
            if let Some(s) = &a.subsequence {
                let seq: Result<Vec<u64>, _> = s.split(',').map(|p| p.trim().parse()).collect();
                let seq = seq
                    .map_err(|e: std::num::ParseIntError| config::invalid("subsequence", e.to_string()))?;
                v["subsequence"] = serde_json::json!(seq);
            }
            v
        }
    };
    // defaults shared by graph-based commands
    if v.get("seed").is_none() {
        if let Some(obj) = v.as_object_mut() {
            if matches!(
                obj.get("command").and_then(|c| c.as_str()),
                Some("equidist") | Some("symprod") | Some("compose")
            ) {
                obj.insert("seed".into(), 0u64.into());
            }
        }
    }
    serde_json::from_value(v).map_err(|e| config::invalid("<config>", e.to_string()))
}

/// Execute a resolved config inside a run directory, writing the three
/// artifact files. Returns the directory used.
pub fn run(
    cfg: &RunConfig,
    runs_dir: &Path,
    name: Option<&str>,
    out_override: Option<&Path>,
) -> Result<PathBuf, CmdError> {
    let name = name
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("{}-{}", cfg.command_name(), cfg.fingerprint()));
    let dir = runs_dir.join(name);
    std::fs::create_dir_all(&dir).map_err(ConfigError::from)?;

    let config_text =
        serde_json::to_string_pretty(cfg).map_err(ConfigError::from)? + "\n";
    std::fs::write(dir.join("config.json"), config_text).map_err(ConfigError::from)?;

    let output = execute(cfg)?;

    let mut results = String::new();
    for row in &output.rows {
        results.push_str(&serde_json::to_string(row).map_err(ConfigError::from)?);
        results.push('\n');
    }
    let results_path = out_override
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| dir.join("results.jsonl"));
    if let Some(parent) = results_path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(ConfigError::from)?;
        }
    }
    std::fs::write(&results_path, results).map_err(ConfigError::from)?;

    let mut log = String::new();
    log.push_str(&format!("command: {}\n", cfg.command_name()));
    for line in &output.log {
        log.push_str(line);
        log.push('\n');
    }
    std::fs::write(dir.join("log.txt"), log).map_err(ConfigError::from)?;

    for (fname, contents) in &output.files {
        let path = Path::new(fname);
        let target = if path.is_absolute() {
            path.to_path_buf()
        } else {
            dir.join(path)
        };
        if let Some(parent) = target.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(ConfigError::from)?;
            }
        }
        std::fs::write(target, contents).map_err(ConfigError::from)?;
    }
    Ok(dir)
}

/// Full CLI entry point returning the process exit code.
pub fn main_entry() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap handles --help/--version with success codes
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match std::env::var("CORRLAB_PRECISION") {
        Ok(v) if v == "extended" => crate::tol::set_precision(crate::tol::Precision::Extended),
        Ok(v) if v == "double" => crate::tol::set_precision(crate::tol::Precision::Double),
        Ok(v) => {
            eprintln!("error: CORRLAB_PRECISION must be 'double' or 'extended', got '{v}'");
            return EXIT_CONFIG;
        }
        Err(_) => {}
    }
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    match run(&cfg, &cli.runs_dir, cli.name.as_deref(), cli.out.as_deref()) {
        Ok(dir) => {
            println!("run artifacts in {}", dir.display());
            EXIT_OK
        }
        Err(CmdError::Config(e)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(CmdError::Compute(e)) => {
            eprintln!("error: {e}");
            EXIT_COMPUTE
        }
    }
}
