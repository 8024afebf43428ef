//! Run configuration: a JSON document naming the command, the seed, and
//! per-command parameters. CLI flags override file values; the resolved
//! config is written next to the results so a run can be replayed exactly.

use crate::corr1::{Corr1, CorrError};
use crate::polyalg::{q_from_f64, C64, CQ, Q};
use num::bigint::BigInt;
use num::rational::BigRational;
use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::str::FromStr;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config error at {path}: {message}")]
    Invalid { path: String, message: String },
    #[error("config I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
}

pub fn invalid(path: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

/// Parse "re", "re+imi", "re-imi", "i", "-i", "2i".
pub fn parse_complex(s: &str) -> Result<C64, String> {
    let t = s.trim().replace(' ', "");
    if t.is_empty() {
        return Err("empty complex literal".into());
    }
    if !t.contains('i') {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|e| e.to_string());
    }
    let t = t.strip_suffix('i').ok_or("i must be the final character")?;
    // split into real and imaginary parts at the last +/- that is not an
    // exponent sign and not the leading sign
    let bytes = t.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }
    match split {
        None => {
            // pure imaginary: "i", "-i", "2.5i"
            let im = match t {
                "" => 1.0,
                "-" => -1.0,
                "+" => 1.0,
                other => other.parse::<f64>().map_err(|e| e.to_string())?,
            };
            Ok(C64::new(0.0, im))
        }
        Some(idx) => {
            let re: f64 = t[..idx].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            let imtxt = &t[idx..];
            let im = match imtxt {
                "+" => 1.0,
                "-" => -1.0,
                other => other.parse::<f64>().map_err(|e| e.to_string())?,
            };
            Ok(C64::new(re, im))
        }
    }
}

/// Parse an exact rational "p/q" or integer or decimal float (converted
/// exactly).
pub fn parse_rational(s: &str) -> Result<Q, String> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num = BigInt::from_str(n.trim()).map_err(|e| e.to_string())?;
        let den = BigInt::from_str(d.trim()).map_err(|e| e.to_string())?;
        if den.is_zero() {
            return Err("zero denominator".into());
        }
        return Ok(BigRational::new(num, den));
    }
    if let Ok(i) = BigInt::from_str(t) {
        return Ok(BigRational::from_integer(i));
    }
    t.parse::<f64>()
        .map(q_from_f64)
        .map_err(|e| e.to_string())
}

/// Parse "log:-4:-16:13" into a log-spaced grid of 13 points from 1e-4 to
/// 1e-16, or a comma-separated list of floats.
pub fn parse_xi_grid(s: &str) -> Result<Vec<f64>, String> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err("expected log:<e0>:<e1>:<count>".into());
        }
        let e0: f64 = parts[0].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        let e1: f64 = parts[1].parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
        let count: usize = parts[2].parse().map_err(|e: std::num::ParseIntError| e.to_string())?;
        if count < 2 {
            return Err("need at least 2 grid points".into());
        }
        return Ok((0..count)
            .map(|i| {
                let e = e0 + (e1 - e0) * (i as f64) / (count as f64 - 1.0);
                10f64.powf(e)
            })
            .collect());
    }
    t.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

/// Graph source: a JSON file or the built-in parameter family.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum GraphSource {
    File { graph: String },
    Family { family: FamilySpec },
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FamilySpec {
    pub d0: usize,
    pub d1: usize,
    /// exact rational parameter, e.g. "7/5" or "0.5"
    pub c: String,
}

impl GraphSource {
    pub fn load(&self) -> Result<Corr1, ConfigError> {
        match self {
            GraphSource::File { graph } => {
                let text = std::fs::read_to_string(graph)?;
                let v: serde_json::Value = serde_json::from_str(&text)?;
                Corr1::from_json(&v).map_err(corr_to_config("graph"))
            }
            GraphSource::Family { family } => {
                let c = parse_rational(&family.c)
                    .map_err(|e| invalid("family.c", e))?;
                let cq: CQ = Complex::new(c, Q::zero());
                Corr1::family(family.d0, family.d1, cq).map_err(corr_to_config("family"))
            }
        }
    }
}

fn corr_to_config(path: &'static str) -> impl Fn(CorrError) -> ConfigError {
    move |e| invalid(path, e.to_string())
}

/// The resolved run configuration, one variant per subcommand.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunConfig {
    Degrees {
        model: String,
        #[serde(default)]
        s: Option<u64>,
        #[serde(default)]
        s1: Option<u64>,
        #[serde(default)]
        s2: Option<u64>,
        #[serde(default)]
        d0: Option<u64>,
        #[serde(default)]
        d1: Option<u64>,
        k: usize,
    },
    Mult {
        #[serde(flatten)]
        source: GraphSource,
        k: usize,
        q: usize,
    },
    Compose {
        f: String,
        g: String,
        #[serde(default)]
        check_points: usize,
        seed: u64,
    },
    Equidist {
        #[serde(flatten)]
        source: GraphSource,
        start: String,
        depth: usize,
        paths: usize,
        seed: u64,
        #[serde(default)]
        csv_out: Option<String>,
    },
    Loja {
        #[serde(flatten)]
        source: GraphSource,
        z0: String,
        #[serde(default = "default_radius0")]
        radius0: f64,
        #[serde(default = "default_radius_factor")]
        radius_factor: f64,
        #[serde(default = "default_radius_count")]
        radius_count: usize,
    },
    CertifyRate {
        dq: f64,
        dqm1: f64,
        rho: usize,
        k: usize,
        q: usize,
        xi_grid: String,
        #[serde(default)]
        delta: Option<usize>,
        #[serde(default)]
        r_plus: f64,
    },
    CriticalOrbit {
        d0: usize,
        d1: usize,
        c: String,
        nmax: usize,
    },
    Symprod {
        #[serde(flatten)]
        source: GraphSource,
        k: usize,
        samples: usize,
        seed: u64,
    },
    Jordan {
        /// path to a JSON matrix [[...], ...]
        matrix: String,
        #[serde(default = "default_power")]
        n: u64,
        #[serde(default)]
        subsequence: Vec<u64>,
    },
}

fn default_radius0() -> f64 {
    1e-2
}
fn default_radius_factor() -> f64 {
    0.5
}
fn default_radius_count() -> usize {
    14
}
fn default_power() -> u64 {
    40
}

impl RunConfig {
    pub fn command_name(&self) -> &'static str {
        match self {
            RunConfig::Degrees { .. } => "degrees",
            RunConfig::Mult { .. } => "mult",
            RunConfig::Compose { .. } => "compose",
            RunConfig::Equidist { .. } => "equidist",
            RunConfig::Loja { .. } => "loja",
            RunConfig::CertifyRate { .. } => "certify-rate",
            RunConfig::CriticalOrbit { .. } => "critical-orbit",
            RunConfig::Symprod { .. } => "symprod",
            RunConfig::Jordan { .. } => "jordan",
        }
    }

    /// Stable fingerprint of the resolved parameters, for default run names.
    pub fn fingerprint(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf29ce484222325;
        for b in canon.as_bytes() {
            h ^= *b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")[..8].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1.0+0i").unwrap(), C64::new(1.0, 0.0));
        assert_eq!(parse_complex("-0.5-0.25i").unwrap(), C64::new(-0.5, -0.25));
        assert_eq!(parse_complex("2i").unwrap(), C64::new(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert_eq!(parse_complex("1e-3+2e-4i").unwrap(), C64::new(1e-3, 2e-4));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("7/5").unwrap(), BigRational::new(7.into(), 5.into()));
        assert_eq!(parse_rational("-3").unwrap(), BigRational::from_integer((-3).into()));
        assert!(parse_rational("1/0").is_err());
        // floats convert exactly
        assert_eq!(parse_rational("0.5").unwrap(), BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn xi_grid_forms() {
        let g = parse_xi_grid("log:-4:-16:13").unwrap();
        assert_eq!(g.len(), 13);
        assert!((g[0] - 1e-4).abs() < 1e-18);
        assert!((g[12] - 1e-16).abs() < 1e-28);
        let l = parse_xi_grid("0.1,0.01").unwrap();
        assert_eq!(l, vec![0.1, 0.01]);
    }

    #[test]
    fn config_roundtrip_and_fingerprint_stability() {
        let cfg = RunConfig::Degrees {
            model: "graph-sum".into(),
            s: None,
            s1: Some(2),
            s2: Some(2),
            d0: None,
            d1: None,
            k: 3,
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(cfg.fingerprint(), back.fingerprint());
    }
}
