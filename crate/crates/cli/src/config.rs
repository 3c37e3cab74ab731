//! Run configuration: a key=value file plus `--set key=value` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use nullflow::lame::LameConfig;
use nullflow::nullcurve::{LienConfig, MuStarConfig, OrbitConfig};
use nullflow::ode::OdeConfig;
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "ADS_NULL_FLOWS_OUT";

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub integrator_rel_tol: f64,
    pub integrator_abs_tol: f64,
    /// Largest h scanned by the Floquet search.
    pub scan_ceiling: f64,
    pub eigen_tol: f64,
    pub rational_cap: i64,
    pub rational_tol: f64,
    pub mu_star_tol: f64,
    /// Samples per period of the bending.
    pub points_per_period: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            integrator_rel_tol: 1e-12,
            integrator_abs_tol: 1e-12,
            scan_ceiling: 500.0,
            eigen_tol: 1e-10,
            rational_cap: 64,
            rational_tol: 1e-6,
            mu_star_tol: 1e-10,
            points_per_period: 400,
            out_dir: PathBuf::from("out"),
        }
    }
}

const KEYS: [&str; 9] = [
    "integrator_rel_tol",
    "integrator_abs_tol",
    "scan_ceiling",
    "eigen_tol",
    "rational_cap",
    "rational_tol",
    "mu_star_tol",
    "points_per_period",
    "out_dir",
];

fn parse_num<T: std::str::FromStr>(key: &str, v: &str, line: usize) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config { line, msg: format!("{key}: cannot parse {v:?}") })
}

impl RunConfig {
    /// Defaults, then the file (if any), then overrides, then the
    /// environment's output directory. `line` 0 marks an override.
    pub fn load(file: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() || line.starts_with('[') {
                    continue;
                }
                cfg.apply(line, i + 1)?;
            }
        }
        for o in overrides {
            cfg.apply(o, 0)?;
        }
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                cfg.out_dir = PathBuf::from(dir);
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn apply(&mut self, entry: &str, line: usize) -> Result<(), CliError> {
        let (k, v) = entry.split_once('=').ok_or_else(|| CliError::Config { line, msg: format!("expected key=value, got {entry:?}") })?;
        let (k, v) = (k.trim(), v.trim().trim_matches('"'));
        match k {
            "integrator_rel_tol" => self.integrator_rel_tol = parse_num(k, v, line)?,
            "integrator_abs_tol" => self.integrator_abs_tol = parse_num(k, v, line)?,
            "scan_ceiling" => self.scan_ceiling = parse_num(k, v, line)?,
            "eigen_tol" => self.eigen_tol = parse_num(k, v, line)?,
            "rational_cap" => self.rational_cap = parse_num(k, v, line)?,
            "rational_tol" => self.rational_tol = parse_num(k, v, line)?,
            "mu_star_tol" => self.mu_star_tol = parse_num(k, v, line)?,
            "points_per_period" => self.points_per_period = parse_num(k, v, line)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            // `tol` sets every tolerance at once
            "tol" => {
                let t: f64 = parse_num(k, v, line)?;
                self.integrator_rel_tol = t;
                self.integrator_abs_tol = t;
                self.eigen_tol = t;
                self.rational_tol = t;
                self.mu_star_tol = t;
            }
            _ => return Err(CliError::Config { line, msg: format!("unknown key {k:?}; known: {}, tol", KEYS.join(", ")) }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let tols = [
            ("integrator_rel_tol", self.integrator_rel_tol),
            ("integrator_abs_tol", self.integrator_abs_tol),
            ("eigen_tol", self.eigen_tol),
            ("rational_tol", self.rational_tol),
            ("mu_star_tol", self.mu_star_tol),
        ];
        for (k, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config { line: 0, msg: format!("{k} must be positive, got {v}") });
            }
        }
        if !(self.scan_ceiling > 0.0) {
            return Err(CliError::Config { line: 0, msg: "scan_ceiling must be positive".into() });
        }
        if self.rational_cap < 1 {
            return Err(CliError::Config { line: 0, msg: "rational_cap must be at least 1".into() });
        }
        if self.points_per_period < 8 {
            return Err(CliError::Config { line: 0, msg: "points_per_period must be at least 8".into() });
        }
        Ok(())
    }

    /// Sorted key=value lines of every numeric setting. The output
    /// directory is left out: it does not change any number.
    pub fn canonical(&self) -> String {
        let mut m = BTreeMap::new();
        m.insert("eigen_tol", format!("{:e}", self.eigen_tol));
        m.insert("integrator_abs_tol", format!("{:e}", self.integrator_abs_tol));
        m.insert("integrator_rel_tol", format!("{:e}", self.integrator_rel_tol));
        m.insert("mu_star_tol", format!("{:e}", self.mu_star_tol));
        m.insert("points_per_period", self.points_per_period.to_string());
        m.insert("rational_cap", self.rational_cap.to_string());
        m.insert("rational_tol", format!("{:e}", self.rational_tol));
        m.insert("scan_ceiling", format!("{:e}", self.scan_ceiling));
        m.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// sha256 of [`RunConfig::canonical`], hex.
    pub fn digest(&self) -> String {
        let d = Sha256::digest(self.canonical().as_bytes());
        d.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn ode(&self) -> OdeConfig {
        OdeConfig { rel_tol: self.integrator_rel_tol, abs_tol: self.integrator_abs_tol, ..OdeConfig::default() }
    }

    pub fn lame(&self) -> LameConfig {
        LameConfig { ode: self.ode(), tol_h: self.eigen_tol, scan_ceiling: self.scan_ceiling, ..LameConfig::default() }
    }

    pub fn orbit(&self) -> OrbitConfig {
        OrbitConfig { rational_cap: self.rational_cap, rational_tol: self.rational_tol, ..OrbitConfig::default() }
    }

    pub fn lien(&self) -> LienConfig {
        LienConfig { ode: self.ode(), ..LienConfig::default() }
    }

    pub fn mu_star(&self) -> MuStarConfig {
        MuStarConfig { ode: self.ode(), tol: self.mu_star_tol, ..MuStarConfig::default() }
    }
}
