//! Merge of built-in defaults, the `--config` file and command-line flags,
//! in increasing priority.

use std::fs;
use std::path::Path;

use relcontract::contracts::{CostFunction, EnvParams};

use crate::args::Common;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct Settings {
    pub params: EnvParams,
    pub cost: CostFunction,
    pub tol: f64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            params: EnvParams { n: 2, sigma: 0.0, delta: 0.7, u_bar: 0.1, u0_bar: 0.0, phi: 1.0 },
            cost: CostFunction::default(),
            tol: 1e-10,
            seed: 1,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("config value {value:?} for {key} is not valid")))
}

impl Settings {
    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!("{}:{}: expected key=value", path.display(), lineno + 1)));
            };
            let key = key.trim().replace('-', "_");
            match key.as_str() {
                "n" => self.params.n = parse(&key, value)?,
                "sigma" => self.params.sigma = parse(&key, value)?,
                "delta" => self.params.delta = parse(&key, value)?,
                "u_bar" => self.params.u_bar = parse(&key, value)?,
                "u0" | "u0_bar" => self.params.u0_bar = parse(&key, value)?,
                "phi" => self.params.phi = parse(&key, value)?,
                "cost" => self.cost = value.trim().parse().map_err(CliError::from_core_usage)?,
                "tol" => self.tol = parse(&key, value)?,
                "seed" => self.seed = parse(&key, value)?,
                other => {
                    return Err(CliError::Usage(format!("{}:{}: unknown key {other:?}", path.display(), lineno + 1)))
                }
            }
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, c: &Common) -> Result<(), CliError> {
        if let Some(v) = c.n {
            self.params.n = v;
        }
        if let Some(v) = c.sigma {
            self.params.sigma = v;
        }
        if let Some(v) = c.delta {
            self.params.delta = v;
        }
        if let Some(v) = c.u_bar {
            self.params.u_bar = v;
        }
        if let Some(v) = c.u0_bar {
            self.params.u0_bar = v;
        }
        if let Some(v) = c.phi {
            self.params.phi = v;
        }
        if let Some(v) = &c.cost {
            self.cost = v.parse().map_err(CliError::from_core_usage)?;
        }
        if let Some(v) = c.tol {
            self.tol = v;
        }
        if let Some(v) = c.seed {
            self.seed = v;
        }
        Ok(())
    }

    pub fn resolve(c: &Common) -> Result<Self, CliError> {
        let mut s = Settings::default();
        if let Some(path) = &c.config {
            s.apply_file(path)?;
        }
        s.apply_flags(c)?;
        if !(s.tol > 0.0) {
            return Err(CliError::Usage(format!("tol must be positive, got {}", s.tol)));
        }
        Ok(s)
    }
}
