//! Flat `key = value` run configuration with exact rational literals.
//!
//! ```text
//! # comment
//! rho = 7/10
//! mu0 = 4/5
//! pi = 1/2
//! c = 7/40
//! k = 17/100
//! ```
//!
//! Costs are given either raw (`c`, `k`) or effective (`gamma`, `kappa`).
//! Grids list effective costs explicitly (`kappa_grid`, `gamma_grid`) or as
//! `grid_steps = n` for `j/n`, `j = 1..=n`. Single cells may override the
//! primitives with `override.<row>.<col>.<rho|mu0|pi>`, where rows follow
//! `gamma_grid` and columns follow `kappa_grid`.

use std::collections::BTreeMap;
use std::str::FromStr;

use evidence_core::{Params, Rat};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("key `{key}`: {reason}")]
    BadValue { key: String, reason: String },
    #[error("missing key `{0}`")]
    Missing(&'static str),
    #[error("{0}")]
    Conflict(String),
    #[error("grid cell ({row}, {col}): {reason}")]
    BadCell { row: usize, col: usize, reason: String },
}

const PRIMITIVES: [&str; 3] = ["rho", "mu0", "pi"];
const SCALARS: [&str; 12] = [
    "rho", "mu0", "pi", "c", "k", "gamma", "kappa", "kappa_grid", "gamma_grid", "grid_steps", "seed", "points",
];

/// Validated keys with their unparsed values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

fn is_override(key: &str) -> bool {
    let parts: Vec<&str> = key.split('.').collect();
    parts.len() == 4
        && parts[0] == "override"
        && parts[1].parse::<usize>().is_ok()
        && parts[2].parse::<usize>().is_ok()
        && PRIMITIVES.contains(&parts[3])
}

impl FromStr for RunConfig {
    type Err = ConfigError;

    fn from_str(text: &str) -> Result<RunConfig, ConfigError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !SCALARS.contains(&key) && !is_override(key) {
                return Err(ConfigError::UnknownKey { line, key: key.to_string() });
            }
            if entries.insert(key.to_string(), value.to_string()).is_some() {
                return Err(ConfigError::DuplicateKey { line, key: key.to_string() });
            }
        }
        Ok(RunConfig { entries })
    }
}

fn parse_rat(key: &str, value: &str) -> Result<Rat, ConfigError> {
    value.parse().map_err(|e: evidence_core::Error| ConfigError::BadValue {
        key: key.to_string(),
        reason: e.to_string(),
    })
}

fn parse_int<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        reason: format!("`{value}` is not a non-negative integer"),
    })
}

/// A grid of effective costs at fixed primitives, row-major over `gamma`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub gammas: Vec<Rat>,
    pub kappas: Vec<Rat>,
    /// One point per cell, row `i` (gamma) major, column `j` (kappa) minor.
    pub cells: Vec<Params>,
}

impl Grid {
    pub fn rows(&self) -> usize {
        self.gammas.len()
    }

    pub fn cols(&self) -> usize {
        self.kappas.len()
    }
}

impl RunConfig {
    pub fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn rat(&self, key: &'static str) -> Result<Option<Rat>, ConfigError> {
        self.entries.get(key).map(|v| parse_rat(key, v)).transpose()
    }

    fn required(&self, key: &'static str) -> Result<Rat, ConfigError> {
        self.rat(key)?.ok_or(ConfigError::Missing(key))
    }

    fn primitives(&self) -> Result<(Rat, Rat, Rat), ConfigError> {
        Ok((self.required("rho")?, self.required("mu0")?, self.required("pi")?))
    }

    fn invalid(e: evidence_core::Error) -> ConfigError {
        ConfigError::BadValue { key: "params".into(), reason: e.to_string() }
    }

    /// Whether the config names a single parameter point.
    pub fn is_point(&self) -> bool {
        PRIMITIVES.iter().any(|k| self.has(k))
    }

    pub fn point(&self) -> Result<Params, ConfigError> {
        for key in ["kappa_grid", "gamma_grid", "grid_steps"] {
            if self.has(key) {
                return Err(ConfigError::Conflict(format!("`{key}` is only valid for region sweeps")));
            }
        }
        let (rho, mu0, pi) = self.primitives()?;
        let raw = self.has("c") || self.has("k");
        let effective = self.has("gamma") || self.has("kappa");
        match (raw, effective) {
            (true, true) => Err(ConfigError::Conflict("give either c/k or gamma/kappa, not both".into())),
            (_, false) => {
                Params::new(rho, mu0, pi, self.required("c")?, self.required("k")?).map_err(Self::invalid)
            }
            (false, true) => {
                Params::from_effective_costs(rho, mu0, pi, self.required("gamma")?, self.required("kappa")?)
                    .map_err(Self::invalid)
            }
        }
    }

    fn axis(&self, key: &'static str) -> Result<Option<Vec<Rat>>, ConfigError> {
        let Some(list) = self.entries.get(key) else { return Ok(None) };
        let values = list.split(',').map(|v| parse_rat(key, v)).collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err(ConfigError::BadValue { key: key.into(), reason: "empty list".into() });
        }
        Ok(Some(values))
    }

    pub fn grid(&self) -> Result<Grid, ConfigError> {
        for key in ["c", "k", "gamma", "kappa"] {
            if self.has(key) {
                return Err(ConfigError::Conflict(format!("`{key}` is not valid in a region sweep")));
            }
        }
        let (rho, mu0, pi) = self.primitives()?;
        let steps = match self.entries.get("grid_steps") {
            None => None,
            Some(v) => {
                let n: i128 = parse_int("grid_steps", v)?;
                if n < 1 {
                    return Err(ConfigError::BadValue { key: "grid_steps".into(), reason: "must be at least 1".into() });
                }
                Some((1..=n).map(|j| Rat::new(j, n)).collect::<Vec<_>>())
            }
        };
        let pick = |key: &'static str| -> Result<Vec<Rat>, ConfigError> {
            match (self.axis(key)?, &steps) {
                (Some(_), Some(_)) => Err(ConfigError::Conflict(format!("give `{key}` or `grid_steps`, not both"))),
                (Some(v), None) => Ok(v),
                (None, Some(s)) => Ok(s.clone()),
                (None, None) => Err(ConfigError::Missing(key)),
            }
        };
        let gammas = pick("gamma_grid")?;
        let kappas = pick("kappa_grid")?;

        let mut overrides: BTreeMap<(usize, usize), BTreeMap<&str, Rat>> = BTreeMap::new();
        for (key, value) in &self.entries {
            if !is_override(key) {
                continue;
            }
            let parts: Vec<&str> = key.split('.').collect();
            let (row, col): (usize, usize) = (parts[1].parse().unwrap(), parts[2].parse().unwrap());
            if row >= gammas.len() || col >= kappas.len() {
                return Err(ConfigError::BadCell { row, col, reason: "outside the grid".into() });
            }
            let name = PRIMITIVES.iter().find(|p| **p == parts[3]).unwrap();
            overrides.entry((row, col)).or_default().insert(name, parse_rat(key, value)?);
        }

        let mut cells = Vec::with_capacity(gammas.len() * kappas.len());
        for (row, &gamma) in gammas.iter().enumerate() {
            for (col, &kappa) in kappas.iter().enumerate() {
                let o = overrides.get(&(row, col));
                let get = |name: &str, base: Rat| o.and_then(|m| m.get(name).copied()).unwrap_or(base);
                let p = Params::from_effective_costs(get("rho", rho), get("mu0", mu0), get("pi", pi), gamma, kappa)
                    .map_err(|e| ConfigError::BadCell { row, col, reason: e.to_string() })?;
                cells.push(p);
            }
        }
        Ok(Grid { gammas, kappas, cells })
    }

    /// `(seed, points)` for randomized verification.
    pub fn sampling(&self) -> Result<(u64, usize), ConfigError> {
        let seed = self.entries.get("seed").map(|v| parse_int("seed", v)).transpose()?.unwrap_or(DEFAULT_SEED);
        let points = self.entries.get("points").map(|v| parse_int("points", v)).transpose()?.unwrap_or(DEFAULT_POINTS);
        Ok((seed, points))
    }
}

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_POINTS: usize = 100;
