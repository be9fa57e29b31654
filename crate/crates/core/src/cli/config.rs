//! Line-oriented `key = value` run configuration.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use crate::mfe_solver::{AlphaMode, MfeProblem, Nonlinearity};
use crate::numerics::RadialGrid;

pub const MIN_GRID_NODES: usize = 64;

const KEYS: &[&str] = &[
    "n",
    "lambda",
    "nonlinearity",
    "p",
    "alpha_mode",
    "alpha",
    "grid_nodes",
    "grading",
    "tol",
    "modes",
    "eigen_count",
    "seed",
    "output_dir",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: MfeProblem,
    pub grid_nodes: usize,
    /// Ratio of the last to the first cell width; 1 for a uniform grid.
    pub grading: f64,
    pub tol: f64,
    pub modes: Vec<usize>,
    pub eigen_count: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn grid(&self) -> Result<RadialGrid, String> {
        RadialGrid::graded(self.grid_nodes, self.problem.n, self.grading).map_err(|e| e.to_string())
    }

    /// Applies command-line overrides and rechecks the invariants they touch.
    pub fn override_with(
        &mut self,
        modes: Option<Vec<usize>>,
        eigen_count: Option<usize>,
    ) -> Result<(), String> {
        if let Some(m) = modes {
            check_modes(&m)?;
            self.modes = m;
        }
        if let Some(k) = eigen_count {
            check_eigen_count(k)?;
            self.eigen_count = k;
        }
        Ok(())
    }
}

/// Comma-separated list; surrounding whitespace is ignored.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, String> {
    if text.trim().is_empty() {
        return Err("empty list".into());
    }
    text.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse().map_err(|_| format!("cannot parse list item {item:?}"))
        })
        .collect()
}

/// Mode list: nonempty and strictly ascending.
pub fn parse_modes(text: &str) -> Result<Vec<usize>, String> {
    let modes = parse_list(text)?;
    check_modes(&modes)?;
    Ok(modes)
}

fn check_modes(modes: &[usize]) -> Result<(), String> {
    if modes.is_empty() {
        return Err("modes must be nonempty".into());
    }
    if modes.windows(2).any(|w| w[1] <= w[0]) {
        return Err("modes must be sorted ascending without repeats".into());
    }
    Ok(())
}

fn check_eigen_count(k: usize) -> Result<(), String> {
    if k == 0 {
        return Err("eigen_count must be at least 1".into());
    }
    Ok(())
}

fn scalar<T: FromStr>(map: &BTreeMap<&str, &str>, key: &str, default: T) -> Result<T, String> {
    match map.get(key) {
        Some(v) => v.parse().map_err(|_| format!("invalid value {v:?} for key '{key}'")),
        None => Ok(default),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected 'key = value'", lineno + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(format!("line {}: unknown key '{key}'", lineno + 1));
        }
        if value.is_empty() {
            return Err(format!("line {}: key '{key}' has no value", lineno + 1));
        }
        if map.insert(key, value).is_some() {
            return Err(format!("line {}: duplicate key '{key}'", lineno + 1));
        }
    }

    let nonlinearity = match map.get("nonlinearity").copied().unwrap_or("power") {
        "power" => Nonlinearity::Power { p: scalar(&map, "p", 2.0)? },
        "exponential" => {
            if map.contains_key("p") {
                return Err("key 'p' only applies to the power nonlinearity".into());
            }
            Nonlinearity::Exponential
        }
        other => return Err(format!("nonlinearity must be 'power' or 'exponential', got {other:?}")),
    };
    let alpha_mode = match map.get("alpha_mode").copied().unwrap_or("free") {
        "free" => {
            if map.contains_key("alpha") {
                return Err("key 'alpha' requires alpha_mode = pinned".into());
            }
            AlphaMode::Free
        }
        "pinned" => AlphaMode::Pinned(scalar(&map, "alpha", 0.0)?),
        other => return Err(format!("alpha_mode must be 'free' or 'pinned', got {other:?}")),
    };
    let lambda = match alpha_mode {
        AlphaMode::Free => {
            let v = map.get("lambda").ok_or("missing required key 'lambda'")?;
            v.parse().map_err(|_| format!("invalid value {v:?} for key 'lambda'"))?
        }
        // the coupling is an unknown when alpha is pinned
        AlphaMode::Pinned(_) => {
            if map.contains_key("lambda") {
                return Err("key 'lambda' is solved for when alpha_mode = pinned".into());
            }
            0.0
        }
    };
    let problem = MfeProblem::new(scalar(&map, "n", 2)?, lambda, nonlinearity, alpha_mode)
        .map_err(|e| e.to_string())?;

    let grid_nodes = scalar(&map, "grid_nodes", 513)?;
    if grid_nodes < MIN_GRID_NODES {
        return Err(format!("grid_nodes must be at least {MIN_GRID_NODES}, got {grid_nodes}"));
    }
    let grading: f64 = scalar(&map, "grading", 1.0)?;
    if !(grading > 0.0 && grading <= 1.0) {
        return Err(format!("grading must lie in (0, 1], got {grading}"));
    }
    let tol: f64 = scalar(&map, "tol", 1e-10)?;
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(format!("tol must lie in [1e-12, 1e-4], got {tol}"));
    }
    let modes = match map.get("modes") {
        Some(v) => parse_modes(v)?,
        None => (0..=8).collect(),
    };
    let eigen_count = scalar(&map, "eigen_count", 5)?;
    check_eigen_count(eigen_count)?;

    Ok(RunConfig {
        problem,
        grid_nodes,
        grading,
        tol,
        modes,
        eigen_count,
        seed: scalar(&map, "seed", 0)?,
        output_dir: map.get("output_dir").map(PathBuf::from),
    })
}
