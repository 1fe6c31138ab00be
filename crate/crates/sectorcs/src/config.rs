//! Flat key=value experiment files.
//!
//! One setting per line, `#` starts a comment, `m` and `snr_db` accept
//! comma-separated value lists that the `sweep` flow expands into a grid.
//! Unknown and duplicate keys are errors: a silently ignored typo would
//! quietly change which experiment ran.
//!
//! ```text
//! # 64 antennas split into 4 sectors
//! n = 64
//! n_sectors = 4
//! m = 8,12,16
//! snr_db = 5
//! scheme = pcs
//! trials = 200
//! ```

use std::collections::HashSet;
use std::path::Path;
use std::str::FromStr;

use crate::channel::{ChannelScenarioConfig, GridMode};
use crate::error::{Error, Result};
use crate::eval::{ExperimentConfig, OmpSettings, Scheme};

/// Parsed experiment file. `m` and `snr_db` are grids; every other knob
/// is a scalar shared by all grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct FileConfig {
    pub n: usize,
    pub n_sectors: usize,
    pub m: Vec<usize>,
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub scheme: Scheme,
    pub k_rays: usize,
    pub grid_mode: GridMode,
    pub in_sector: bool,
    pub power_normalization: bool,
    /// `auto` in the file; falls back to `k_rays` selections.
    pub max_sparsity: Option<usize>,
    /// `auto` in the file; falls back to the noise-dependent default.
    pub residual_tol: Option<f64>,
    pub oversampling: usize,
    pub n_mask_candidates: usize,
    pub greedy_pool_factor: usize,
    pub seed: u64,
}

impl Default for FileConfig {
    fn default() -> Self {
        Self {
            n: 256,
            n_sectors: 4,
            m: vec![25],
            snr_db: vec![5.0],
            trials: 100,
            scheme: Scheme::Pcs,
            k_rays: 4,
            grid_mode: GridMode::OffGrid,
            in_sector: true,
            power_normalization: true,
            max_sparsity: None,
            residual_tol: None,
            oversampling: 1,
            n_mask_candidates: 5000,
            greedy_pool_factor: 30,
            seed: 0,
        }
    }
}

impl FileConfig {
    fn experiment_at(&self, m: usize, snr_db: f64) -> ExperimentConfig {
        let mut channel = ChannelScenarioConfig::new(self.n, self.k_rays);
        channel.grid_mode = self.grid_mode;
        channel.power_normalization = self.power_normalization;
        channel.rng_seed = self.seed;
        ExperimentConfig {
            n: self.n,
            n_sectors: self.n_sectors,
            m,
            snr_db,
            trials: self.trials,
            scheme: self.scheme,
            channel,
            in_sector: self.in_sector,
            omp: OmpSettings {
                max_sparsity: self.max_sparsity,
                residual_tol: self.residual_tol,
                oversampling: self.oversampling,
            },
            n_mask_candidates: self.n_mask_candidates,
            greedy_pool_factor: self.greedy_pool_factor,
            seed: self.seed,
        }
    }

    /// Collapses the file to one experiment; the grids must be singletons.
    pub fn to_experiment_config(&self) -> Result<ExperimentConfig> {
        if self.m.len() != 1 || self.snr_db.len() != 1 {
            return Err(Error::InvalidConfig(format!(
                "m and snr_db lists ({} and {} values) only apply to sweeps; give single values",
                self.m.len(),
                self.snr_db.len()
            )));
        }
        Ok(self.experiment_at(self.m[0], self.snr_db[0]))
    }

    /// One experiment per (m, snr_db) grid point, m-major in file order.
    pub fn sweep_grid(&self) -> Vec<ExperimentConfig> {
        self.m
            .iter()
            .flat_map(|&m| self.snr_db.iter().map(move |&snr| self.experiment_at(m, snr)))
            .collect()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::ConfigParse {
        line,
        message: message.into(),
    }
}

fn scalar<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| parse_err(line, format!("bad value '{value}' for {key}")))
}

fn usize_list(line: usize, key: &str, value: &str) -> Result<Vec<usize>> {
    value.split(',').map(|v| scalar(line, key, v.trim())).collect()
}

fn f64_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = value
        .split(',')
        .map(|v| scalar(line, key, v.trim()))
        .collect::<Result<_>>()?;
    if out.iter().any(|v| v.is_nan()) {
        return Err(parse_err(line, format!("{key} must not be NaN")));
    }
    Ok(out)
}

fn boolean(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(parse_err(line, format!("bad value '{other}' for {key} (true or false)"))),
    }
}

/// Parses the flat key=value format. Settings not present keep their
/// defaults.
pub fn parse_config(text: &str) -> Result<FileConfig> {
    let mut config = FileConfig::default();
    let mut seen = HashSet::new();
    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_err(line, "expected key = value"))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(parse_err(line, format!("missing value for {key}")));
        }
        if !seen.insert(key.to_string()) {
            return Err(parse_err(line, format!("duplicate key '{key}'")));
        }
        match key {
            "n" => config.n = scalar(line, key, value)?,
            "n_sectors" => config.n_sectors = scalar(line, key, value)?,
            "m" => config.m = usize_list(line, key, value)?,
            "snr_db" => config.snr_db = f64_list(line, key, value)?,
            "trials" => config.trials = scalar(line, key, value)?,
            "scheme" => {
                config.scheme = value
                    .parse()
                    .map_err(|e| parse_err(line, format!("{e}")))?;
            }
            "k_rays" => config.k_rays = scalar(line, key, value)?,
            "grid_mode" => {
                config.grid_mode = match value {
                    "on_grid" => GridMode::OnGrid,
                    "off_grid" => GridMode::OffGrid,
                    other => {
                        return Err(parse_err(
                            line,
                            format!("bad value '{other}' for grid_mode (on_grid or off_grid)"),
                        ))
                    }
                };
            }
            "in_sector" => config.in_sector = boolean(line, key, value)?,
            "power_normalization" => config.power_normalization = boolean(line, key, value)?,
            "max_sparsity" => {
                config.max_sparsity = match value {
                    "auto" => None,
                    v => Some(scalar(line, key, v)?),
                };
            }
            "residual_tol" => {
                config.residual_tol = match value {
                    "auto" => None,
                    v => {
                        let tol: f64 = scalar(line, key, v)?;
                        if !(tol.is_finite() && tol >= 0.0) {
                            return Err(parse_err(
                                line,
                                "residual_tol must be finite and nonnegative",
                            ));
                        }
                        Some(tol)
                    }
                };
            }
            "oversampling" => config.oversampling = scalar(line, key, value)?,
            "n_mask_candidates" => config.n_mask_candidates = scalar(line, key, value)?,
            "greedy_pool_factor" => config.greedy_pool_factor = scalar(line, key, value)?,
            "seed" => config.seed = scalar(line, key, value)?,
            unknown => return Err(parse_err(line, format!("unknown key '{unknown}'"))),
        }
    }
    Ok(config)
}

/// Reads and parses an experiment file.
pub fn load_config(path: &Path) -> Result<FileConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}
