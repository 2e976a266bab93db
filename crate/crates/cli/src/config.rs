//! Run configuration: JSON config files, command-line overrides and the
//! resolved record embedded in every output.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CONFIG_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "BROWNFLOW_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CommandName {
    Sample,
    Density,
    Compare,
    Hj,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Gue,
    Ginibre,
    UnitaryBm,
    GlBm,
    NilpotentDemo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum DensityName {
    Semicircle,
    Circular,
    Multiplicative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CheckName {
    Semicircle,
    Circular,
    Multiplicative,
    Horizontal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HjTask {
    LifetimeScan,
    MultTrajectory,
    CircTrajectory,
    Shoot,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Everything a run depends on. Config files use this layout directly; after
/// resolution every field a command reads is filled in, and the whole record
/// is written into the output.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<Ensemble>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density: Option<DensityName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<HjTask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Product steps for group Brownian motions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_resolution: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

/// Numeric parameters shared by all commands. Each command reads the ones it
/// needs and ignores the rest.
#[derive(Clone, Debug, Default, Args)]
pub struct Params {
    /// Matrix size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Time parameter.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Number of product steps for unitary/GL Brownian motion.
    #[arg(long)]
    pub k: Option<usize>,
    /// Perturbation size or regularization.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Angular resolution of tables and scans.
    #[arg(long)]
    pub theta_resolution: Option<usize>,
    /// Independent samples (pooled).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Histogram bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Pass threshold for `compare`.
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Real part of the starting point or target.
    #[arg(long, allow_negative_numbers = true)]
    pub re: Option<f64>,
    /// Imaginary part of the starting point or target.
    #[arg(long, allow_negative_numbers = true)]
    pub im: Option<f64>,
    /// Initial regularization `x0` of a characteristic.
    #[arg(long)]
    pub x0: Option<f64>,
}

macro_rules! overlay {
    ($dst:expr, $src:expr, $($f:ident),*) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl RunConfig {
    pub fn empty() -> Self {
        Self {
            version: CONFIG_VERSION,
            ..Self::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::Usage(format!(
                "config {}: version {} is not supported (expected {CONFIG_VERSION})",
                path.display(),
                cfg.version
            )));
        }
        Ok(cfg)
    }

    /// Fields set in `p` replace those in `self`.
    pub fn apply_params(&mut self, p: &Params) {
        overlay!(self, p, n, t, k, epsilon, theta_resolution, samples, bins, tolerance, re, im, x0);
    }

    /// Fields set in `other` replace those in `self`.
    pub fn apply(&mut self, other: &RunConfig) {
        overlay!(
            self, other, command, preset, ensemble, density, check, task, n, t, k, epsilon, theta_resolution,
            samples, bins, tolerance, re, im, x0, seed, output, format
        );
    }

    /// Seed precedence: command-line flag, then `BROWNFLOW_SEED`, then the
    /// config file, then 42.
    pub fn resolve_seed(&mut self, flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
        let env_seed = match env {
            Some(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| CliError::Usage(format!("{SEED_ENV}={s:?} is not an unsigned integer")))?,
            ),
            None => None,
        };
        let seed = flag.or(env_seed).or(self.seed).unwrap_or(DEFAULT_SEED);
        self.seed = Some(seed);
        Ok(seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// Rejects out-of-range values among the fields that are set.
    pub fn validate(&self) -> Result<(), CliError> {
        fn at_least(name: &str, v: Option<usize>, min: usize) -> Result<(), CliError> {
            match v {
                Some(v) if v < min => Err(CliError::Usage(format!("{name} = {v} must be at least {min}"))),
                _ => Ok(()),
            }
        }
        fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
            match v {
                Some(v) if !(v > 0.0 && v.is_finite()) => {
                    Err(CliError::Usage(format!("{name} = {v} must be positive and finite")))
                }
                _ => Ok(()),
            }
        }
        fn finite(name: &str, v: Option<f64>) -> Result<(), CliError> {
            match v {
                Some(v) if !v.is_finite() => Err(CliError::Usage(format!("{name} = {v} must be finite"))),
                _ => Ok(()),
            }
        }
        at_least("n", self.n, 1)?;
        at_least("k", self.k, 1)?;
        at_least("theta_resolution", self.theta_resolution, 16)?;
        at_least("samples", self.samples, 1)?;
        at_least("bins", self.bins, 1)?;
        positive("t", self.t)?;
        positive("epsilon", self.epsilon)?;
        positive("tolerance", self.tolerance)?;
        positive("x0", self.x0)?;
        finite("re", self.re)?;
        finite("im", self.im)
    }

    /// Returns the field, storing `default` first when it is unset.
    pub fn get_or<T: Copy>(field: &mut Option<T>, default: T) -> T {
        *field.get_or_insert(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        let mut cfg = RunConfig {
            seed: Some(3),
            ..RunConfig::empty()
        };
        assert_eq!(cfg.clone().resolve_seed(Some(1), Some("2")).unwrap(), 1);
        assert_eq!(cfg.clone().resolve_seed(None, Some("2")).unwrap(), 2);
        assert_eq!(cfg.resolve_seed(None, None).unwrap(), 3);
        assert_eq!(cfg.seed, Some(3));
        assert_eq!(RunConfig::empty().resolve_seed(None, None).unwrap(), DEFAULT_SEED);
        assert!(RunConfig::empty().resolve_seed(None, Some("x")).is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"version": 1, "n": 5, "size": 3}"#).is_err());
        let cfg: RunConfig = serde_json::from_str(r#"{"version": 1, "ensemble": "gl-bm", "t": 0.5}"#).unwrap();
        assert_eq!(cfg.ensemble, Some(Ensemble::GlBm));
    }

    #[test]
    fn overrides_replace_only_set_fields() {
        let mut cfg = RunConfig {
            n: Some(10),
            t: Some(2.0),
            ..RunConfig::empty()
        };
        cfg.apply_params(&Params {
            n: Some(20),
            ..Params::default()
        });
        assert_eq!((cfg.n, cfg.t), (Some(20), Some(2.0)));
    }

    #[test]
    fn validation() {
        let bad = RunConfig {
            theta_resolution: Some(8),
            ..RunConfig::empty()
        };
        assert!(bad.validate().is_err());
        let bad = RunConfig {
            t: Some(-1.0),
            ..RunConfig::empty()
        };
        assert!(bad.validate().is_err());
        assert!(RunConfig::empty().validate().is_ok());
    }
}
