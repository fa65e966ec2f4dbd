//! Run configuration: an optional TOML file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum EvalSubset {
    All,
    Train,
    Test,
    Holdout,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    /// `None` selects the bundled snapshot.
    pub input: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub split: [f64; 3],
    pub alpha_enter: f64,
    pub alpha_remove: f64,
    pub hidden: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub log_transform: bool,
    pub eval_on: EvalSubset,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out: PathBuf::from("out"),
            seed: 1,
            split: [0.70, 0.18, 0.12],
            alpha_enter: 0.050,
            alpha_remove: 0.100,
            hidden: 2,
            max_epochs: 1000,
            patience: 1,
            log_transform: true,
            eval_on: EvalSubset::All,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.split.iter().any(|p| !(p.is_finite() && *p > 0.0))
            || (self.split.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return bad(format!(
                "split proportions {:?} must be positive and sum to 1",
                self.split
            ));
        }
        if !(self.alpha_enter > 0.0 && self.alpha_enter <= self.alpha_remove && self.alpha_remove <= 1.0) {
            return bad(format!(
                "need 0 < alpha-enter <= alpha-remove <= 1, got {} / {}",
                self.alpha_enter, self.alpha_remove
            ));
        }
        if self.max_epochs == 0 {
            return bad("max-epochs must be at least 1".into());
        }
        if self.hidden == 0 {
            return bad("hidden must be at least 1".into());
        }
        if self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        if self.out.as_os_str().is_empty() || self.input.as_ref().is_some_and(|p| p.as_os_str().is_empty()) {
            return bad("paths must be non-empty".into());
        }
        Ok(())
    }
}

/// Keys accepted in the configuration file; all optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub split: Option<Vec<f64>>,
    pub alpha_enter: Option<f64>,
    pub alpha_remove: Option<f64>,
    pub hidden: Option<usize>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub no_log: Option<bool>,
    pub eval_on: Option<EvalSubset>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

fn parse_split(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated proportions, got `{s}`"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.trim().parse().map_err(|_| format!("`{part}` is not a number"))?;
    }
    Ok(out)
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Key-value (TOML) configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Panel CSV; defaults to the bundled five-country snapshot.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train, test and holdout proportions, e.g. `0.70,0.18,0.12`.
    #[arg(long, value_parser = parse_split)]
    pub split: Option<[f64; 3]>,
    #[arg(long)]
    pub alpha_enter: Option<f64>,
    #[arg(long)]
    pub alpha_remove: Option<f64>,
    /// Hidden units in the perceptron.
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Consecutive accepted steps without improvement before training stops.
    #[arg(long)]
    pub patience: Option<usize>,
    /// Fit on raw values instead of natural logarithms.
    #[arg(long)]
    pub no_log: bool,
    /// Records used for RMSE/MAPE.
    #[arg(long, value_enum)]
    pub eval_on: Option<EvalSubset>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mut cfg = RunConfig::default();
        let split = match file.split {
            Some(v) if v.len() == 3 => Some([v[0], v[1], v[2]]),
            Some(v) => return Err(CliError::Config(format!("split needs three values, got {}", v.len()))),
            None => None,
        };
        cfg.input = self.input.clone().or(file.input);
        cfg.out = self.out.clone().or(file.out).unwrap_or(cfg.out);
        cfg.seed = self.seed.or(file.seed).unwrap_or(cfg.seed);
        cfg.split = self.split.or(split).unwrap_or(cfg.split);
        cfg.alpha_enter = self.alpha_enter.or(file.alpha_enter).unwrap_or(cfg.alpha_enter);
        cfg.alpha_remove = self.alpha_remove.or(file.alpha_remove).unwrap_or(cfg.alpha_remove);
        cfg.hidden = self.hidden.or(file.hidden).unwrap_or(cfg.hidden);
        cfg.max_epochs = self.max_epochs.or(file.max_epochs).unwrap_or(cfg.max_epochs);
        cfg.patience = self.patience.or(file.patience).unwrap_or(cfg.patience);
        cfg.log_transform = !(self.no_log || file.no_log.unwrap_or(false));
        cfg.eval_on = self.eval_on.or(file.eval_on).unwrap_or(cfg.eval_on);
        cfg.validate()?;
        Ok(cfg)
    }
}
