use serde::{Deserialize, Serialize};

use super::{fit_ols, partial_f, DesignMatrix, RegressionError, RegressionFit};
use crate::panel::{PanelDataset, Variable};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepwiseConfig {
    /// Enter a candidate when its partial-F p value is at most this.
    pub alpha_enter: f64,
    /// Remove an included variable when its partial-F p value is at least this.
    pub alpha_remove: f64,
}

impl Default for StepwiseConfig {
    fn default() -> Self {
        Self {
            alpha_enter: 0.050,
            alpha_remove: 0.100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Enter,
    Remove,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub step: usize,
    pub action: Action,
    pub variable: String,
    pub f: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepwiseResult {
    pub trace: Vec<TraceStep>,
    #[serde(rename = "final")]
    pub final_fit: RegressionFit,
    pub alpha_enter: f64,
    pub alpha_remove: f64,
}

impl StepwiseResult {
    pub fn selected(&self) -> &[String] {
        self.final_fit.predictors()
    }
}

/// Stepwise selection of `candidates` as predictors of `target`.
///
/// Column labels carry an `ln_` prefix when `ds` is log-transformed.
pub fn stepwise(
    ds: &PanelDataset,
    target: Variable,
    candidates: &[Variable],
    config: StepwiseConfig,
) -> Result<StepwiseResult, RegressionError> {
    let log = ds.is_transformed();
    let cols: Vec<(String, Vec<f64>)> = candidates.iter().map(|&v| (v.label(log), ds.column(v))).collect();
    stepwise_columns(&ds.column(target), &cols, config)
}

/// Stepwise selection over named columns.
///
/// Each round tries one entry (smallest partial-F p value among excluded
/// candidates, entered if `<= alpha_enter`) and then one removal (largest p
/// value among included variables, removed if `>= alpha_remove`). Selection
/// stops when neither fires. Ties go to the candidate listed first.
pub fn stepwise_columns(
    y: &[f64],
    candidates: &[(String, Vec<f64>)],
    config: StepwiseConfig,
) -> Result<StepwiseResult, RegressionError> {
    let StepwiseConfig {
        alpha_enter,
        alpha_remove,
    } = config;
    if !(alpha_enter > 0.0 && alpha_enter <= alpha_remove && alpha_remove <= 1.0) {
        return Err(RegressionError::BadThresholds {
            enter: alpha_enter,
            remove: alpha_remove,
        });
    }
    if candidates.is_empty() {
        return Err(RegressionError::NoCandidates);
    }
    let n = y.len();
    let fit_subset = |included: &[usize]| -> Result<RegressionFit, RegressionError> {
        let cols: Vec<(&str, Vec<f64>)> = included
            .iter()
            .map(|&k| (candidates[k].0.as_str(), candidates[k].1.clone()))
            .collect();
        fit_ols(&DesignMatrix::new(&cols, n)?, y)
    };

    let mut included: Vec<usize> = Vec::new();
    let mut current = fit_subset(&included)?;
    let mut trace = Vec::new();
    // guards against enter/remove cycles when alpha_enter == alpha_remove
    let max_rounds = 4 * (candidates.len() + 1);

    for _ in 0..max_rounds {
        let mut fired = false;

        let mut best: Option<(usize, f64, f64, RegressionFit)> = None;
        for k in 0..candidates.len() {
            if included.contains(&k) {
                continue;
            }
            let mut trial = included.clone();
            trial.push(k);
            let full = fit_subset(&trial)?;
            let (f, p) = partial_f(&current, &full)?;
            if best.as_ref().is_none_or(|b| clearly_less(p, b.2)) {
                best = Some((k, f, p, full));
            }
        }
        if let Some((k, f, p, full)) = best {
            if p <= alpha_enter {
                included.push(k);
                current = full;
                trace.push(TraceStep {
                    step: trace.len() + 1,
                    action: Action::Enter,
                    variable: candidates[k].0.clone(),
                    f,
                    p,
                });
                fired = true;
            }
        }

        let mut worst: Option<(usize, f64, f64, RegressionFit)> = None;
        for pos in 0..included.len() {
            let mut trial = included.clone();
            trial.remove(pos);
            let reduced = fit_subset(&trial)?;
            let (f, p) = partial_f(&reduced, &current)?;
            if worst.as_ref().is_none_or(|w| clearly_less(w.2, p)) {
                worst = Some((pos, f, p, reduced));
            }
        }
        if let Some((pos, f, p, reduced)) = worst {
            if p >= alpha_remove {
                let k = included.remove(pos);
                current = reduced;
                trace.push(TraceStep {
                    step: trace.len() + 1,
                    action: Action::Remove,
                    variable: candidates[k].0.clone(),
                    f,
                    p,
                });
                fired = true;
            }
        }

        if !fired {
            break;
        }
    }

    Ok(StepwiseResult {
        trace,
        final_fit: current,
        alpha_enter,
        alpha_remove,
    })
}

/// `a < b` beyond rounding noise, so equal p values keep declaration order.
fn clearly_less(a: f64, b: f64) -> bool {
    a < b - 1e-12 * b.abs()
}
