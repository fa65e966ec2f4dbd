//! Ordinary least squares with inference, partial F tests and stepwise selection.

mod model;
mod stepwise;

pub use model::RegressionModel;
pub use stepwise::{stepwise, stepwise_columns, Action, StepwiseConfig, StepwiseResult, TraceStep};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{least_squares_qr, LinalgError, Matrix};
use crate::panel::{PanelDataset, PanelError, Variable};
use crate::special::{f_upper_p, t_two_sided_p, TailError};

pub const INTERCEPT: &str = "intercept";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegressionError {
    #[error("design matrix is rank deficient (column `{0}`)")]
    RankDeficient(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("need more rows than columns, got {rows} rows for {cols} columns")]
    TooFewRows { rows: usize, cols: usize },
    #[error("duplicate column label `{0}`")]
    DuplicateLabel(String),
    #[error("reduced model is not nested in the full model")]
    NotNested,
    #[error("design columns {found:?} do not match fitted columns {expected:?}")]
    LabelMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("significance thresholds must satisfy 0 < enter <= remove <= 1, got {enter} / {remove}")]
    BadThresholds { enter: f64, remove: f64 },
    #[error("no candidate predictors")]
    NoCandidates,
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// Intercept column followed by labelled predictor columns.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    matrix: Matrix,
    labels: Vec<String>,
}

impl DesignMatrix {
    pub fn new<S: AsRef<str>>(columns: &[(S, Vec<f64>)], rows: usize) -> Result<Self, RegressionError> {
        let mut labels = vec![INTERCEPT.to_string()];
        for (label, col) in columns {
            let label = label.as_ref();
            if labels.iter().any(|l| l == label) {
                return Err(RegressionError::DuplicateLabel(label.to_string()));
            }
            if col.len() != rows {
                return Err(RegressionError::DimensionMismatch(format!(
                    "column `{label}` has {} values, expected {rows}",
                    col.len()
                )));
            }
            labels.push(label.to_string());
        }
        let p = labels.len();
        let mut data = Vec::with_capacity(rows * p);
        for i in 0..rows {
            data.push(1.0);
            data.extend(columns.iter().map(|(_, c)| c[i]));
        }
        let matrix = Matrix::from_row_major(rows, p, data).expect("sized above");
        Ok(Self { matrix, labels })
    }

    /// Design over the records at `idx` using `vars` as predictors.
    pub fn from_panel(ds: &PanelDataset, idx: &[usize], vars: &[Variable]) -> Result<Self, RegressionError> {
        ds.check_indices(idx)?;
        let cols: Vec<(String, Vec<f64>)> = vars
            .iter()
            .map(|&v| (v.label(ds.is_transformed()), ds.column_at(v, idx)))
            .collect();
        Self::new(&cols, idx.len())
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// One OLS fit with its inference statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub labels: Vec<String>,
    pub coefficients: Vec<f64>,
    pub se: Vec<f64>,
    pub t: Vec<f64>,
    pub p: Vec<f64>,
    pub sse: f64,
    /// Total sum of squares about the mean of y.
    pub tss: f64,
    pub r2: f64,
    /// Overall F against the intercept-only model; absent for that model itself.
    pub f: Option<f64>,
    pub f_p: Option<f64>,
    pub n_obs: usize,
    pub df_resid: usize,
}

impl RegressionFit {
    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }

    /// Predictor labels (everything but the intercept).
    pub fn predictors(&self) -> &[String] {
        &self.labels[1..]
    }

    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|k| self.coefficients[k])
    }

    pub fn intercept(&self) -> f64 {
        self.coefficients[0]
    }

    pub fn sigma2(&self) -> f64 {
        self.sse / self.df_resid as f64
    }
}

/// Fit `y = X b` by Householder QR.
///
/// Standard errors come from `sigma^2 (X'X)^-1` with `sigma^2 = SSE / (n - p)`;
/// p values use the t distribution on `n - p` degrees of freedom.
pub fn fit_ols(x: &DesignMatrix, y: &[f64]) -> Result<RegressionFit, RegressionError> {
    let (n, p) = (x.rows(), x.cols());
    if y.len() != n {
        return Err(RegressionError::DimensionMismatch(format!(
            "{n} design rows but {} responses",
            y.len()
        )));
    }
    if n <= p {
        return Err(RegressionError::TooFewRows { rows: n, cols: p });
    }
    let sol = least_squares_qr(x.matrix(), y).map_err(|e| match e {
        LinalgError::RankDeficient(k) => RegressionError::RankDeficient(x.labels[k].clone()),
        LinalgError::DimensionMismatch(m) => RegressionError::DimensionMismatch(m),
    })?;
    let beta = sol.coefficients.clone();
    let fitted = x.matrix().mul_vec(&beta).expect("shape checked");
    let sse: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();

    let df_resid = n - p;
    let sigma2 = sse / df_resid as f64;
    let se: Vec<f64> = sol.xtx_inv_diag().iter().map(|d| (sigma2 * d).sqrt()).collect();
    let t: Vec<f64> = beta.iter().zip(&se).map(|(b, s)| b / s).collect();
    let pvals = t
        .iter()
        .map(|&tj| {
            if tj.is_nan() {
                Ok(1.0)
            } else {
                t_two_sided_p(tj, df_resid as f64)
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let r2 = if tss > 0.0 {
        (1.0 - sse / tss).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let (f, f_p) = if p > 1 {
        let f = f_statistic(tss, sse, p - 1, df_resid);
        (Some(f), Some(f_upper_p(f, (p - 1) as f64, df_resid as f64)?))
    } else {
        (None, None)
    };

    Ok(RegressionFit {
        labels: x.labels().to_vec(),
        coefficients: beta,
        se,
        t,
        p: pvals,
        sse,
        tss,
        r2,
        f,
        f_p,
        n_obs: n,
        df_resid,
    })
}

fn f_statistic(sse_reduced: f64, sse_full: f64, q: usize, df_full: usize) -> f64 {
    let num = (sse_reduced - sse_full).max(0.0) / q as f64;
    let den = sse_full / df_full as f64;
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

/// Partial F test for the columns `full` adds to `reduced`; returns `(F, p)`.
pub fn partial_f(reduced: &RegressionFit, full: &RegressionFit) -> Result<(f64, f64), RegressionError> {
    let nested = reduced.labels.len() < full.labels.len() && reduced.labels.iter().all(|l| full.labels.contains(l));
    let same_y = reduced.n_obs == full.n_obs && (reduced.tss - full.tss).abs() <= 1e-9 * reduced.tss.abs().max(1e-300);
    if !nested || !same_y {
        return Err(RegressionError::NotNested);
    }
    let q = full.n_params() - reduced.n_params();
    let f = f_statistic(reduced.sse, full.sse, q, full.df_resid);
    let p = f_upper_p(f, q as f64, full.df_resid as f64)?;
    Ok((f, p))
}

/// `X b` on the fitted scale; callers exponentiate log-scale predictions.
pub fn predict(fit: &RegressionFit, x: &DesignMatrix) -> Result<Vec<f64>, RegressionError> {
    if x.labels() != fit.labels.as_slice() {
        return Err(RegressionError::LabelMismatch {
            expected: fit.labels.clone(),
            found: x.labels().to_vec(),
        });
    }
    Ok(x.matrix().mul_vec(&fit.coefficients).expect("labels match"))
}

/// Slope per predictor; in a log-log fit each slope is the elasticity.
pub fn elasticities(fit: &RegressionFit) -> Vec<(String, f64)> {
    fit.labels
        .iter()
        .zip(&fit.coefficients)
        .skip(1)
        .map(|(l, b)| (l.clone(), *b))
        .collect()
}
