use serde::{Deserialize, Serialize};

use super::{stepwise, RegressionError, RegressionFit, StepwiseConfig, StepwiseResult};
use crate::eval::{EnergyPredictor, EvalError};
use crate::panel::{PanelDataset, PanelError, PanelRecord, Variable};

/// A fitted regression that predicts from raw panel records.
///
/// On the log pipeline the fit is `ln y = b0 + sum b_j ln x_j` and
/// predictions are exponentiated back to natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionModel {
    pub target: Variable,
    pub predictors: Vec<Variable>,
    pub log_scale: bool,
    pub fit: RegressionFit,
}

impl RegressionModel {
    /// Run stepwise selection on `raw` (log-transformed first when `log_scale`).
    pub fn fit_stepwise(
        raw: &PanelDataset,
        target: Variable,
        candidates: &[Variable],
        log_scale: bool,
        config: StepwiseConfig,
    ) -> Result<(RegressionModel, StepwiseResult), RegressionError> {
        if raw.is_transformed() {
            return Err(PanelError::AlreadyTransformed.into());
        }
        let data = if log_scale { raw.log_transform()? } else { raw.clone() };
        let result = stepwise(&data, target, candidates, config)?;
        let predictors = result
            .selected()
            .iter()
            .map(|label| {
                *candidates
                    .iter()
                    .find(|v| v.label(log_scale) == *label)
                    .expect("selected labels come from the candidates")
            })
            .collect();
        let model = RegressionModel {
            target,
            predictors,
            log_scale,
            fit: result.final_fit.clone(),
        };
        Ok((model, result))
    }

    /// Prediction on the fitted scale (log scale on the log pipeline).
    pub fn predict_fitted_scale(&self, record: &PanelRecord) -> f64 {
        let mut acc = self.fit.intercept();
        for (var, beta) in self.predictors.iter().zip(&self.fit.coefficients[1..]) {
            let x = record.get(*var);
            acc += beta * if self.log_scale { x.ln() } else { x };
        }
        acc
    }

    pub fn predict_natural(&self, record: &PanelRecord) -> f64 {
        let v = self.predict_fitted_scale(record);
        if self.log_scale {
            v.exp()
        } else {
            v
        }
    }
}

impl EnergyPredictor for RegressionModel {
    fn label(&self) -> &str {
        "regression"
    }

    fn predict_record(&self, record: &PanelRecord) -> Result<f64, EvalError> {
        Ok(self.predict_natural(record))
    }
}
