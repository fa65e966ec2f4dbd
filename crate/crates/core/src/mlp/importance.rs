use serde::{Deserialize, Serialize};

use super::{MlpError, MlpModel, Samples};
use crate::panel::Variable;

/// Evenly spaced points per predictor sweep, spanning its observed range.
pub const IMPORTANCE_GRID: usize = 21;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub variables: Vec<Variable>,
    /// Non-negative, sums to 1.
    pub importance: Vec<f64>,
    /// Percent of the largest importance; the largest is exactly 100.
    pub normalized: Vec<f64>,
}

impl ImportanceReport {
    /// Variables from most to least important (stable on ties).
    pub fn ordering(&self) -> Vec<Variable> {
        let mut order: Vec<usize> = (0..self.variables.len()).collect();
        order.sort_by(|&a, &b| self.importance[b].total_cmp(&self.importance[a]));
        order.into_iter().map(|k| self.variables[k]).collect()
    }

    pub fn get(&self, var: Variable) -> Option<f64> {
        self.variables
            .iter()
            .position(|v| *v == var)
            .map(|k| self.importance[k])
    }
}

/// Sensitivity of the network output to each input.
///
/// For predictor `j` and every sample, `x_j` is swept over
/// [`IMPORTANCE_GRID`] points between the column's minimum and maximum with
/// the other inputs held at the sample's values; the output range
/// (max - min, summed over outputs) is averaged over samples. The averages
/// are then normalized to sum to one.
pub fn importance(model: &MlpModel, samples: &Samples, variables: &[Variable]) -> Result<ImportanceReport, MlpError> {
    if samples.is_empty() {
        return Err(MlpError::EmptyDataset);
    }
    let n_in = model.sizes.inputs;
    if samples.n_inputs() != n_in || variables.len() != n_in {
        return Err(MlpError::DimensionMismatch(format!(
            "{} variables / {}-wide samples for {n_in} inputs",
            variables.len(),
            samples.n_inputs()
        )));
    }
    let mut raw = vec![0.0; n_in];
    for (j, slot) in raw.iter_mut().enumerate() {
        let col = samples.input_column(j);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let grid: Vec<f64> = (0..IMPORTANCE_GRID)
            .map(|g| lo + (hi - lo) * g as f64 / (IMPORTANCE_GRID - 1) as f64)
            .collect();
        let mut total = 0.0;
        for i in 0..samples.len() {
            let mut x = samples.input(i).to_vec();
            let mut lo_out = vec![f64::INFINITY; model.sizes.outputs];
            let mut hi_out = vec![f64::NEG_INFINITY; model.sizes.outputs];
            for &v in &grid {
                x[j] = v;
                for (k, o) in model.forward(&x)?.into_iter().enumerate() {
                    lo_out[k] = lo_out[k].min(o);
                    hi_out[k] = hi_out[k].max(o);
                }
            }
            total += hi_out.iter().zip(&lo_out).map(|(h, l)| h - l).sum::<f64>();
        }
        *slot = total / samples.len() as f64;
    }
    let sum: f64 = raw.iter().sum();
    if sum.is_nan() || sum <= 0.0 {
        return Err(MlpError::ZeroSensitivity);
    }
    let importance: Vec<f64> = raw.iter().map(|v| v / sum).collect();
    let max = importance.iter().copied().fold(0.0, f64::max);
    let normalized = importance.iter().map(|v| 100.0 * (v / max)).collect();
    Ok(ImportanceReport {
        variables: variables.to_vec(),
        importance,
        normalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::LayerSizes;

    const VARS: [Variable; 3] = Variable::PREDICTORS;

    fn grid_samples() -> Samples {
        let mut x = Vec::new();
        for a in [-1.0, 0.0, 1.0] {
            for b in [-1.0, 0.0, 1.0] {
                x.extend([a, b, 0.5 * a - b]);
            }
        }
        let n = x.len() / 3;
        Samples::new(3, 1, x, vec![0.0; n]).unwrap()
    }

    #[test]
    fn disconnected_input_scores_zero() {
        let mut m = MlpModel::init(LayerSizes::default(), 5).unwrap();
        // column 2 of the hidden weight matrix
        m.hidden_weights[2] = 0.0;
        m.hidden_weights[5] = 0.0;
        let rep = importance(&m, &grid_samples(), &VARS).unwrap();
        assert_eq!(rep.importance[2], 0.0);
        assert!((rep.importance.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(rep.normalized.contains(&100.0));
    }

    #[test]
    fn symmetric_model_gives_equal_shares() {
        let mut m = MlpModel::init(LayerSizes::new(2, 2, 1), 1).unwrap();
        m.hidden_weights = vec![0.8, 0.3, 0.3, 0.8];
        m.hidden_bias = vec![0.0, 0.0];
        m.output_weights = vec![1.0, 1.0];
        let mut x = Vec::new();
        for a in [-1.0, -0.3, 0.4, 1.0] {
            for b in [-1.0, -0.3, 0.4, 1.0] {
                x.extend([a, b]);
            }
        }
        let s = Samples::new(2, 1, x, vec![0.0; 16]).unwrap();
        let rep = importance(&m, &s, &[Variable::Co2, Variable::Gdp]).unwrap();
        assert!((rep.importance[0] - 0.5).abs() < 1e-9);
        assert!((rep.importance[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn flat_or_empty_inputs() {
        let mut m = MlpModel::init(LayerSizes::default(), 5).unwrap();
        m.set_params(&[0.0; 11]).unwrap();
        assert_eq!(
            importance(&m, &grid_samples(), &VARS).unwrap_err(),
            MlpError::ZeroSensitivity
        );
        let empty = Samples::new(3, 1, vec![], vec![]).unwrap();
        assert_eq!(importance(&m, &empty, &VARS).unwrap_err(), MlpError::EmptyDataset);
    }
}
