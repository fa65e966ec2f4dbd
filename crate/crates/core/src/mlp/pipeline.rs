use serde::{Deserialize, Serialize};

use super::{importance, train_scg, ImportanceReport, LayerSizes, MlpError, MlpModel, TrainConfig, TrainReport};
use crate::eval::{EnergyPredictor, EvalError};
use crate::panel::{PanelDataset, PanelError, PanelRecord, Partition, Scaler, Variable};

/// Row-major input and target matrices for a set of samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    n_inputs: usize,
    n_outputs: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
}

impl Samples {
    pub fn new(n_inputs: usize, n_outputs: usize, inputs: Vec<f64>, targets: Vec<f64>) -> Result<Self, MlpError> {
        if n_inputs == 0 || n_outputs == 0 {
            return Err(MlpError::DimensionMismatch("zero-width samples".into()));
        }
        if !inputs.len().is_multiple_of(n_inputs)
            || !targets.len().is_multiple_of(n_outputs)
            || inputs.len() / n_inputs != targets.len() / n_outputs
        {
            return Err(MlpError::DimensionMismatch(format!(
                "{} input values and {} targets for widths {n_inputs}/{n_outputs}",
                inputs.len(),
                targets.len()
            )));
        }
        Ok(Self {
            n_inputs,
            n_outputs,
            inputs,
            targets,
        })
    }

    /// Standardized samples for the records at `idx`. `ds` must already be on
    /// the model scale (log-transformed when the pipeline is).
    pub fn from_panel(
        ds: &PanelDataset,
        idx: &[usize],
        input_scaler: &Scaler,
        target_scaler: &Scaler,
    ) -> Result<Self, MlpError> {
        let mut inputs = Vec::with_capacity(idx.len() * input_scaler.len());
        let mut targets = Vec::with_capacity(idx.len() * target_scaler.len());
        for &i in idx {
            let rec = ds.records().get(i).ok_or(PanelError::IndexOutOfRange {
                index: i,
                len: ds.len(),
            })?;
            for (k, var) in input_scaler.variables.iter().enumerate() {
                inputs.push(input_scaler.apply_one(k, rec.get(*var)));
            }
            for (k, var) in target_scaler.variables.iter().enumerate() {
                targets.push(target_scaler.apply_one(k, rec.get(*var)));
            }
        }
        Self::new(input_scaler.len(), target_scaler.len(), inputs, targets)
    }

    pub fn len(&self) -> usize {
        self.inputs.len() / self.n_inputs
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    #[inline]
    pub fn input(&self, i: usize) -> &[f64] {
        &self.inputs[i * self.n_inputs..(i + 1) * self.n_inputs]
    }

    #[inline]
    pub fn target(&self, i: usize) -> &[f64] {
        &self.targets[i * self.n_outputs..(i + 1) * self.n_outputs]
    }

    pub fn input_column(&self, j: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.input(i)[j]).collect()
    }
}

/// Settings for the end-to-end network pipeline on panel data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpPipelineConfig {
    pub inputs: Vec<Variable>,
    pub target: Variable,
    pub hidden: usize,
    pub seed: u64,
    pub log_transform: bool,
    pub train: TrainConfig,
}

impl Default for MlpPipelineConfig {
    fn default() -> Self {
        Self {
            inputs: Variable::PREDICTORS.to_vec(),
            target: Variable::EnergyUse,
            hidden: 2,
            seed: 1,
            log_transform: true,
            train: TrainConfig::default(),
        }
    }
}

/// Result of [`MlpModel::fit_pipeline`].
#[derive(Debug, Clone)]
pub struct MlpRun {
    pub model: MlpModel,
    pub report: TrainReport,
    /// Sensitivity over every record of the dataset.
    pub importance: ImportanceReport,
}

impl MlpModel {
    /// Log-transform (optionally), standardize on the training split, train with
    /// SCG and compute predictor importance.
    pub fn fit_pipeline(raw: &PanelDataset, split: &Partition, cfg: &MlpPipelineConfig) -> Result<MlpRun, MlpError> {
        if raw.is_transformed() {
            return Err(PanelError::AlreadyTransformed.into());
        }
        if split.len() != raw.len() {
            return Err(MlpError::DimensionMismatch(format!(
                "partition covers {} records, dataset has {}",
                split.len(),
                raw.len()
            )));
        }
        if split.train_idx.is_empty() {
            return Err(MlpError::EmptySplit("training".into()));
        }
        let data = if cfg.log_transform {
            raw.log_transform()?
        } else {
            raw.clone()
        };
        let input_scaler = Scaler::fit(&data, &split.train_idx, &cfg.inputs)?;
        let target_scaler = Scaler::fit(&data, &split.train_idx, &[cfg.target])?;

        let sizes = LayerSizes::new(cfg.inputs.len(), cfg.hidden, 1);
        let mut model = MlpModel::init(sizes, cfg.seed)?;
        model.log_transformed = cfg.log_transform;

        let samples = |idx: &[usize]| Samples::from_panel(&data, idx, &input_scaler, &target_scaler);
        let train = samples(&split.train_idx)?;
        let test = samples(&split.test_idx)?;
        let holdout = samples(&split.holdout_idx)?;
        let (mut model, report) = train_scg(&model, &train, &[("test", &test), ("holdout", &holdout)], &cfg.train)?;
        model.input_scaler = Some(input_scaler.clone());
        model.target_scaler = Some(target_scaler.clone());

        let all: Vec<usize> = (0..data.len()).collect();
        let importance = importance(&model, &samples(&all)?, &cfg.inputs)?;
        Ok(MlpRun {
            model,
            report,
            importance,
        })
    }

    fn scalers(&self) -> Result<(&Scaler, &Scaler), MlpError> {
        match (&self.input_scaler, &self.target_scaler) {
            (Some(i), Some(t)) => Ok((i, t)),
            _ => Err(MlpError::MissingScaler),
        }
    }

    /// Standardized samples for raw records at `idx`, using this model's scalers.
    pub fn samples_for(&self, raw: &PanelDataset, idx: &[usize]) -> Result<Samples, MlpError> {
        let (input, target) = self.scalers()?;
        let data = if self.log_transformed {
            raw.log_transform()?
        } else {
            raw.clone()
        };
        Samples::from_panel(&data, idx, input, target)
    }

    /// Natural-unit prediction from raw input values in scaler variable order.
    pub fn predict_natural(&self, raw_inputs: &[f64]) -> Result<f64, MlpError> {
        let (input, target) = self.scalers()?;
        let model_scale: Vec<f64> = if self.log_transformed {
            raw_inputs.iter().map(|v| v.ln()).collect()
        } else {
            raw_inputs.to_vec()
        };
        let z = input.apply(&model_scale)?;
        let out = self.forward(&z)?;
        let y = target.invert_one(0, out[0]);
        Ok(if self.log_transformed { y.exp() } else { y })
    }

    pub fn predict_panel_record(&self, record: &PanelRecord) -> Result<f64, MlpError> {
        let (input, _) = self.scalers()?;
        let raw: Vec<f64> = input.variables.iter().map(|v| record.get(*v)).collect();
        self.predict_natural(&raw)
    }
}

impl EnergyPredictor for MlpModel {
    fn label(&self) -> &str {
        "mlp"
    }

    fn predict_record(&self, record: &PanelRecord) -> Result<f64, EvalError> {
        self.predict_panel_record(record)
            .map_err(|e| EvalError::Predictor(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::partition;

    fn toy_panel() -> PanelDataset {
        let records = (0..30)
            .map(|i| {
                let t = i as f64;
                PanelRecord {
                    country: if i < 15 { "A".into() } else { "B".into() },
                    year: 1995 + (i % 15),
                    co2: 2.0 + (t * 0.37).sin().abs() * 3.0,
                    gdp: 1000.0 + 90.0 * t,
                    energy_use: 500.0 + 40.0 * t + 3.0 * (t * 1.3).cos(),
                    population: 1e6 + 1e4 * ((t * 0.7).cos() + 2.0),
                }
            })
            .collect();
        PanelDataset::new(records, false).unwrap()
    }

    #[test]
    fn samples_shape_checks() {
        assert!(Samples::new(2, 1, vec![1.0, 2.0, 3.0], vec![1.0]).is_err());
        let s = Samples::new(2, 1, vec![1.0, 2.0, 3.0, 4.0], vec![5.0, 6.0]).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.input(1), [3.0, 4.0]);
        assert_eq!(s.input_column(0), [1.0, 3.0]);
    }

    #[test]
    fn zero_network_predicts_geometric_training_mean() {
        let raw = toy_panel();
        let split = partition(raw.len(), [0.7, 0.18, 0.12], 4).unwrap();
        let ln = raw.log_transform().unwrap();
        let mut m = MlpModel::init(LayerSizes::default(), 1).unwrap();
        m.set_params(&[0.0; 11]).unwrap();
        m.log_transformed = true;
        m.input_scaler = Some(Scaler::fit(&ln, &split.train_idx, &Variable::PREDICTORS).unwrap());
        m.target_scaler = Some(Scaler::fit(&ln, &split.train_idx, &[Variable::EnergyUse]).unwrap());
        let mean_ln_eu = m.target_scaler.as_ref().unwrap().mean[0];
        let means = &m.input_scaler.as_ref().unwrap().mean;
        let raw_inputs: Vec<f64> = means.iter().map(|v| v.exp()).collect();
        let pred = m.predict_natural(&raw_inputs).unwrap();
        assert!((pred - mean_ln_eu.exp()).abs() < 1e-9 * pred);
    }

    #[test]
    fn prediction_matches_manual_route() {
        let raw = toy_panel();
        let split = partition(raw.len(), [0.7, 0.18, 0.12], 2).unwrap();
        let cfg = MlpPipelineConfig {
            train: TrainConfig {
                max_epochs: 50,
                ..TrainConfig::default()
            },
            ..Default::default()
        };
        let run = MlpModel::fit_pipeline(&raw, &split, &cfg).unwrap();
        let i = split.train_idx[0];
        let s = run.model.samples_for(&raw, &[i]).unwrap();
        let z = run.model.forward(s.input(0)).unwrap()[0];
        let manual = run.model.target_scaler.as_ref().unwrap().invert_one(0, z).exp();
        let direct = run.model.predict_panel_record(&raw.records()[i]).unwrap();
        assert!((manual - direct).abs() <= 1e-12 * direct);
    }

    #[test]
    fn bare_network_has_no_scalers() {
        let m = MlpModel::init(LayerSizes::default(), 1).unwrap();
        assert_eq!(
            m.predict_natural(&[1.0, 2.0, 3.0]).unwrap_err(),
            MlpError::MissingScaler
        );
    }
}
