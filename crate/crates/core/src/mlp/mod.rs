//! Single-hidden-layer perceptron with tanh hidden units and a linear output.
//!
//! Parameters are flattened in this order, each block row-major:
//! hidden weights (`hidden x inputs`), hidden biases, output weights
//! (`outputs x hidden`), output biases.

mod importance;
mod pipeline;
mod scg;

pub use importance::{importance, ImportanceReport, IMPORTANCE_GRID};
pub use pipeline::{MlpPipelineConfig, MlpRun, Samples};
pub use scg::{train_scg, SplitError, StopReason, TrainConfig, TrainReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::panel::{PanelError, Scaler};
use crate::rng::SplitMix64;

pub const MODEL_FORMAT: &str = "energy-models/mlp";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MlpError {
    #[error("layer sizes must all be at least 1, got {0:?}")]
    BadLayerSizes(LayerSizes),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0} split is empty")]
    EmptySplit(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("target is constant over the split; relative error undefined")]
    ConstantTarget,
    #[error("loss became non-finite at epoch {epoch} (last finite training SSE {last_sse})")]
    NonFiniteLoss { epoch: usize, last_sse: f64 },
    #[error("model has no fitted scalers")]
    MissingScaler,
    #[error("model output does not vary with any input")]
    ZeroSensitivity,
    #[error("invalid training configuration: {0}")]
    BadConfig(String),
    #[error("unsupported model document {format} v{version}")]
    IncompatibleVersion { format: String, version: u32 },
    #[error("model json: {0}")]
    Json(String),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerSizes {
    pub inputs: usize,
    pub hidden: usize,
    pub outputs: usize,
}

impl LayerSizes {
    pub const fn new(inputs: usize, hidden: usize, outputs: usize) -> Self {
        Self {
            inputs,
            hidden,
            outputs,
        }
    }

    pub fn param_count(&self) -> usize {
        self.hidden * (self.inputs + 1) + self.outputs * (self.hidden + 1)
    }
}

impl Default for LayerSizes {
    fn default() -> Self {
        Self::new(3, 2, 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub sizes: LayerSizes,
    pub hidden_weights: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: Vec<f64>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    /// Fitted on the training split; absent for a bare network.
    pub input_scaler: Option<Scaler>,
    pub target_scaler: Option<Scaler>,
    /// Inputs and target are natural logs of the raw panel values.
    pub log_transformed: bool,
    pub seed: u64,
}

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    format: String,
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    input_fingerprint: Option<String>,
    model: MlpModel,
}

impl MlpModel {
    /// Weights uniform in `[-0.5, 0.5)` drawn from [`SplitMix64`] in flattened order; biases zero.
    pub fn init(sizes: LayerSizes, seed: u64) -> Result<Self, MlpError> {
        if sizes.inputs == 0 || sizes.hidden == 0 || sizes.outputs == 0 {
            return Err(MlpError::BadLayerSizes(sizes));
        }
        let mut rng = SplitMix64::new(seed);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.uniform_in(-0.5, 0.5)).collect() };
        let hidden_weights = draw(sizes.hidden * sizes.inputs);
        let output_weights = draw(sizes.outputs * sizes.hidden);
        Ok(Self {
            sizes,
            hidden_weights,
            hidden_bias: vec![0.0; sizes.hidden],
            output_weights,
            output_bias: vec![0.0; sizes.outputs],
            hidden_activation: Activation::Tanh,
            output_activation: Activation::Identity,
            input_scaler: None,
            target_scaler: None,
            log_transformed: false,
            seed,
        })
    }

    pub fn param_count(&self) -> usize {
        self.sizes.param_count()
    }

    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        out.extend_from_slice(&self.hidden_weights);
        out.extend_from_slice(&self.hidden_bias);
        out.extend_from_slice(&self.output_weights);
        out.extend_from_slice(&self.output_bias);
        out
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<(), MlpError> {
        if params.len() != self.param_count() {
            return Err(MlpError::DimensionMismatch(format!(
                "{} parameters for a model with {}",
                params.len(),
                self.param_count()
            )));
        }
        let LayerSizes {
            inputs,
            hidden,
            outputs,
        } = self.sizes;
        let (hw, rest) = params.split_at(hidden * inputs);
        let (hb, rest) = rest.split_at(hidden);
        let (ow, ob) = rest.split_at(outputs * hidden);
        self.hidden_weights.copy_from_slice(hw);
        self.hidden_bias.copy_from_slice(hb);
        self.output_weights.copy_from_slice(ow);
        self.output_bias.copy_from_slice(ob);
        Ok(())
    }

    fn hidden_layer(&self, x: &[f64], h: &mut [f64]) {
        let n_in = self.sizes.inputs;
        for (j, hj) in h.iter_mut().enumerate() {
            let row = &self.hidden_weights[j * n_in..(j + 1) * n_in];
            let a = self.hidden_bias[j] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            *hj = self.hidden_activation.apply(a);
        }
    }

    fn output_layer(&self, h: &[f64], out: &mut [f64]) {
        let n_h = self.sizes.hidden;
        for (k, ok) in out.iter_mut().enumerate() {
            let row = &self.output_weights[k * n_h..(k + 1) * n_h];
            let a = self.output_bias[k] + row.iter().zip(h).map(|(w, v)| w * v).sum::<f64>();
            *ok = self.output_activation.apply(a);
        }
    }

    /// Network output for one standardized input vector.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, MlpError> {
        if x.len() != self.sizes.inputs {
            return Err(MlpError::DimensionMismatch(format!(
                "input of length {} for {} input units",
                x.len(),
                self.sizes.inputs
            )));
        }
        let mut h = vec![0.0; self.sizes.hidden];
        let mut out = vec![0.0; self.sizes.outputs];
        self.hidden_layer(x, &mut h);
        self.output_layer(&h, &mut out);
        Ok(out)
    }

    fn check_samples(&self, samples: &Samples) -> Result<(), MlpError> {
        if samples.n_inputs() != self.sizes.inputs || samples.n_outputs() != self.sizes.outputs {
            return Err(MlpError::DimensionMismatch(format!(
                "samples are {}->{} but the network is {}->{}",
                samples.n_inputs(),
                samples.n_outputs(),
                self.sizes.inputs,
                self.sizes.outputs
            )));
        }
        Ok(())
    }

    /// Sum of squared errors over all samples and outputs.
    pub fn sse_loss(&self, samples: &Samples) -> Result<f64, MlpError> {
        self.check_samples(samples)?;
        let mut h = vec![0.0; self.sizes.hidden];
        let mut out = vec![0.0; self.sizes.outputs];
        let mut sse = 0.0;
        for i in 0..samples.len() {
            self.hidden_layer(samples.input(i), &mut h);
            self.output_layer(&h, &mut out);
            sse += out
                .iter()
                .zip(samples.target(i))
                .map(|(o, y)| (y - o).powi(2))
                .sum::<f64>();
        }
        Ok(sse)
    }

    /// Exact gradient of [`sse_loss`](Self::sse_loss) in flattened parameter order.
    pub fn gradient(&self, samples: &Samples) -> Result<Vec<f64>, MlpError> {
        self.check_samples(samples)?;
        let LayerSizes {
            inputs,
            hidden,
            outputs,
        } = self.sizes;
        let mut grad = vec![0.0; self.param_count()];
        let (g_hw, rest) = grad.split_at_mut(hidden * inputs);
        let (g_hb, rest) = rest.split_at_mut(hidden);
        let (g_ow, g_ob) = rest.split_at_mut(outputs * hidden);

        let mut h = vec![0.0; hidden];
        let mut out = vec![0.0; outputs];
        let mut d_out = vec![0.0; outputs];
        let mut d_hid = vec![0.0; hidden];
        for i in 0..samples.len() {
            let x = samples.input(i);
            self.hidden_layer(x, &mut h);
            self.output_layer(&h, &mut out);
            for k in 0..outputs {
                d_out[k] =
                    2.0 * (out[k] - samples.target(i)[k]) * self.output_activation.derivative_from_output(out[k]);
            }
            d_hid.iter_mut().for_each(|d| *d = 0.0);
            for k in 0..outputs {
                g_ob[k] += d_out[k];
                for j in 0..hidden {
                    g_ow[k * hidden + j] += d_out[k] * h[j];
                    d_hid[j] += d_out[k] * self.output_weights[k * hidden + j];
                }
            }
            for j in 0..hidden {
                let d = d_hid[j] * self.hidden_activation.derivative_from_output(h[j]);
                g_hb[j] += d;
                for (m, xm) in x.iter().enumerate() {
                    g_hw[j * inputs + m] += d * xm;
                }
            }
        }
        Ok(grad)
    }

    /// `SSE(model) / SSE(split mean)`, summed over outputs.
    pub fn relative_error(&self, samples: &Samples) -> Result<f64, MlpError> {
        if samples.is_empty() {
            return Err(MlpError::EmptySplit("evaluation".into()));
        }
        let sse = self.sse_loss(samples)?;
        let n = samples.len() as f64;
        let mut baseline = 0.0;
        for k in 0..samples.n_outputs() {
            let mean = (0..samples.len()).map(|i| samples.target(i)[k]).sum::<f64>() / n;
            baseline += (0..samples.len())
                .map(|i| (samples.target(i)[k] - mean).powi(2))
                .sum::<f64>();
        }
        if baseline <= 0.0 {
            return Err(MlpError::ConstantTarget);
        }
        Ok(sse / baseline)
    }

    /// Versioned JSON document with the model and its scalers.
    pub fn to_json(&self) -> String {
        self.to_json_document(None)
    }

    /// Like [`to_json`](Self::to_json), tagged with the fingerprint of the training data.
    pub fn to_json_document(&self, input_fingerprint: Option<&str>) -> String {
        let doc = ModelDocument {
            format: MODEL_FORMAT.to_string(),
            version: MODEL_VERSION,
            input_fingerprint: input_fingerprint.map(str::to_string),
            model: self.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MlpError> {
        Self::from_json_document(text).map(|(m, _)| m)
    }

    /// Parse a model document, returning the model and its data fingerprint if present.
    pub fn from_json_document(text: &str) -> Result<(Self, Option<String>), MlpError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| MlpError::Json(e.to_string()))?;
        let format = value["format"].as_str().unwrap_or_default().to_string();
        let version = value["version"].as_u64().unwrap_or(0) as u32;
        if format != MODEL_FORMAT || version != MODEL_VERSION {
            return Err(MlpError::IncompatibleVersion { format, version });
        }
        let doc: ModelDocument = serde_json::from_value(value).map_err(|e| MlpError::Json(e.to_string()))?;
        let m = doc.model.clone();
        let s = m.sizes;
        if m.hidden_weights.len() != s.hidden * s.inputs
            || m.hidden_bias.len() != s.hidden
            || m.output_weights.len() != s.outputs * s.hidden
            || m.output_bias.len() != s.outputs
        {
            return Err(MlpError::DimensionMismatch(
                "weight arrays disagree with layer sizes".into(),
            ));
        }
        Ok((m, doc.input_fingerprint))
    }
}
