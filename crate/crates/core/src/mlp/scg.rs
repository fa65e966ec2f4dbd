//! Scaled conjugate gradient (Møller, 1993) over the full training batch.
//!
//! Each epoch is one SCG iteration: a finite-difference estimate of the
//! curvature along the current direction, a Levenberg-Marquardt style
//! adjustment of the scale `lambda`, and a step that is kept only when the
//! comparison parameter is non-negative. No line search is performed.

use serde::{Deserialize, Serialize};

use super::{MlpError, MlpModel, Samples};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub max_epochs: usize,
    /// Consecutive accepted steps without a decrease that end training.
    pub patience: usize,
    /// A decrease smaller than this counts as no decrease.
    pub tolerance: f64,
    /// Finite-difference scale for the curvature estimate.
    pub sigma: f64,
    pub lambda_init: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            max_epochs: 1000,
            patience: 1,
            tolerance: 1e-12,
            sigma: 5e-5,
            lambda_init: 5e-7,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), MlpError> {
        if self.max_epochs == 0 {
            return Err(MlpError::BadConfig("max_epochs must be at least 1".into()));
        }
        if self.patience == 0 {
            return Err(MlpError::BadConfig("patience must be at least 1".into()));
        }
        if !(self.sigma > 0.0 && self.lambda_init > 0.0 && self.tolerance >= 0.0) {
            return Err(MlpError::BadConfig("sigma and lambda must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The training error stopped decreasing for `patience` accepted steps.
    NoDecrease,
    MaxEpochs,
    ZeroGradient,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitError {
    pub split: String,
    pub n: usize,
    pub sse: f64,
    /// Absent for an empty split or a constant target.
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub splits: Vec<SplitError>,
    pub epochs: usize,
    pub accepted_steps: usize,
    pub stop_reason: StopReason,
    /// Training SSE before the first epoch and after each epoch.
    pub trajectory: Vec<f64>,
    /// Training SSE after each accepted step, starting from the initial value.
    pub accepted_trajectory: Vec<f64>,
}

impl TrainReport {
    pub fn split(&self, name: &str) -> Option<&SplitError> {
        self.splits.iter().find(|s| s.split == name)
    }

    pub fn relative_error(&self, name: &str) -> Option<f64> {
        self.split(name).and_then(|s| s.relative_error)
    }

    /// CSV with header `epoch,train_sse`; epoch 0 is the initial network.
    pub fn loss_csv(&self) -> String {
        let mut out = String::from("epoch,train_sse\n");
        for (e, v) in self.trajectory.iter().enumerate() {
            out.push_str(&format!("{e},{v}\n"));
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct Objective<'a> {
    model: MlpModel,
    train: &'a Samples,
}

impl Objective<'_> {
    fn loss(&mut self, w: &[f64]) -> f64 {
        self.model.set_params(w).expect("fixed length");
        self.model.sse_loss(self.train).expect("shapes checked")
    }

    fn grad(&mut self, w: &[f64]) -> Vec<f64> {
        self.model.set_params(w).expect("fixed length");
        self.model.gradient(self.train).expect("shapes checked")
    }
}

const LAMBDA_MIN: f64 = 1e-15;
const LAMBDA_MAX: f64 = 1e100;

/// Train a copy of `model` on `train`; error figures are also reported for
/// every named split in `others`.
pub fn train_scg(
    model: &MlpModel,
    train: &Samples,
    others: &[(&str, &Samples)],
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainReport), MlpError> {
    cfg.validate()?;
    if train.is_empty() {
        return Err(MlpError::EmptySplit("training".into()));
    }
    model.sse_loss(train)?;

    let n = model.param_count();
    let mut obj = Objective {
        model: model.clone(),
        train,
    };
    let mut w = model.params();
    let mut err = obj.loss(&w);
    if !err.is_finite() {
        return Err(MlpError::NonFiniteLoss {
            epoch: 0,
            last_sse: err,
        });
    }
    let mut g = obj.grad(&w);
    let mut r: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut p = r.clone();
    let mut lambda = cfg.lambda_init;
    let mut lambda_bar = 0.0;
    let mut success = true;
    let mut delta = 0.0;

    let mut trajectory = vec![err];
    let mut accepted_trajectory = vec![err];
    let mut accepted = 0usize;
    let mut flat_steps = 0usize;
    let mut stop = StopReason::MaxEpochs;
    let mut epochs = 0usize;

    for epoch in 1..=cfg.max_epochs {
        epochs = epoch;
        let p2 = dot(&p, &p);
        if p2 == 0.0 {
            stop = StopReason::ZeroGradient;
            trajectory.push(err);
            break;
        }
        if success {
            let sigma_k = cfg.sigma / p2.sqrt();
            let w_probe: Vec<f64> = w.iter().zip(&p).map(|(a, b)| a + sigma_k * b).collect();
            let g_probe = obj.grad(&w_probe);
            let s: Vec<f64> = g_probe.iter().zip(&g).map(|(a, b)| (a - b) / sigma_k).collect();
            delta = dot(&p, &s);
        }
        delta += (lambda - lambda_bar) * p2;
        if delta <= 0.0 {
            // make the Hessian estimate positive definite
            lambda_bar = 2.0 * (lambda - delta / p2);
            delta = -delta + lambda * p2;
            lambda = lambda_bar;
        }

        let mu = dot(&p, &r);
        if mu <= 0.0 {
            // not a descent direction: restart along steepest descent
            p = r.clone();
            success = true;
            lambda_bar = 0.0;
            trajectory.push(err);
            continue;
        }
        let alpha = mu / delta;
        let w_new: Vec<f64> = w.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
        let err_new = obj.loss(&w_new);
        let comparison = if err_new.is_finite() {
            2.0 * delta * (err - err_new) / (mu * mu)
        } else {
            f64::NEG_INFINITY
        };

        if comparison >= 0.0 {
            let decrease = err - err_new;
            w = w_new;
            err = err_new;
            let g_new = obj.grad(&w);
            let r_new: Vec<f64> = g_new.iter().map(|v| -v).collect();
            lambda_bar = 0.0;
            success = true;
            accepted += 1;
            accepted_trajectory.push(err);

            if accepted.is_multiple_of(n) {
                p = r_new.clone();
            } else {
                let beta = (dot(&r_new, &r_new) - dot(&r_new, &r)) / mu;
                p = r_new.iter().zip(&p).map(|(a, b)| a + beta * b).collect();
            }
            r = r_new;
            g = g_new;
            if comparison >= 0.75 {
                lambda = (0.25 * lambda).max(LAMBDA_MIN);
            }

            if decrease < cfg.tolerance {
                flat_steps += 1;
            } else {
                flat_steps = 0;
            }
        } else {
            lambda_bar = lambda;
            success = false;
        }
        if comparison < 0.25 {
            let bump = if comparison.is_finite() {
                delta * (1.0 - comparison) / p2
            } else {
                // overflowed trial step: grow lambda aggressively
                4.0 * lambda.max(LAMBDA_MIN)
            };
            lambda = (lambda + bump).min(LAMBDA_MAX);
        }

        trajectory.push(err);
        if !err.is_finite() {
            return Err(MlpError::NonFiniteLoss { epoch, last_sse: err });
        }
        if flat_steps >= cfg.patience {
            stop = StopReason::NoDecrease;
            break;
        }
        if r.iter().all(|v| *v == 0.0) {
            stop = StopReason::ZeroGradient;
            break;
        }
    }

    let mut trained = model.clone();
    trained.set_params(&w)?;
    let mut splits = vec![split_error(&trained, "train", train)?];
    for (name, samples) in others {
        splits.push(split_error(&trained, name, samples)?);
    }
    Ok((
        trained,
        TrainReport {
            splits,
            epochs,
            accepted_steps: accepted,
            stop_reason: stop,
            trajectory,
            accepted_trajectory,
        },
    ))
}

fn split_error(model: &MlpModel, name: &str, samples: &Samples) -> Result<SplitError, MlpError> {
    if samples.is_empty() {
        return Ok(SplitError {
            split: name.to_string(),
            n: 0,
            sse: 0.0,
            relative_error: None,
        });
    }
    let sse = model.sse_loss(samples)?;
    let relative_error = match model.relative_error(samples) {
        Ok(v) => Some(v),
        Err(MlpError::ConstantTarget) => None,
        Err(e) => return Err(e),
    };
    Ok(SplitError {
        split: name.to_string(),
        n: samples.len(),
        sse,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mlp::LayerSizes;
    use crate::rng::SplitMix64;

    fn random_samples(seed: u64, n: usize) -> Samples {
        let mut rng = SplitMix64::new(seed);
        let x: Vec<f64> = (0..3 * n).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let y: Vec<f64> = (0..n)
            .map(|i| (x[3 * i] - 0.5 * x[3 * i + 1]).tanh() + 0.2 * x[3 * i + 2])
            .collect();
        Samples::new(3, 1, x, y).unwrap()
    }

    #[test]
    fn accepted_errors_never_increase() {
        for seed in 0..5 {
            let train = random_samples(seed, 40);
            let m = MlpModel::init(LayerSizes::default(), seed).unwrap();
            let cfg = TrainConfig {
                max_epochs: 300,
                ..TrainConfig::default()
            };
            let (trained, report) = train_scg(&m, &train, &[], &cfg).unwrap();
            for pair in report.accepted_trajectory.windows(2) {
                assert!(pair[1] <= pair[0]);
            }
            for pair in report.trajectory.windows(2) {
                assert!(pair[1] <= pair[0]);
            }
            assert_eq!(report.trajectory.len(), report.epochs + 1);
            assert!(report.epochs >= 1);
            let last = *report.trajectory.last().unwrap();
            assert_eq!(trained.sse_loss(&train).unwrap(), last);
            assert!(last < report.trajectory[0]);
        }
    }

    #[test]
    fn reports_every_split() {
        let train = random_samples(1, 30);
        let test = random_samples(2, 8);
        let empty = Samples::new(3, 1, vec![], vec![]).unwrap();
        let m = MlpModel::init(LayerSizes::default(), 3).unwrap();
        let (_, report) = train_scg(
            &m,
            &train,
            &[("test", &test), ("holdout", &empty)],
            &TrainConfig::default(),
        )
        .unwrap();
        assert_eq!(report.splits.len(), 3);
        assert!(report.relative_error("train").unwrap() >= 0.0);
        assert!(report.relative_error("test").is_some());
        assert_eq!(report.split("holdout").unwrap().relative_error, None);
        assert!(report.loss_csv().starts_with("epoch,train_sse\n0,"));
    }

    #[test]
    fn config_and_split_errors() {
        let train = random_samples(1, 10);
        let m = MlpModel::init(LayerSizes::default(), 3).unwrap();
        let cfg = TrainConfig {
            max_epochs: 0,
            ..TrainConfig::default()
        };
        assert!(matches!(train_scg(&m, &train, &[], &cfg), Err(MlpError::BadConfig(_))));
        let empty = Samples::new(3, 1, vec![], vec![]).unwrap();
        assert!(matches!(
            train_scg(&m, &empty, &[], &TrainConfig::default()),
            Err(MlpError::EmptySplit(_))
        ));
    }

    #[test]
    fn overflowing_weights_are_reported() {
        let train = random_samples(1, 10);
        let mut m = MlpModel::init(LayerSizes::default(), 3).unwrap();
        m.output_bias[0] = f64::INFINITY;
        assert!(matches!(
            train_scg(&m, &train, &[], &TrainConfig::default()),
            Err(MlpError::NonFiniteLoss { epoch: 0, .. })
        ));
    }
}
