//! Subcommand implementations.

use std::io::Write;
use std::path::{Path, PathBuf};

use energy_models::eval::{self, series_csv};
use energy_models::linreg::{Action, RegressionModel, StepwiseConfig, StepwiseResult};
use energy_models::mlp::{MlpModel, MlpPipelineConfig, TrainConfig, MODEL_FORMAT};
use energy_models::panel::{partition, Partition};
use energy_models::{
    compare, descriptive_stats, elasticities, evaluate, parse_csv, snapshot, EnergyPredictor, EvalReport, PanelDataset,
    Variable,
};
use serde::{Deserialize, Serialize};

use crate::config::{EvalSubset, RunConfig};
use crate::error::CliError;
use crate::Command;

pub const REGRESSION_FORMAT: &str = "energy-models/regression";
pub const REGRESSION_VERSION: u32 = 1;

/// Saved regression, as written by `fit-reg`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionArtifact {
    pub format: String,
    pub version: u32,
    pub input_fingerprint: String,
    pub log_transform: bool,
    pub model: RegressionModel,
    pub stepwise: StepwiseResult,
    /// Slopes of the log-log fit, largest first; absent on raw variables.
    pub elasticities: Option<Vec<Elasticity>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Elasticity {
    pub variable: String,
    pub elasticity: f64,
}

pub fn execute(command: &Command, stdout: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Describe(args) => describe(&args.resolve()?, stdout),
        Command::FitReg(args) => fit_reg(&args.resolve()?, stdout),
        Command::FitMlp(args) => fit_mlp(&args.resolve()?, stdout),
        Command::Compare { common, models } => compare_models(&common.resolve()?, models, stdout),
        Command::Predict { common, model } => predict(&common.resolve()?, model, stdout),
    }
}

fn input_label(cfg: &RunConfig) -> PathBuf {
    cfg.input.clone().unwrap_or_else(|| PathBuf::from("<bundled snapshot>"))
}

/// The configured panel, or the bundled snapshot when no input is given.
pub fn load_input(cfg: &RunConfig) -> Result<PanelDataset, CliError> {
    let Some(path) = &cfg.input else {
        return Ok(snapshot::balkan_panel());
    };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    parse_csv(&text).map_err(|source| CliError::Data {
        path: path.clone(),
        source,
    })
}

fn eval_index(cfg: &RunConfig, ds: &PanelDataset) -> Result<Vec<usize>, CliError> {
    if cfg.eval_on == EvalSubset::All {
        return Ok((0..ds.len()).collect());
    }
    let p = partition(ds.len(), cfg.split, cfg.seed)?;
    Ok(match cfg.eval_on {
        EvalSubset::Train => p.train_idx,
        EvalSubset::Test => p.test_idx,
        EvalSubset::Holdout => p.holdout_idx,
        EvalSubset::All => unreachable!(),
    })
}

struct Output<'a> {
    dir: &'a Path,
    written: Vec<PathBuf>,
}

impl<'a> Output<'a> {
    fn create(dir: &'a Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        self.written.push(path);
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serializes");
        text.push('\n');
        self.write(name, &text)
    }

    fn report(&self, stdout: &mut dyn Write) {
        for p in &self.written {
            let _ = writeln!(stdout, "wrote {}", p.display());
        }
    }
}

fn describe(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ds = load_input(cfg)?;
    let stats = descriptive_stats(&ds)?;
    let mut out = Output::create(&cfg.out)?;
    out.write("stats.csv", &stats.to_csv())?;
    out.json("stats.json", &stats)?;

    let _ = writeln!(
        stdout,
        "{}: {} records, {} countries",
        input_label(cfg).display(),
        ds.len(),
        ds.countries().len()
    );
    let _ = writeln!(
        stdout,
        "{:<24} {:<20} {:>14} {:>14}",
        "country", "variable", "mean", "sd"
    );
    for r in &stats.rows {
        let _ = writeln!(
            stdout,
            "{:<24} {:<20} {:>14.3} {:>14.3}",
            r.country,
            r.variable.name(),
            r.mean,
            r.sd
        );
    }
    out.report(stdout);
    Ok(())
}

fn action_name(a: Action) -> &'static str {
    match a {
        Action::Enter => "enter",
        Action::Remove => "remove",
    }
}

fn fit_reg(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ds = load_input(cfg)?;
    let step_cfg = StepwiseConfig {
        alpha_enter: cfg.alpha_enter,
        alpha_remove: cfg.alpha_remove,
    };
    let (model, result) = RegressionModel::fit_stepwise(
        &ds,
        Variable::EnergyUse,
        &Variable::PREDICTORS,
        cfg.log_transform,
        step_cfg,
    )?;
    let elasticity_list = cfg.log_transform.then(|| {
        let mut e: Vec<Elasticity> = elasticities(&model.fit)
            .into_iter()
            .map(|(variable, elasticity)| Elasticity { variable, elasticity })
            .collect();
        e.sort_by(|a, b| b.elasticity.total_cmp(&a.elasticity));
        e
    });
    let idx = eval_index(cfg, &ds)?;
    let report = evaluate(&model, &ds, &idx)?;

    let artifact = RegressionArtifact {
        format: REGRESSION_FORMAT.to_string(),
        version: REGRESSION_VERSION,
        input_fingerprint: ds.fingerprint(),
        log_transform: cfg.log_transform,
        model: model.clone(),
        stepwise: result.clone(),
        elasticities: elasticity_list.clone(),
    };

    let mut out = Output::create(&cfg.out)?;
    out.json("regression.json", &artifact)?;
    let mut trace = String::from("step,action,variable,f,p\n");
    for s in &result.trace {
        trace.push_str(&format!(
            "{},{},{},{},{}\n",
            s.step,
            action_name(s.action),
            s.variable,
            s.f,
            s.p
        ));
    }
    out.write("stepwise_trace.csv", &trace)?;
    if let Some(list) = &elasticity_list {
        let mut csv = String::from("variable,elasticity\n");
        for e in list {
            csv.push_str(&format!("{},{}\n", e.variable, e.elasticity));
        }
        out.write("elasticities.csv", &csv)?;
    }
    out.json("eval_regression.json", &report)?;
    out.write("series_regression.csv", &report.series_csv())?;

    let fit = &model.fit;
    let _ = writeln!(
        stdout,
        "stepwise regression of {} (n = {}, R2 = {:.3}, F = {:.3}, p = {:.3})",
        Variable::EnergyUse.label(cfg.log_transform),
        fit.n_obs,
        fit.r2,
        fit.f.unwrap_or(f64::NAN),
        fit.f_p.unwrap_or(f64::NAN),
    );
    let _ = writeln!(
        stdout,
        "{:<22} {:>10} {:>10} {:>10} {:>8}",
        "variable", "B", "SE", "t", "p"
    );
    for k in 0..fit.labels.len() {
        let _ = writeln!(
            stdout,
            "{:<22} {:>10.3} {:>10.3} {:>10.3} {:>8.3}",
            fit.labels[k], fit.coefficients[k], fit.se[k], fit.t[k], fit.p[k]
        );
    }
    let _ = writeln!(stdout, "rmse {:.3}  mape {:.3}%", report.rmse, report.mape);
    out.report(stdout);
    Ok(())
}

/// Pipeline settings implied by the run configuration.
pub fn mlp_config(cfg: &RunConfig) -> MlpPipelineConfig {
    MlpPipelineConfig {
        inputs: Variable::PREDICTORS.to_vec(),
        target: Variable::EnergyUse,
        hidden: cfg.hidden,
        seed: cfg.seed,
        log_transform: cfg.log_transform,
        train: TrainConfig {
            max_epochs: cfg.max_epochs,
            patience: cfg.patience,
            ..TrainConfig::default()
        },
    }
}

fn fit_mlp(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ds = load_input(cfg)?;
    let split: Partition = partition(ds.len(), cfg.split, cfg.seed)?;
    let run = MlpModel::fit_pipeline(&ds, &split, &mlp_config(cfg))?;
    let idx = eval_index(cfg, &ds)?;
    let report = evaluate(&run.model, &ds, &idx)?;

    let mut out = Output::create(&cfg.out)?;
    let mut doc = run.model.to_json_document(Some(&ds.fingerprint()));
    doc.push('\n');
    out.write("mlp_model.json", &doc)?;
    out.json("train_report.json", &run.report)?;
    out.write("loss.csv", &run.report.loss_csv())?;
    out.json("importance.json", &run.importance)?;
    out.json("eval_mlp.json", &report)?;
    out.write("series_mlp.csv", &report.series_csv())?;
    out.json("partition.json", &split)?;

    let s = run.model.sizes;
    let _ = writeln!(
        stdout,
        "mlp {}-{}-{} seed {}: {} epochs, stopped on {:?}",
        s.inputs, s.hidden, s.outputs, cfg.seed, run.report.epochs, run.report.stop_reason
    );
    for e in &run.report.splits {
        let rel = e.relative_error.map_or("n/a".to_string(), |r| format!("{r:.4}"));
        let _ = writeln!(
            stdout,
            "{:<8} n = {:>3}  sse {:.6}  relative error {}",
            e.split, e.n, e.sse, rel
        );
    }
    let _ = writeln!(stdout, "{:<22} {:>10} {:>12}", "variable", "importance", "normalized");
    for (k, v) in run.importance.variables.iter().enumerate() {
        let _ = writeln!(
            stdout,
            "{:<22} {:>10.3} {:>11.1}%",
            v.label(cfg.log_transform),
            run.importance.importance[k],
            run.importance.normalized[k]
        );
    }
    let _ = writeln!(stdout, "rmse {:.3}  mape {:.3}%", report.rmse, report.mape);
    out.report(stdout);
    Ok(())
}

/// A saved model of either kind.
pub enum LoadedModel {
    Regression(Box<RegressionArtifact>),
    Mlp {
        model: Box<MlpModel>,
        fingerprint: Option<String>,
    },
}

impl LoadedModel {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let bad = |reason: String| CliError::Artifact {
            path: path.to_path_buf(),
            reason,
        };
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        match value["format"].as_str() {
            Some(REGRESSION_FORMAT) => {
                let version = value["version"].as_u64().unwrap_or(0);
                if version != u64::from(REGRESSION_VERSION) {
                    return Err(bad(format!("unsupported {REGRESSION_FORMAT} version {version}")));
                }
                let a: RegressionArtifact = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
                Ok(LoadedModel::Regression(Box::new(a)))
            }
            Some(MODEL_FORMAT) => {
                let (model, fingerprint) = MlpModel::from_json_document(&text).map_err(|e| bad(e.to_string()))?;
                Ok(LoadedModel::Mlp {
                    model: Box::new(model),
                    fingerprint,
                })
            }
            other => Err(bad(format!("unknown artifact format {other:?}"))),
        }
    }

    pub fn fingerprint(&self) -> Option<&str> {
        match self {
            LoadedModel::Regression(a) => Some(&a.input_fingerprint),
            LoadedModel::Mlp { fingerprint, .. } => fingerprint.as_deref(),
        }
    }

    pub fn predictor(&self) -> &dyn EnergyPredictor {
        match self {
            LoadedModel::Regression(a) => &a.model,
            LoadedModel::Mlp { model, .. } => model.as_ref(),
        }
    }
}

/// Distinct report labels: repeats of a label get a `#2`, `#3`, ... suffix.
fn unique_labels(labels: &[&str]) -> Vec<String> {
    let mut out = Vec::with_capacity(labels.len());
    for (i, l) in labels.iter().enumerate() {
        let seen = labels[..i].iter().filter(|x| *x == l).count();
        out.push(if seen == 0 {
            l.to_string()
        } else {
            format!("{l}#{}", seen + 1)
        });
    }
    out
}

fn compare_models(cfg: &RunConfig, paths: &[PathBuf], stdout: &mut dyn Write) -> Result<(), CliError> {
    let ds = load_input(cfg)?;
    let models = paths
        .iter()
        .map(|p| LoadedModel::load(p))
        .collect::<Result<Vec<_>, _>>()?;
    let fingerprint = ds.fingerprint();
    if models
        .iter()
        .filter_map(LoadedModel::fingerprint)
        .any(|f| f != fingerprint)
    {
        return Err(CliError::MismatchedIndices);
    }
    let idx = eval_index(cfg, &ds)?;
    let labels: Vec<&str> = models.iter().map(|m| m.predictor().label()).collect();
    let mut reports: Vec<EvalReport> = Vec::with_capacity(models.len());
    for (m, label) in models.iter().zip(unique_labels(&labels)) {
        let mut r = evaluate(m.predictor(), &ds, &idx)?;
        r.model = label;
        reports.push(r);
    }
    let table = compare(&reports)?;

    let mut out = Output::create(&cfg.out)?;
    out.json("comparison.json", &table)?;
    out.write("comparison.csv", &table.to_csv())?;
    out.write("series_comparison.csv", &series_csv(&reports))?;

    let _ = writeln!(stdout, "{:<16} {:>12} {:>10}", "model", "rmse", "mape %");
    for s in &table.models {
        let _ = writeln!(stdout, "{:<16} {:>12.3} {:>10.3}", s.model, s.rmse, s.mape);
    }
    let _ = writeln!(stdout, "rmse winner: {}", winner_text(&table.rmse_winner));
    let _ = writeln!(stdout, "mape winner: {}", winner_text(&table.mape_winner));
    out.report(stdout);
    Ok(())
}

fn winner_text(w: &eval::Winner) -> String {
    match w {
        eval::Winner::Model(m) => m.clone(),
        eval::Winner::Tie(ms) => format!("tie ({})", ms.join(", ")),
    }
}

fn predict(cfg: &RunConfig, model_path: &Path, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ds = load_input(cfg)?;
    let model = LoadedModel::load(model_path)?;
    let idx = eval_index(cfg, &ds)?;
    let report = evaluate(model.predictor(), &ds, &idx)?;
    let mut out = Output::create(&cfg.out)?;
    out.write("predictions.csv", &report.series_csv())?;
    let _ = writeln!(
        stdout,
        "{} predictions from {} (rmse {:.3}, mape {:.3}%)",
        report.series.len(),
        report.model,
        report.rmse,
        report.mape
    );
    out.report(stdout);
    Ok(())
}
