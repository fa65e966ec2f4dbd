//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes panel CSV text (empty for the bundled
//! snapshot) plus a few knobs and returns a JSON string for the page to plot.
//! The `*_json` functions hold the logic and run natively in tests.

use energy_models::linreg::StepwiseConfig;
use energy_models::mlp::{MlpPipelineConfig, TrainConfig};
use energy_models::panel::partition;
use energy_models::{
    compare, descriptive_stats, elasticities, evaluate, parse_csv, snapshot, EvalReport, ImportanceReport, MlpModel,
    PanelDataset, RegressionModel, StatsTable, Variable,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const SPLIT: [f64; 3] = [0.70, 0.18, 0.12];

fn dataset(csv: &str) -> Result<PanelDataset, String> {
    if csv.trim().is_empty() {
        Ok(snapshot::balkan_panel())
    } else {
        parse_csv(csv).map_err(|e| e.to_string())
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

#[derive(Serialize)]
struct Describe {
    records: usize,
    countries: Vec<String>,
    stats: StatsTable,
}

pub fn describe_json(csv: &str) -> Result<String, String> {
    let ds = dataset(csv)?;
    let stats = descriptive_stats(&ds).map_err(|e| e.to_string())?;
    Ok(to_json(&Describe {
        records: ds.len(),
        countries: ds.countries().into_iter().map(str::to_string).collect(),
        stats,
    }))
}

#[derive(Serialize)]
struct Coefficient {
    label: String,
    b: f64,
    se: f64,
    t: f64,
    p: f64,
}

#[derive(Serialize)]
struct RegressionOut {
    selected: Vec<String>,
    coefficients: Vec<Coefficient>,
    r2: f64,
    elasticities: Vec<(String, f64)>,
    trace: Vec<energy_models::linreg::TraceStep>,
    eval: EvalReport,
}

fn regression(
    ds: &PanelDataset,
    alpha_enter: f64,
    alpha_remove: f64,
    log: bool,
) -> Result<(RegressionModel, RegressionOut), String> {
    let cfg = StepwiseConfig {
        alpha_enter,
        alpha_remove,
    };
    let (model, result) = RegressionModel::fit_stepwise(ds, Variable::EnergyUse, &Variable::PREDICTORS, log, cfg)
        .map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..ds.len()).collect();
    let eval = evaluate(&model, ds, &all).map_err(|e| e.to_string())?;
    let f = &model.fit;
    let coefficients = (0..f.labels.len())
        .map(|k| Coefficient {
            label: f.labels[k].clone(),
            b: f.coefficients[k],
            se: f.se[k],
            t: f.t[k],
            p: f.p[k],
        })
        .collect();
    let mut el = elasticities(f);
    el.sort_by(|a, b| b.1.total_cmp(&a.1));
    let out = RegressionOut {
        selected: result.selected().to_vec(),
        coefficients,
        r2: f.r2,
        elasticities: if log { el } else { Vec::new() },
        trace: result.trace,
        eval,
    };
    Ok((model, out))
}

pub fn fit_regression_json(csv: &str, alpha_enter: f64, alpha_remove: f64, log: bool) -> Result<String, String> {
    let ds = dataset(csv)?;
    regression(&ds, alpha_enter, alpha_remove, log).map(|(_, out)| to_json(&out))
}

#[derive(Serialize)]
struct MlpOut {
    epochs: usize,
    relative_errors: Vec<(String, Option<f64>)>,
    loss: Vec<f64>,
    importance: ImportanceReport,
    eval: EvalReport,
}

fn mlp(ds: &PanelDataset, seed: u64, hidden: usize, max_epochs: usize) -> Result<(MlpModel, MlpOut), String> {
    let split = partition(ds.len(), SPLIT, seed).map_err(|e| e.to_string())?;
    let cfg = MlpPipelineConfig {
        hidden,
        seed,
        train: TrainConfig {
            max_epochs,
            ..TrainConfig::default()
        },
        ..MlpPipelineConfig::default()
    };
    let run = MlpModel::fit_pipeline(ds, &split, &cfg).map_err(|e| e.to_string())?;
    let all: Vec<usize> = (0..ds.len()).collect();
    let eval = evaluate(&run.model, ds, &all).map_err(|e| e.to_string())?;
    let out = MlpOut {
        epochs: run.report.epochs,
        relative_errors: run
            .report
            .splits
            .iter()
            .map(|s| (s.split.clone(), s.relative_error))
            .collect(),
        loss: run.report.trajectory.clone(),
        importance: run.importance,
        eval,
    };
    Ok((run.model, out))
}

pub fn train_mlp_json(csv: &str, seed: u64, hidden: usize, max_epochs: usize) -> Result<String, String> {
    let ds = dataset(csv)?;
    mlp(&ds, seed, hidden, max_epochs).map(|(_, out)| to_json(&out))
}

#[derive(Serialize)]
struct CompareOut {
    regression: RegressionOut,
    mlp: MlpOut,
    comparison: energy_models::ComparisonTable,
}

/// Fit both models with default thresholds and score them on every record.
pub fn compare_models_json(csv: &str, seed: u64, hidden: usize, max_epochs: usize) -> Result<String, String> {
    let ds = dataset(csv)?;
    let (_, reg) = regression(&ds, 0.05, 0.10, true)?;
    let (_, net) = mlp(&ds, seed, hidden, max_epochs)?;
    let comparison = compare(&[reg.eval.clone(), net.eval.clone()]).map_err(|e| e.to_string())?;
    Ok(to_json(&CompareOut {
        regression: reg,
        mlp: net,
        comparison,
    }))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// The bundled snapshot as CSV text.
#[wasm_bindgen]
pub fn snapshot_csv() -> String {
    snapshot::BALKAN_CSV.to_string()
}

#[wasm_bindgen]
pub fn describe(csv: &str) -> Result<String, JsError> {
    js(describe_json(csv))
}

#[wasm_bindgen]
pub fn fit_regression(csv: &str, alpha_enter: f64, alpha_remove: f64, log: bool) -> Result<String, JsError> {
    js(fit_regression_json(csv, alpha_enter, alpha_remove, log))
}

#[wasm_bindgen]
pub fn train_mlp(csv: &str, seed: u32, hidden: u32, max_epochs: u32) -> Result<String, JsError> {
    js(train_mlp_json(
        csv,
        u64::from(seed),
        hidden as usize,
        max_epochs as usize,
    ))
}

#[wasm_bindgen]
pub fn compare_models(csv: &str, seed: u32, hidden: u32, max_epochs: u32) -> Result<String, JsError> {
    js(compare_models_json(
        csv,
        u64::from(seed),
        hidden as usize,
        max_epochs as usize,
    ))
}
