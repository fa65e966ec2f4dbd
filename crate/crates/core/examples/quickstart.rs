//! Fit both models on the bundled snapshot and compare them.
//!
//! cargo run -p energy-models --example quickstart

use energy_models::mlp::MlpPipelineConfig;
use energy_models::{compare, evaluate, partition, snapshot, MlpModel, RegressionModel, StepwiseConfig, Variable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let raw = snapshot::balkan_panel();
    let all: Vec<usize> = (0..raw.len()).collect();

    let (reg, steps) = RegressionModel::fit_stepwise(
        &raw,
        Variable::EnergyUse,
        &Variable::PREDICTORS,
        true,
        StepwiseConfig::default(),
    )?;
    println!("entered: {:?}, R2 = {:.3}", steps.selected(), reg.fit.r2);
    for (label, b) in reg.fit.labels.iter().zip(&reg.fit.coefficients) {
        println!("  {label:<14} {b:>8.3}");
    }

    let split = partition(raw.len(), [0.70, 0.18, 0.12], 1)?;
    let run = MlpModel::fit_pipeline(&raw, &split, &MlpPipelineConfig::default())?;
    for s in &run.report.splits {
        println!(
            "{:<8} relative error {:.4}",
            s.split,
            s.relative_error.unwrap_or(f64::NAN)
        );
    }
    for (v, imp) in run.importance.variables.iter().zip(&run.importance.normalized) {
        println!("  {:<12} {imp:>6.1}%", v.name());
    }

    let table = compare(&[evaluate(&reg, &raw, &all)?, evaluate(&run.model, &raw, &all)?])?;
    for m in &table.models {
        println!("{:<11} rmse {:>8.2}  mape {:>5.2}%", m.model, m.rmse, m.mape);
    }
    Ok(())
}
