//! Forecast accuracy metrics and model comparison in natural units.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::panel::{PanelDataset, PanelError, PanelRecord, Variable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{obs} observations but {pred} predictions")]
    DimensionMismatch { obs: usize, pred: usize },
    #[error("no observations")]
    Empty,
    #[error("observation {0} is zero; MAPE is undefined")]
    ZeroObservation(usize),
    #[error("reports cover different records")]
    MismatchedIndices,
    #[error("need at least two reports to compare, got {0}")]
    TooFewReports(usize),
    #[error("model `{model}` produced a non-finite prediction for ({country}, {year})")]
    NonFinitePrediction { model: String, country: String, year: i32 },
    #[error("prediction failed: {0}")]
    Predictor(String),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

/// Anything that maps a raw panel record to a natural-unit energy-use prediction.
pub trait EnergyPredictor {
    fn label(&self) -> &str;
    fn predict_record(&self, record: &PanelRecord) -> Result<f64, EvalError>;
}

fn check_pair(obs: &[f64], pred: &[f64]) -> Result<(), EvalError> {
    if obs.len() != pred.len() {
        return Err(EvalError::DimensionMismatch {
            obs: obs.len(),
            pred: pred.len(),
        });
    }
    if obs.is_empty() {
        return Err(EvalError::Empty);
    }
    Ok(())
}

/// Root mean square error.
pub fn rmse(obs: &[f64], pred: &[f64]) -> Result<f64, EvalError> {
    check_pair(obs, pred)?;
    let ss: f64 = obs.iter().zip(pred).map(|(o, p)| (o - p).powi(2)).sum();
    Ok((ss / obs.len() as f64).sqrt())
}

/// Mean absolute percentage error, in percent.
pub fn mape(obs: &[f64], pred: &[f64]) -> Result<f64, EvalError> {
    check_pair(obs, pred)?;
    if let Some(i) = obs.iter().position(|&o| o == 0.0) {
        return Err(EvalError::ZeroObservation(i));
    }
    let s: f64 = obs.iter().zip(pred).map(|(o, p)| ((o - p) / o).abs()).sum();
    Ok(s / obs.len() as f64 * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub country: String,
    pub year: i32,
    pub actual: f64,
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub model: String,
    pub rmse: f64,
    pub mape: f64,
    pub series: Vec<SeriesPoint>,
}

impl EvalReport {
    pub fn actual(&self) -> Vec<f64> {
        self.series.iter().map(|s| s.actual).collect()
    }

    pub fn predicted(&self) -> Vec<f64> {
        self.series.iter().map(|s| s.predicted).collect()
    }

    /// CSV with header `country,year,actual,predicted,model`.
    pub fn series_csv(&self) -> String {
        series_csv(std::slice::from_ref(self))
    }
}

/// Concatenated series of several reports, one CSV.
pub fn series_csv(reports: &[EvalReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["country", "year", "actual", "predicted", "model"])
        .expect("in-memory write");
    for r in reports {
        for s in &r.series {
            w.write_record([
                s.country.clone(),
                s.year.to_string(),
                s.actual.to_string(),
                s.predicted.to_string(),
                r.model.clone(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

/// Predict energy use for the records at `idx` and score the predictions.
///
/// `ds` must hold natural-unit values; the series is ordered by (country, year).
pub fn evaluate(model: &dyn EnergyPredictor, ds: &PanelDataset, idx: &[usize]) -> Result<EvalReport, EvalError> {
    if ds.is_transformed() {
        return Err(PanelError::AlreadyTransformed.into());
    }
    ds.check_indices(idx)?;
    let mut idx = idx.to_vec();
    idx.sort_unstable();
    idx.dedup();

    let mut series = Vec::with_capacity(idx.len());
    for &i in &idx {
        let rec = &ds.records()[i];
        let predicted = model.predict_record(rec)?;
        if !predicted.is_finite() {
            return Err(EvalError::NonFinitePrediction {
                model: model.label().to_string(),
                country: rec.country.clone(),
                year: rec.year,
            });
        }
        series.push(SeriesPoint {
            country: rec.country.clone(),
            year: rec.year,
            actual: rec.get(Variable::EnergyUse),
            predicted,
        });
    }
    let obs: Vec<f64> = series.iter().map(|s| s.actual).collect();
    let pred: Vec<f64> = series.iter().map(|s| s.predicted).collect();
    Ok(EvalReport {
        model: model.label().to_string(),
        rmse: rmse(&obs, &pred)?,
        mape: mape(&obs, &pred)?,
        series,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Model(String),
    Tie(Vec<String>),
}

impl Winner {
    pub fn is(&self, model: &str) -> bool {
        matches!(self, Winner::Model(m) if m == model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelScore {
    pub model: String,
    pub rmse: f64,
    pub mape: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryScore {
    pub country: String,
    pub model: String,
    pub rmse: f64,
    pub mape: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonTable {
    pub models: Vec<ModelScore>,
    pub rmse_winner: Winner,
    pub mape_winner: Winner,
    pub per_country: Vec<CountryScore>,
}

impl ComparisonTable {
    /// CSV with header `model,rmse,mape,rmse_winner,mape_winner`.
    pub fn to_csv(&self) -> String {
        let flag = |w: &Winner, m: &str| match w {
            Winner::Model(x) => (x == m).to_string(),
            Winner::Tie(xs) if xs.iter().any(|x| x == m) => "tie".to_string(),
            Winner::Tie(_) => "false".to_string(),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["model", "rmse", "mape", "rmse_winner", "mape_winner"])
            .expect("in-memory write");
        for s in &self.models {
            w.write_record([
                s.model.clone(),
                s.rmse.to_string(),
                s.mape.to_string(),
                flag(&self.rmse_winner, &s.model),
                flag(&self.mape_winner, &s.model),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

fn pick_winner(scores: &[(String, f64)]) -> Winner {
    let best = scores.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let at_best: Vec<String> = scores
        .iter()
        .filter(|s| (s.1 - best).abs() <= 1e-12 * best.abs())
        .map(|s| s.0.clone())
        .collect();
    if at_best.len() == 1 {
        Winner::Model(at_best.into_iter().next().expect("one element"))
    } else {
        Winner::Tie(at_best)
    }
}

/// Tabulate RMSE and MAPE per model, flag the best per metric, and break down by country.
pub fn compare(reports: &[EvalReport]) -> Result<ComparisonTable, EvalError> {
    if reports.len() < 2 {
        return Err(EvalError::TooFewReports(reports.len()));
    }
    let key = |r: &EvalReport| -> Vec<(String, i32, u64)> {
        r.series
            .iter()
            .map(|s| (s.country.clone(), s.year, s.actual.to_bits()))
            .collect()
    };
    let first = key(&reports[0]);
    if reports[1..].iter().any(|r| key(r) != first) {
        return Err(EvalError::MismatchedIndices);
    }

    let models: Vec<ModelScore> = reports
        .iter()
        .map(|r| ModelScore {
            model: r.model.clone(),
            rmse: r.rmse,
            mape: r.mape,
        })
        .collect();
    let rmse_winner = pick_winner(&models.iter().map(|m| (m.model.clone(), m.rmse)).collect::<Vec<_>>());
    let mape_winner = pick_winner(&models.iter().map(|m| (m.model.clone(), m.mape)).collect::<Vec<_>>());

    let mut countries: Vec<&str> = reports[0].series.iter().map(|s| s.country.as_str()).collect();
    countries.dedup();
    let mut per_country = Vec::new();
    for country in countries {
        for r in reports {
            let (obs, pred): (Vec<f64>, Vec<f64>) = r
                .series
                .iter()
                .filter(|s| s.country == country)
                .map(|s| (s.actual, s.predicted))
                .unzip();
            per_country.push(CountryScore {
                country: country.to_string(),
                model: r.model.clone(),
                rmse: rmse(&obs, &pred)?,
                mape: mape(&obs, &pred)?,
            });
        }
    }
    Ok(ComparisonTable {
        models,
        rmse_winner,
        mape_winner,
        per_country,
    })
}
