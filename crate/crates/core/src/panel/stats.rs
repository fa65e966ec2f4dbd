use serde::{Deserialize, Serialize};

use super::{PanelDataset, PanelError, Variable};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub country: String,
    pub variable: Variable,
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single record.
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

/// Per-country, per-variable summary statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsTable {
    pub rows: Vec<StatsRow>,
}

impl StatsTable {
    pub fn get(&self, country: &str, variable: Variable) -> Option<&StatsRow> {
        self.rows
            .iter()
            .find(|r| r.country == country && r.variable == variable)
    }

    /// CSV with header `country,variable,mean,sd,min,max,n`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["country", "variable", "mean", "sd", "min", "max", "n"])
            .expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.country.clone(),
                r.variable.name().to_string(),
                r.mean.to_string(),
                r.sd.to_string(),
                r.min.to_string(),
                r.max.to_string(),
                r.n.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }
}

/// Mean, sample sd, min and max for every (country, variable) pair.
///
/// Uses Welford's single-pass update.
pub fn descriptive_stats(ds: &PanelDataset) -> Result<StatsTable, PanelError> {
    if ds.is_transformed() {
        return Err(PanelError::AlreadyTransformed);
    }
    if ds.is_empty() {
        return Err(PanelError::EmptyDataset);
    }
    let mut rows = Vec::new();
    for country in ds.countries() {
        let group: Vec<_> = ds.records().iter().filter(|r| r.country == country).collect();
        if group.is_empty() {
            return Err(PanelError::EmptyGroup(country.to_string()));
        }
        for var in Variable::ALL {
            let mut n = 0usize;
            let mut mean = 0.0;
            let mut m2 = 0.0;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            for r in &group {
                let x = r.get(var);
                n += 1;
                let delta = x - mean;
                mean += delta / n as f64;
                m2 += delta * (x - mean);
                min = min.min(x);
                max = max.max(x);
            }
            let sd = if n > 1 { (m2 / (n - 1) as f64).sqrt() } else { 0.0 };
            rows.push(StatsRow {
                country: country.to_string(),
                variable: var,
                // Welford can land one ulp outside the range on constant groups.
                mean: mean.clamp(min, max),
                sd,
                min,
                max,
                n,
            });
        }
    }
    Ok(StatsTable { rows })
}
