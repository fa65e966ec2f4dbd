//! Country-year panel records: ingestion, validation and transforms.

mod partition;
mod scaler;
mod stats;

pub use partition::{partition, Partition};
pub use scaler::Scaler;
pub use stats::{descriptive_stats, StatsRow, StatsTable};

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Header row of the panel CSV, in canonical order.
pub const CSV_HEADER: [&str; 6] = [
    "country",
    "year",
    "co2_mt_per_capita",
    "gdp_const2010_usd",
    "energy_use_kgoe_per_capita",
    "population",
];

pub const DEFAULT_YEAR_RANGE: (i32, i32) = (1995, 2014);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PanelError {
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("unexpected column `{0}`")]
    UnexpectedColumn(String),
    #[error("line {line}: expected 6 fields, found {found}")]
    MalformedRow { line: u64, found: usize },
    #[error("line {line}: column `{column}` is not a number")]
    NonNumericCell { line: u64, column: String },
    #[error("line {line}: column `{column}` must be strictly positive")]
    NonPositiveValue { line: u64, column: String },
    #[error("line {line}: year {year} outside {lo}..={hi}")]
    YearOutOfRange { line: u64, year: i32, lo: i32, hi: i32 },
    #[error("duplicate record for ({country}, {year})")]
    DuplicateKey { country: String, year: i32 },
    #[error("dataset has no records")]
    EmptyDataset,
    #[error("no records for country `{0}`")]
    EmptyGroup(String),
    #[error("dataset is already log-transformed")]
    AlreadyTransformed,
    #[error("proportions must be positive and sum to 1, got {0:?}")]
    BadProportions([f64; 3]),
    #[error("need at least 3 records to partition, got {0}")]
    TooFewRecords(usize),
    #[error("variable `{0}` is constant over the fitting subset")]
    ConstantColumn(Variable),
    #[error("index list is empty")]
    EmptyIndex,
    #[error("index {index} out of range for {len} records")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("csv: {0}")]
    Csv(String),
}

/// One of the four numeric panel variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    Co2,
    Gdp,
    EnergyUse,
    Population,
}

impl Variable {
    pub const ALL: [Variable; 4] = [Variable::Co2, Variable::Gdp, Variable::EnergyUse, Variable::Population];

    /// Predictors in the order they are offered to stepwise selection and fed to the network.
    pub const PREDICTORS: [Variable; 3] = [Variable::Co2, Variable::Gdp, Variable::Population];

    pub fn name(self) -> &'static str {
        match self {
            Variable::Co2 => "co2",
            Variable::Gdp => "gdp",
            Variable::EnergyUse => "energy_use",
            Variable::Population => "population",
        }
    }

    pub fn csv_column(self) -> &'static str {
        match self {
            Variable::Co2 => CSV_HEADER[2],
            Variable::Gdp => CSV_HEADER[3],
            Variable::EnergyUse => CSV_HEADER[4],
            Variable::Population => CSV_HEADER[5],
        }
    }

    /// Label used for regression columns, `ln_` prefixed on log-scale data.
    pub fn label(self, log_scale: bool) -> String {
        if log_scale {
            format!("ln_{}", self.name())
        } else {
            self.name().to_string()
        }
    }

    pub fn from_name(s: &str) -> Option<Variable> {
        Variable::ALL.into_iter().find(|v| v.name() == s)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRecord {
    pub country: String,
    pub year: i32,
    pub co2: f64,
    pub gdp: f64,
    pub energy_use: f64,
    pub population: f64,
}

impl PanelRecord {
    pub fn get(&self, var: Variable) -> f64 {
        match var {
            Variable::Co2 => self.co2,
            Variable::Gdp => self.gdp,
            Variable::EnergyUse => self.energy_use,
            Variable::Population => self.population,
        }
    }

    fn map_values(&self, f: impl Fn(f64) -> f64) -> PanelRecord {
        PanelRecord {
            country: self.country.clone(),
            year: self.year,
            co2: f(self.co2),
            gdp: f(self.gdp),
            energy_use: f(self.energy_use),
            population: f(self.population),
        }
    }
}

/// Records sorted by `(country, year)` with unique keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelDataset {
    records: Vec<PanelRecord>,
    transformed: bool,
}

impl PanelDataset {
    pub fn new(mut records: Vec<PanelRecord>, transformed: bool) -> Result<Self, PanelError> {
        records.sort_by(|a, b| (&a.country, a.year).cmp(&(&b.country, b.year)));
        for pair in records.windows(2) {
            if pair[0].country == pair[1].country && pair[0].year == pair[1].year {
                return Err(PanelError::DuplicateKey {
                    country: pair[0].country.clone(),
                    year: pair[0].year,
                });
            }
        }
        Ok(Self { records, transformed })
    }

    pub fn records(&self) -> &[PanelRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// True when the numeric fields hold natural logarithms.
    pub fn is_transformed(&self) -> bool {
        self.transformed
    }

    pub fn column(&self, var: Variable) -> Vec<f64> {
        self.records.iter().map(|r| r.get(var)).collect()
    }

    pub fn column_at(&self, var: Variable, idx: &[usize]) -> Vec<f64> {
        idx.iter().map(|&i| self.records[i].get(var)).collect()
    }

    /// Countries in sorted order, each listed once.
    pub fn countries(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if out.last() != Some(&r.country.as_str()) {
                out.push(&r.country);
            }
        }
        out
    }

    pub fn check_indices(&self, idx: &[usize]) -> Result<(), PanelError> {
        if idx.is_empty() {
            return Err(PanelError::EmptyIndex);
        }
        match idx.iter().find(|&&i| i >= self.len()) {
            Some(&index) => Err(PanelError::IndexOutOfRange { index, len: self.len() }),
            None => Ok(()),
        }
    }

    /// Replace every numeric field by its natural logarithm.
    pub fn log_transform(&self) -> Result<PanelDataset, PanelError> {
        if self.transformed {
            return Err(PanelError::AlreadyTransformed);
        }
        Ok(PanelDataset {
            records: self.records.iter().map(|r| r.map_values(f64::ln)).collect(),
            transformed: true,
        })
    }

    /// Canonical CSV text; reparsing it yields an identical dataset.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(CSV_HEADER).expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.country.clone(),
                r.year.to_string(),
                r.co2.to_string(),
                r.gdp.to_string(),
                r.energy_use.to_string(),
                r.population.to_string(),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
    }

    /// Hex SHA-256 of [`to_csv`](Self::to_csv), identifying the exact record set.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.to_csv().as_bytes());
        if self.transformed {
            hasher.update(b"\nln");
        }
        hex::encode(hasher.finalize())
    }
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Inclusive range of accepted years.
    pub year_range: (i32, i32),
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            year_range: DEFAULT_YEAR_RANGE,
        }
    }
}

/// Parse panel CSV with the default year range.
pub fn parse_csv(text: &str) -> Result<PanelDataset, PanelError> {
    parse_csv_with(text, &ParseOptions::default())
}

pub fn parse_csv_with(text: &str, opts: &ParseOptions) -> Result<PanelDataset, PanelError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers().map_err(|e| PanelError::Csv(e.to_string()))?.clone();
    // position of each canonical column in the file
    let mut slots = [usize::MAX; 6];
    for (pos, name) in header.iter().enumerate() {
        match CSV_HEADER.iter().position(|&c| c == name) {
            Some(k) if slots[k] == usize::MAX => slots[k] = pos,
            _ => return Err(PanelError::UnexpectedColumn(name.to_string())),
        }
    }
    if let Some(k) = slots.iter().position(|&s| s == usize::MAX) {
        return Err(PanelError::MissingColumn(CSV_HEADER[k].to_string()));
    }

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for row in reader.records() {
        let row = row.map_err(|e| PanelError::Csv(e.to_string()))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != 6 {
            return Err(PanelError::MalformedRow { line, found: row.len() });
        }
        let cell = |k: usize| &row[slots[k]];
        let number = |k: usize| -> Result<f64, PanelError> {
            let v: f64 = cell(k).parse().map_err(|_| PanelError::NonNumericCell {
                line,
                column: CSV_HEADER[k].to_string(),
            })?;
            if !v.is_finite() {
                return Err(PanelError::NonNumericCell {
                    line,
                    column: CSV_HEADER[k].to_string(),
                });
            }
            if v <= 0.0 {
                return Err(PanelError::NonPositiveValue {
                    line,
                    column: CSV_HEADER[k].to_string(),
                });
            }
            Ok(v)
        };

        let country = cell(0).to_string();
        let year: i32 = cell(1).parse().map_err(|_| PanelError::NonNumericCell {
            line,
            column: CSV_HEADER[1].to_string(),
        })?;
        let (lo, hi) = opts.year_range;
        if year < lo || year > hi {
            return Err(PanelError::YearOutOfRange { line, year, lo, hi });
        }
        let record = PanelRecord {
            co2: number(2)?,
            gdp: number(3)?,
            energy_use: number(4)?,
            population: number(5)?,
            country,
            year,
        };
        if !seen.insert((record.country.clone(), year)) {
            return Err(PanelError::DuplicateKey {
                country: record.country,
                year,
            });
        }
        records.push(record);
    }
    if records.is_empty() {
        return Err(PanelError::EmptyDataset);
    }
    PanelDataset::new(records, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "country,year,co2_mt_per_capita,gdp_const2010_usd,energy_use_kgoe_per_capita,population\n";

    #[test]
    fn minimal_row() {
        let ds = parse_csv(&format!("{HEADER}Slovenia,2008,8.7,24000,3600,2020000\n")).unwrap();
        assert_eq!(ds.len(), 1);
        assert!(!ds.is_transformed());
        let r = &ds.records()[0];
        assert_eq!(r.country, "Slovenia");
        assert_eq!(r.year, 2008);
        assert_eq!(r.co2, 8.7);
        assert_eq!(r.population, 2_020_000.0);
    }

    #[test]
    fn zero_co2_rejected() {
        let err = parse_csv(&format!("{HEADER}Slovenia,2008,0,24000,3600,2020000\n")).unwrap_err();
        assert_eq!(
            err,
            PanelError::NonPositiveValue {
                line: 2,
                column: "co2_mt_per_capita".into()
            }
        );
    }

    #[test]
    fn duplicate_key_rejected() {
        let text = format!("{HEADER}Serbia,2000,6,5000,2000,7500000\nSerbia,2000,6,5000,2000,7500000\n");
        assert_eq!(
            parse_csv(&text).unwrap_err(),
            PanelError::DuplicateKey {
                country: "Serbia".into(),
                year: 2000
            }
        );
    }

    #[test]
    fn header_errors() {
        let text = "country,year,co2_mt_per_capita,gdp_const2010_usd,population\nA,2000,1,1,1\n";
        assert_eq!(
            parse_csv(text).unwrap_err(),
            PanelError::MissingColumn("energy_use_kgoe_per_capita".into())
        );
        let text = format!("{}extra\n", HEADER.trim_end().to_owned() + ",");
        assert_eq!(
            parse_csv(&text).unwrap_err(),
            PanelError::UnexpectedColumn("extra".into())
        );
    }

    #[test]
    fn malformed_and_missing_cells() {
        let err = parse_csv(&format!("{HEADER}A,2000,1,1,1\n")).unwrap_err();
        assert_eq!(err, PanelError::MalformedRow { line: 2, found: 5 });
        let err = parse_csv(&format!("{HEADER}A,2000,1,,1,1\n")).unwrap_err();
        assert!(matches!(err, PanelError::NonNumericCell { line: 2, .. }));
        let err = parse_csv(&format!("{HEADER}A,2000,1,1,1,1\nB,1990,1,1,1,1\n")).unwrap_err();
        assert!(matches!(
            err,
            PanelError::YearOutOfRange {
                line: 3,
                year: 1990,
                ..
            }
        ));
    }

    #[test]
    fn header_only_is_empty() {
        assert_eq!(parse_csv(HEADER).unwrap_err(), PanelError::EmptyDataset);
    }

    #[test]
    fn records_sorted_by_key() {
        let text = format!("{HEADER}B,2001,1,1,1,1\nA,2002,1,1,1,1\nB,2000,1,1,1,1\n");
        let ds = parse_csv(&text).unwrap();
        let keys: Vec<_> = ds.records().iter().map(|r| (r.country.as_str(), r.year)).collect();
        assert_eq!(keys, [("A", 2002), ("B", 2000), ("B", 2001)]);
        assert_eq!(ds.countries(), ["A", "B"]);
    }

    #[test]
    fn log_of_one_and_e() {
        let e = std::f64::consts::E;
        let text = format!("{HEADER}A,2000,1,{e},1,1\n");
        let ln = parse_csv(&text).unwrap().log_transform().unwrap();
        let r = &ln.records()[0];
        assert_eq!(r.co2, 0.0);
        assert!((r.gdp - 1.0).abs() < 1e-12);
        assert!(ln.is_transformed());
        assert_eq!(ln.log_transform().unwrap_err(), PanelError::AlreadyTransformed);
    }

    #[test]
    fn country_with_comma_roundtrips() {
        let text = format!("{HEADER}\"Macedonia, FYR\",2000,5.5,4000,1400,2000000\n");
        let ds = parse_csv(&text).unwrap();
        assert_eq!(ds.records()[0].country, "Macedonia, FYR");
        assert_eq!(parse_csv(&ds.to_csv()).unwrap(), ds);
    }
}
