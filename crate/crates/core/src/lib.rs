//! Models of national energy use over country-year panel data.
//!
//! Two predictors are fitted to the same records and compared:
//!
//! - a stepwise log-log multiple linear regression ([`linreg`]), whose slopes
//!   read directly as elasticities;
//! - a one-hidden-layer perceptron trained with scaled conjugate gradient
//!   ([`mlp`]).
//!
//! [`panel`] handles ingestion, log transforms, descriptive statistics,
//! seeded partitions and z-score scalers. [`eval`] computes RMSE and MAPE in
//! natural units and assembles actual-vs-predicted series.

pub mod eval;
pub mod linalg;
pub mod linreg;
pub mod mlp;
pub mod panel;
pub mod rng;
pub mod snapshot;
pub mod special;

pub use eval::{compare, evaluate, mape, rmse, ComparisonTable, EnergyPredictor, EvalReport};
pub use linreg::{
    elasticities, fit_ols, partial_f, stepwise, DesignMatrix, RegressionFit, RegressionModel, StepwiseConfig,
    StepwiseResult,
};
pub use mlp::{
    importance, train_scg, ImportanceReport, LayerSizes, MlpModel, MlpPipelineConfig, MlpRun, StopReason, TrainConfig,
    TrainReport,
};
pub use panel::{
    descriptive_stats, parse_csv, partition, PanelDataset, PanelRecord, Partition, Scaler, StatsTable, Variable,
};
