use std::path::PathBuf;

use energy_models::eval::EvalError;
use energy_models::linreg::RegressionError;
use energy_models::mlp::MlpError;
use energy_models::panel::PanelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Data { path: PathBuf, source: PanelError },
    #[error("artifact {path}: {reason}")]
    Artifact { path: PathBuf, reason: String },
    #[error("artifacts were built from different input data")]
    MismatchedIndices,
    #[error(transparent)]
    Regression(#[from] RegressionError),
    #[error(transparent)]
    Mlp(#[from] MlpError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Panel(#[from] PanelError),
}

impl CliError {
    /// 0 success, 1 usage/config, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Io { .. } | CliError::Data { .. } | CliError::Artifact { .. } | CliError::MismatchedIndices => 2,
            CliError::Panel(_) => 2,
            CliError::Eval(EvalError::NonFinitePrediction { .. }) => 3,
            CliError::Eval(_) => 2,
            CliError::Regression(e) => match e {
                RegressionError::BadThresholds { .. } => 1,
                RegressionError::RankDeficient(_) | RegressionError::Tail(_) => 3,
                _ => 2,
            },
            CliError::Mlp(e) => match e {
                MlpError::BadConfig(_) | MlpError::BadLayerSizes(_) => 1,
                MlpError::NonFiniteLoss { .. } | MlpError::ZeroSensitivity => 3,
                _ => 2,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_failures_exit_three() {
        let e = CliError::Mlp(MlpError::NonFiniteLoss {
            epoch: 3,
            last_sse: 1.0,
        });
        assert_eq!(e.exit_code(), 3);
        assert_eq!(
            CliError::Regression(RegressionError::RankDeficient("x".into())).exit_code(),
            3
        );
        assert_eq!(CliError::Mlp(MlpError::BadConfig("m".into())).exit_code(), 1);
        assert_eq!(CliError::MismatchedIndices.exit_code(), 2);
        let io = CliError::Io {
            path: "a".into(),
            source: std::io::Error::from(std::io::ErrorKind::NotFound),
        };
        assert_eq!(io.exit_code(), 2);
    }
}
