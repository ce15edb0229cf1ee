//! Experiment configs, runners, metrics and the command-line entry point.

pub mod cli;
pub mod config;
pub mod gradcheck;
pub mod metrics;
pub mod pentagon;
pub mod reference;
pub mod runners;

pub use cli::{cli, cli_with_output};
pub use config::{ExperimentConfig, ExperimentKind, ForecastConfig, NetworkConfig, OptimizerConfig, PentagonConfig, SyntheticConfig};
pub use metrics::{metrics, Metrics};
pub use runners::{
    run_experiment, run_forecast, run_forecast_series, run_pentagon, run_synthetic, sweep_dataset, sweep_point_run,
    Artifact, MetricsReport, RunOutput, SweepActivation,
};
