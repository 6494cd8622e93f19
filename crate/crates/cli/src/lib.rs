//! File formats, experiment harness and command-line plumbing for
//! `condcopula-core`.

pub mod bench;
pub mod config;
pub mod data;
pub mod error;
pub mod experiments;
pub mod gamma_beta;
pub mod model_io;

pub use bench::{run_bench, BenchConfig, BenchResult, BenchRow};
pub use config::{ConvergenceConfig, ExperimentConfig, RegressionConfig, RegressionMethod, SplitConfig};
pub use error::{Error, Result};
pub use experiments::{
    copula_convergence_experiment, regression_benchmark, run_experiment, split_benchmark, ExperimentReport, Record,
    SummaryRow,
};
pub use gamma_beta::{derive_beta_params, gamma_beta_sample, GammaBetaSpec, Truth, Variant};
