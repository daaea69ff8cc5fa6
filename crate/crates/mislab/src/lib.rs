//! Experiment harness for comparing multiple importance sampling weighting
//! schemes: configuration, seeded replication, MSE summaries, CSV output and
//! the acceptance checks behind `mislab validate`.

pub mod config;
mod error;
pub mod experiment;
pub mod quadrature;
pub mod report;
pub mod seed;
pub mod stats;
pub mod validate;

pub use config::{builtin_example, builtin_example1, builtin_example2, Experiment, ExperimentConfig};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, RunResult, SummaryRow};
pub use report::{print_table, write_csv};
