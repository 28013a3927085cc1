//! Experiment layer over `epspy-core`: configuration parsing, seeded
//! table/figure runners, and CSV/JSON emission for the `epspy` binary.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{parse_args, ConfigError, Experiment, ExperimentConfig, Method, OutputFormat, Which};
pub use experiments::{
    mean_reference_sample, run_fig1, run_fig2, run_functional, run_realizations, run_table1,
    run_table2, run_table3, run_tau_dist, run_tilted_stable, scaled_tau, HistogramRow,
};
