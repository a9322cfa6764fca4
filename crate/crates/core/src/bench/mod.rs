//! Seeded instance generation and the experiment suite behind the CLI's
//! `bench` command.

mod experiments;
mod generator;

pub use experiments::{
    default_welfare_grid, instance_file_name, read_csv, run_alpha_sweep, run_epsilon_experiment,
    run_runtime_experiment, run_welfare_experiment, solve_with, write_csv, Dump, ExperimentRow,
    RunConfig, ALPHA_GRID, CSV_HEADER, DEFAULT_TIMEOUT, EPSILON_ALGORITHMS, WELFARE_ALGORITHMS,
};
pub use generator::{generate_instance, trial_seed, GeneratorConfig};
