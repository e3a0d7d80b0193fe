//! Seeded experiments, parameter sweeps and summary tables.

mod batch;
mod experiment;
mod io;
mod sweep;

pub use batch::sample_batch;
pub use experiment::{
    initial_point, oscillation_amplitude, run_experiment, run_on_game, ExperimentConfig, Record, Trajectory,
    DIVERGENCE_THRESHOLD,
};
pub use io::{format_decimal, TRAJECTORY_HEADER};
pub use sweep::{run_all, summarize, sweep, sweep_many, SweepAxis, SweepResult, Target};
