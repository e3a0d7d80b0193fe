//! Optimistic EMA gradient methods (Omega, OmegaM) and baselines for
//! stochastic min-max problems, together with a generator for stochastic
//! quadratic games whose equilibrium is known in closed form.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, which the experiments use.

pub mod error;
pub mod games;
pub mod harness;
pub mod linalg;
pub mod optim;
pub mod scalar;

pub use error::{Error, Result};
pub use games::{Band, GameKind, GameSample, GameSpec};
pub use harness::{ExperimentConfig, SweepAxis, SweepResult, Trajectory};
pub use optim::{GradientOracle, OptimizerConfig, OptimizerKind, Player};
pub use scalar::Real;

pub type Game = games::StochasticGame<f64>;
pub type Game32 = games::StochasticGame<f32>;
pub type Point = games::JointPoint<f64>;
pub type Point32 = games::JointPoint<f32>;
pub type Field = games::FieldValue<f64>;
pub type Nash = games::NashSolution<f64>;
pub type Stepper = optim::Stepper<f64>;
pub type Stepper32 = optim::Stepper<f32>;
