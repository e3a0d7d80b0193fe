//! Stochastic min-max steppers behind one oracle-driven interface.
//!
//! With `F` the batch field at `w_t`, `F̃` its EMA and `u = F̃ / (√v + ε)`:
//!
//! | kind       | update                                                  |
//! |------------|---------------------------------------------------------|
//! | `sgd`      | `w − η F`                                               |
//! | `sgdm`     | `F̃ ← βF̃ + (1−β)F`, `w − η F̃`                            |
//! | `isog`     | `w − η[(1+α)F − α F_prev]`, previous sample's field     |
//! | `ssog`     | `w − η[(1+α)F − α F(w_{t−1})]`, same sample, two calls   |
//! | `sseg`     | `w − η F(w − ηF)`, same sample, two calls                |
//! | `omega`    | `w − η[(1+α)F − α F̃_{t−1}]`, then `F̃ ← (1−β)F + βF̃`     |
//! | `omegam`   | `F̃ ← (1−β)F + βF̃`, `w − η[(1+α)F̃_t − α F̃_{t−1}]`       |
//! | `opt_adam` | `w − η[u_t + α(u_t − u_{t−1})]`                          |

mod config;
mod oracle;
mod stepper;

pub use config::{OptimizerConfig, OptimizerKind, DEFAULT_ALPHA, DEFAULT_BETA, DEFAULT_EPSILON, DEFAULT_GAMMA};
pub use oracle::{CountingOracle, FnOracle, GradientOracle};
pub use stepper::{Player, Stepper, StepperState};
