use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    /// Simultaneous gradient descent-ascent.
    Sgd,
    /// Descent-ascent along an EMA of past fields (momentum with dampening β).
    Sgdm,
    /// Optimistic gradient, correction from the previous step's sample.
    Isog,
    /// Optimistic gradient, correction re-evaluated on the current sample.
    Ssog,
    /// Same-sample extragradient.
    Sseg,
    /// Optimistic gradient with an EMA correction term.
    Omega,
    /// Optimistic gradient applied to the EMA itself.
    #[serde(rename = "omegam")]
    OmegaM,
    /// Optimistic Adam without bias correction.
    OptAdam,
}

impl OptimizerKind {
    pub const ALL: [OptimizerKind; 8] = [
        OptimizerKind::Sgd,
        OptimizerKind::Sgdm,
        OptimizerKind::Isog,
        OptimizerKind::Ssog,
        OptimizerKind::Sseg,
        OptimizerKind::Omega,
        OptimizerKind::OmegaM,
        OptimizerKind::OptAdam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Sgd => "sgd",
            OptimizerKind::Sgdm => "sgdm",
            OptimizerKind::Isog => "isog",
            OptimizerKind::Ssog => "ssog",
            OptimizerKind::Sseg => "sseg",
            OptimizerKind::Omega => "omega",
            OptimizerKind::OmegaM => "omegam",
            OptimizerKind::OptAdam => "opt_adam",
        }
    }

    /// Oracle evaluations per step.
    pub fn oracle_calls(self) -> usize {
        match self {
            OptimizerKind::Ssog | OptimizerKind::Sseg => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        OptimizerKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| Error::InvalidParameter {
                name: "kind",
                reason: format!("unknown optimizer `{s}`"),
            })
    }
}

pub const DEFAULT_ALPHA: f64 = 1.0;
pub const DEFAULT_BETA: f64 = 0.9;
/// Adam second-moment decay. Conventional Adam value, not tuned here.
pub const DEFAULT_GAMMA: f64 = 0.999;
/// Adam denominator offset. Conventional Adam value, not tuned here.
pub const DEFAULT_EPSILON: f64 = 1e-8;

/// Hyper-parameters of one stepper. Fields that a kind does not use are
/// still validated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    /// Step size.
    pub eta: f64,
    /// Optimism.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// EMA decay; also the momentum and dampening of SGDM.
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}
fn default_beta() -> f64 {
    DEFAULT_BETA
}
fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}
fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

impl OptimizerConfig {
    pub fn new(kind: OptimizerKind, eta: f64) -> Self {
        OptimizerConfig {
            kind,
            eta,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// `eta` must be finite and non-negative (zero freezes the iterate).
    /// `alpha` may be any finite value: OmegaM maps onto Omega with optimism
    /// `α(1−β)−β`, which is negative for most `β`.
    pub fn validate(&self) -> Result<()> {
        let invalid = |name, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        if !self.eta.is_finite() || self.eta < 0.0 {
            return invalid("eta", "must be finite and non-negative");
        }
        if !self.alpha.is_finite() {
            return invalid("alpha", "must be finite");
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return invalid("beta", "must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return invalid("gamma", "must lie in [0, 1]");
        }
        if !self.epsilon.is_finite() || self.epsilon <= 0.0 {
            return invalid("epsilon", "must be positive");
        }
        Ok(())
    }
}
