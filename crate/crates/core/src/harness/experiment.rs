use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::batch::sample_batch;
use crate::error::{Error, Result};
use crate::games::{distance_to_optimum, nash_equilibrium, GameSpec, JointPoint, StochasticGame};
use crate::optim::{OptimizerConfig, Player, Stepper};
use crate::scalar::Real;

/// Runs past this distance are stopped and marked diverged.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

const STREAM_INIT: u64 = 1;
const STREAM_BATCH: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameSpec,
    pub optimizer_x: OptimizerConfig,
    /// Equal to `optimizer_x` when one joint optimizer drives both players.
    pub optimizer_y: OptimizerConfig,
    pub steps: usize,
    pub batch_size: usize,
    /// Seeds the initial point and the batch stream; the game has its own
    /// seed.
    pub seed: u64,
    pub log_every: usize,
}

impl ExperimentConfig {
    pub const DEFAULT_STEPS: usize = 5000;
    pub const DEFAULT_BATCH_SIZE: usize = 1;
    pub const DEFAULT_LOG_EVERY: usize = 10;

    pub fn new(game: GameSpec, optimizer: OptimizerConfig) -> Self {
        ExperimentConfig {
            game,
            optimizer_x: optimizer,
            optimizer_y: optimizer,
            steps: Self::DEFAULT_STEPS,
            batch_size: Self::DEFAULT_BATCH_SIZE,
            seed: 0,
            log_every: Self::DEFAULT_LOG_EVERY,
        }
    }

    pub fn per_player(game: GameSpec, optimizer_x: OptimizerConfig, optimizer_y: OptimizerConfig) -> Self {
        ExperimentConfig {
            optimizer_y,
            ..Self::new(game, optimizer_x)
        }
    }

    pub fn is_joint(&self) -> bool {
        self.optimizer_x == self.optimizer_y
    }

    /// Short method label: `omega`, or `sgd/omega` for per-player setups.
    pub fn method_label(&self) -> String {
        if self.is_joint() {
            self.optimizer_x.kind.to_string()
        } else {
            format!("{}/{}", self.optimizer_x.kind, self.optimizer_y.kind)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.game.validate()?;
        self.optimizer_x.validate()?;
        self.optimizer_y.validate()?;
        let invalid = |name, reason: String| Err(Error::InvalidParameter { name, reason });
        if self.steps == 0 {
            return invalid("steps", "must be positive".into());
        }
        if self.log_every == 0 {
            return invalid("log_every", "must be positive".into());
        }
        if self.batch_size == 0 || self.batch_size > self.game.n {
            return invalid(
                "batch_size",
                format!("must lie in [1, {}], got {}", self.game.n, self.batch_size),
            );
        }
        Ok(())
    }

    /// First 12 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..6])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Record {
    pub step: usize,
    pub distance: f64,
    pub payoff: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub records: Vec<Record>,
    pub final_distance: f64,
    pub config_digest: String,
    /// The run stopped early because the distance left the finite range
    /// or exceeded [`DIVERGENCE_THRESHOLD`].
    pub diverged: bool,
}

impl Trajectory {
    pub fn from_records(records: Vec<Record>, config_digest: String, diverged: bool) -> Result<Self> {
        let last = records.last().ok_or(Error::MalformedCsv {
            row: 0,
            reason: "trajectory has no records".into(),
        })?;
        if let Some(w) = records.windows(2).find(|w| w[1].step <= w[0].step) {
            return Err(Error::MalformedCsv {
                row: 0,
                reason: format!("steps not increasing: {} then {}", w[0].step, w[1].step),
            });
        }
        Ok(Trajectory {
            final_distance: last.distance,
            records,
            config_digest,
            diverged,
        })
    }

    pub fn last_step(&self) -> usize {
        self.records.last().map_or(0, |r| r.step)
    }

    pub fn initial_distance(&self) -> f64 {
        self.records[0].distance
    }

    /// Distance at the greatest logged step `<= step`.
    pub fn distance_at(&self, step: usize) -> Result<f64> {
        let idx = self.records.partition_point(|r| r.step <= step);
        if idx == 0 {
            return Err(Error::MissingRecord(step));
        }
        Ok(self.records[idx - 1].distance)
    }
}

/// Isotropic unit Gaussian starting point drawn from the init stream of `seed`.
pub fn initial_point<T: Real>(d_x: usize, d_y: usize, seed: u64) -> JointPoint<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_INIT);
    let data = ndarray::Array1::from_shape_simple_fn(d_x + d_y, || T::of(StandardNormal.sample(&mut rng)));
    JointPoint::from_joint(data, d_x).expect("d_x within length")
}

/// Generates the game, solves for its equilibrium and runs the optimizer.
pub fn run_experiment<T: Real>(config: &ExperimentConfig) -> Result<Trajectory> {
    config.validate()?;
    let game = StochasticGame::<T>::generate(&config.game)?;
    let nash = nash_equilibrium(&game)?;
    run_on_game(&game, &nash.w_star, config)
}

/// Runs `config` against an existing game with known optimum `w_star`.
/// `config.game` is only used for the digest.
pub fn run_on_game<T: Real>(
    game: &StochasticGame<T>,
    w_star: &JointPoint<T>,
    config: &ExperimentConfig,
) -> Result<Trajectory> {
    config.validate()?;
    if config.batch_size > game.n() {
        return Err(Error::InvalidParameter {
            name: "batch_size",
            reason: format!("must lie in [1, {}], got {}", game.n(), config.batch_size),
        });
    }
    let (d_x, d_y) = (game.d_x(), game.d_y());
    let mut w = initial_point::<T>(d_x, d_y, config.seed);
    let mut batch_rng = ChaCha8Rng::seed_from_u64(config.seed);
    batch_rng.set_stream(STREAM_BATCH);

    let batch0 = sample_batch(game.n(), config.batch_size, &mut batch_rng)?;
    let mut stepper = if config.is_joint() {
        Stepper::init(config.optimizer_x, game, &w, &batch0)?
    } else {
        Stepper::compose(
            Stepper::init_player(config.optimizer_x, Player::X, game, &w, &batch0)?,
            Stepper::init_player(config.optimizer_y, Player::Y, game, &w, &batch0)?,
        )?
    };

    let full = game.full_batch();
    let record = |step: usize, w: &JointPoint<T>, distance: T| -> Result<Record> {
        Ok(Record {
            step,
            distance: distance.as_f64(),
            payoff: game.payoff(&full, w)?.as_f64(),
        })
    };

    let mut records = vec![record(0, &w, distance_to_optimum(&w, w_star)?)?];
    let mut diverged = false;
    for t in 1..=config.steps {
        let batch = sample_batch(game.n(), config.batch_size, &mut batch_rng)?;
        w = stepper.step(game, &batch, &w)?;
        let distance = distance_to_optimum(&w, w_star)?;
        let d = distance.as_f64();
        if !d.is_finite() || d > DIVERGENCE_THRESHOLD {
            records.push(Record {
                step: t,
                distance: d,
                payoff: game.payoff(&full, &w)?.as_f64(),
            });
            diverged = true;
            break;
        }
        if t % config.log_every == 0 || t == config.steps {
            records.push(record(t, &w, distance)?);
        }
    }
    Trajectory::from_records(records, config.digest(), diverged)
}

/// Population standard deviation of the distance over the last `window`
/// records.
pub fn oscillation_amplitude(trajectory: &Trajectory, window: usize) -> Result<f64> {
    let records = trajectory.records.len();
    if window < 2 || window > records {
        return Err(Error::InvalidWindow { window, records });
    }
    let tail = &trajectory.records[records - window..];
    let mean = tail.iter().map(|r| r.distance).sum::<f64>() / window as f64;
    let var = tail.iter().map(|r| (r.distance - mean).powi(2)).sum::<f64>() / window as f64;
    Ok(var.sqrt())
}
