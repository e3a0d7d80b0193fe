use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::experiment::{run_on_game, ExperimentConfig, Trajectory};
use crate::error::{Error, Result};
use crate::games::{nash_equilibrium, Band, GameSpec, JointPoint, StochasticGame};
use crate::optim::{OptimizerConfig, OptimizerKind};
use crate::scalar::Real;

/// Which players an optimizer axis applies to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Both,
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Beta(Target),
    Eta(Target),
    Kind(Target),
    BatchSize,
    KappaA,
    KappaB,
    KappaC,
}

impl SweepAxis {
    fn alters_game(self) -> bool {
        matches!(self, SweepAxis::KappaA | SweepAxis::KappaB | SweepAxis::KappaC)
    }

    /// Returns `base` with the axis set to `value`.
    pub fn apply(self, base: &ExperimentConfig, value: &str) -> Result<ExperimentConfig> {
        let bad = |reason: String| Error::InvalidSweep(format!("{self}={value}: {reason}"));
        let number = || value.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
        let mut cfg = base.clone();
        let optimizers = |cfg: &mut ExperimentConfig, target: Target, f: &dyn Fn(&mut OptimizerConfig)| {
            if matches!(target, Target::Both | Target::X) {
                f(&mut cfg.optimizer_x);
            }
            if matches!(target, Target::Both | Target::Y) {
                f(&mut cfg.optimizer_y);
            }
        };
        let kappa = |band: Option<Band>, name: &str| -> Result<Band> {
            let band = band.ok_or_else(|| bad(format!("the game has no {name} term")))?;
            let kappa = number()?;
            // the upper end stays put, the lower end moves to upper / κ
            Band::new(band.upper / kappa, band.upper).map_err(|e| bad(e.to_string()))
        };
        match self {
            SweepAxis::Beta(t) => {
                let beta = number()?;
                optimizers(&mut cfg, t, &|o| o.beta = beta);
            }
            SweepAxis::Eta(t) => {
                let eta = number()?;
                optimizers(&mut cfg, t, &|o| o.eta = eta);
            }
            SweepAxis::Kind(t) => {
                let kind: OptimizerKind = value.parse().map_err(|e: Error| bad(e.to_string()))?;
                optimizers(&mut cfg, t, &|o| o.kind = kind);
            }
            SweepAxis::BatchSize => {
                cfg.batch_size = value
                    .trim()
                    .parse()
                    .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
            }
            SweepAxis::KappaA => cfg.game.band_a = Some(kappa(cfg.game.band_a, "x-quadratic")?),
            SweepAxis::KappaB => cfg.game.band_b = kappa(Some(cfg.game.band_b), "coupling")?,
            SweepAxis::KappaC => cfg.game.band_c = Some(kappa(cfg.game.band_c, "y-quadratic")?),
        }
        cfg.validate().map_err(|e| bad(e.to_string()))?;
        Ok(cfg)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = |t: &Target| match t {
            Target::Both => "",
            Target::X => "x.",
            Target::Y => "y.",
        };
        match self {
            SweepAxis::Beta(t) => write!(f, "{}beta", prefix(t)),
            SweepAxis::Eta(t) => write!(f, "{}eta", prefix(t)),
            SweepAxis::Kind(t) => write!(f, "{}kind", prefix(t)),
            SweepAxis::BatchSize => f.write_str("batch_size"),
            SweepAxis::KappaA => f.write_str("kappa_a"),
            SweepAxis::KappaB => f.write_str("kappa_b"),
            SweepAxis::KappaC => f.write_str("kappa_c"),
        }
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    /// `beta`, `eta` and `kind` accept an `x.` or `y.` prefix to target one
    /// player; unprefixed they apply to both.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let (target, name) = match key.split_once('.') {
            Some(("x", rest)) => (Target::X, rest),
            Some(("y", rest)) => (Target::Y, rest),
            Some(_) => return Err(Error::InvalidSweep(format!("unknown axis `{s}`"))),
            None => (Target::Both, key.as_str()),
        };
        let axis = match name {
            "beta" => SweepAxis::Beta(target),
            "eta" => SweepAxis::Eta(target),
            "kind" | "optimizer" => SweepAxis::Kind(target),
            "batch_size" if target == Target::Both => SweepAxis::BatchSize,
            "kappa_a" if target == Target::Both => SweepAxis::KappaA,
            "kappa_b" if target == Target::Both => SweepAxis::KappaB,
            "kappa_c" if target == Target::Both => SweepAxis::KappaC,
            _ => return Err(Error::InvalidSweep(format!("unknown axis `{s}`"))),
        };
        Ok(axis)
    }
}

/// A labeled table of distances: one row per swept value, one column per
/// method or configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub axis: String,
    pub row_labels: Vec<String>,
    pub column_labels: Vec<String>,
    /// `cells[row][column]`.
    pub cells: Vec<Vec<f64>>,
}

impl SweepResult {
    pub fn new(
        axis: String,
        row_labels: Vec<String>,
        column_labels: Vec<String>,
        cells: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if cells.len() != row_labels.len() || cells.iter().any(|row| row.len() != column_labels.len()) {
            return Err(Error::InvalidSweep(format!(
                "table shape does not match {} rows x {} columns",
                row_labels.len(),
                column_labels.len()
            )));
        }
        Ok(SweepResult {
            axis,
            row_labels,
            column_labels,
            cells,
        })
    }

    pub fn get(&self, row: &str, column: &str) -> Option<f64> {
        let r = self.row_labels.iter().position(|l| l == row)?;
        let c = self.column_labels.iter().position(|l| l == column)?;
        Some(self.cells[r][c])
    }
}

impl fmt::Display for SweepResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .column_labels
            .iter()
            .map(String::len)
            .chain(std::iter::once(12))
            .max()
            .unwrap_or(12);
        let first = self
            .row_labels
            .iter()
            .map(String::len)
            .chain(std::iter::once(self.axis.len()))
            .max()
            .unwrap_or(8);
        write!(f, "{:<first$}", self.axis)?;
        for label in &self.column_labels {
            write!(f, "  {label:>width$}")?;
        }
        writeln!(f)?;
        for (label, row) in self.row_labels.iter().zip(&self.cells) {
            write!(f, "{label:<first$}")?;
            for v in row {
                write!(f, "  {:>width$}", format!("{v:.6}"))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

struct PreparedGame<T> {
    game: StochasticGame<T>,
    w_star: JointPoint<T>,
}

fn prepare<T: Real>(spec: &GameSpec) -> Result<PreparedGame<T>> {
    let game = StochasticGame::generate(spec)?;
    let w_star = nash_equilibrium(&game)?.w_star;
    Ok(PreparedGame { game, w_star })
}

/// Runs every `(config)` with one shared game per distinct game spec.
/// Results come back in input order regardless of scheduling.
pub fn run_all<T: Real>(configs: &[ExperimentConfig]) -> Result<Vec<Trajectory>> {
    let mut specs: Vec<&GameSpec> = Vec::new();
    for cfg in configs {
        cfg.validate()?;
        if !specs.contains(&&cfg.game) {
            specs.push(&cfg.game);
        }
    }
    let games: Vec<PreparedGame<T>> = specs.par_iter().map(|s| prepare(s)).collect::<Result<_>>()?;
    let index: HashMap<usize, usize> = configs
        .iter()
        .enumerate()
        .map(|(i, cfg)| (i, specs.iter().position(|s| **s == cfg.game).expect("spec registered")))
        .collect();
    configs
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| {
            let g = &games[index[&i]];
            run_on_game(&g.game, &g.w_star, cfg)
        })
        .collect()
}

/// Distance at `at_step` for each base configuration (columns) and swept
/// value (rows). Each cell runs exactly `at_step` steps; the game is shared
/// across cells unless the axis changes it.
pub fn sweep_many<T: Real>(
    bases: &[(String, ExperimentConfig)],
    axis: SweepAxis,
    values: &[String],
    at_step: usize,
) -> Result<SweepResult> {
    if values.is_empty() {
        return Err(Error::InvalidSweep("no values given".into()));
    }
    if bases.is_empty() {
        return Err(Error::InvalidSweep("no base configurations given".into()));
    }
    if at_step == 0 {
        return Err(Error::InvalidSweep("at_step must be positive".into()));
    }
    let mut configs = Vec::with_capacity(values.len() * bases.len());
    for value in values {
        for (_, base) in bases {
            let mut cfg = axis.apply(base, value)?;
            cfg.steps = at_step;
            if !axis.alters_game() {
                debug_assert_eq!(cfg.game, base.game);
            }
            configs.push(cfg);
        }
    }
    let trajectories = run_all::<T>(&configs)?;
    let cells = trajectories
        .chunks(bases.len())
        .map(|row| row.iter().map(|t| t.distance_at(at_step)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    SweepResult::new(
        axis.to_string(),
        values.iter().map(|v| v.trim().to_string()).collect(),
        bases.iter().map(|(label, _)| label.clone()).collect(),
        cells,
    )
}

/// Single-column sweep labeled by the base's method.
pub fn sweep<T: Real>(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[String],
    at_step: usize,
) -> Result<SweepResult> {
    sweep_many::<T>(&[(base.method_label(), base.clone())], axis, values, at_step)
}

/// One row: the distance of every trajectory at the greatest logged step
/// `<= at_step`, in columns labeled by config digest.
pub fn summarize(trajectories: &[Trajectory], at_step: usize) -> Result<SweepResult> {
    if trajectories.is_empty() {
        return Err(Error::NoTrajectories);
    }
    let row = trajectories
        .iter()
        .map(|t| t.distance_at(at_step))
        .collect::<Result<Vec<_>>>()?;
    SweepResult::new(
        "step".into(),
        vec![at_step.to_string()],
        trajectories.iter().map(|t| t.config_digest.clone()).collect(),
        vec![row],
    )
}
