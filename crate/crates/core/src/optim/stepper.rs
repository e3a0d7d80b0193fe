use std::ops::Range;

use ndarray::{Array1, ArrayView1, Zip};

use super::config::{OptimizerConfig, OptimizerKind};
use super::oracle::GradientOracle;
use crate::error::{Error, Result};
use crate::games::{FieldValue, JointPoint};
use crate::scalar::Real;

/// Which coordinates of the joint iterate a stepper updates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    Joint,
    X,
    Y,
}

impl Player {
    fn range(self, d_x: usize, d_y: usize) -> Range<usize> {
        match self {
            Player::Joint => 0..d_x + d_y,
            Player::X => 0..d_x,
            Player::Y => d_x..d_x + d_y,
        }
    }
}

/// Per-block optimizer memory. Only the fields used by the kind are `Some`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepperState<T> {
    /// Previous stochastic field (ISOG).
    pub prev_field: Option<Array1<T>>,
    /// EMA of observed fields (Omega, OmegaM, optimistic Adam).
    pub ema_field: Option<Array1<T>>,
    /// EMA before the latest update (OmegaM, optimistic Adam).
    pub prev_ema_field: Option<Array1<T>>,
    /// EMA of squared fields (optimistic Adam).
    pub second_moment: Option<Array1<T>>,
    /// Dampened momentum buffer (SGDM); with dampening β it is an EMA.
    pub momentum_buffer: Option<Array1<T>>,
    /// Previous iterate block (SSOG).
    pub prev_point: Option<Array1<T>>,
    pub step_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
struct Part<T> {
    player: Player,
    config: OptimizerConfig,
    state: StepperState<T>,
}

impl<T: Real> Part<T> {
    fn init(config: OptimizerConfig, player: Player, g0: ArrayView1<T>) -> Self {
        let mut state = StepperState::default();
        match config.kind {
            OptimizerKind::Sgd | OptimizerKind::Ssog | OptimizerKind::Sseg => {}
            OptimizerKind::Isog => state.prev_field = Some(g0.to_owned()),
            OptimizerKind::Sgdm => state.momentum_buffer = Some(g0.to_owned()),
            OptimizerKind::Omega => state.ema_field = Some(g0.to_owned()),
            OptimizerKind::OmegaM => {
                state.ema_field = Some(g0.to_owned());
                state.prev_ema_field = Some(g0.to_owned());
            }
            OptimizerKind::OptAdam => {
                state.ema_field = Some(g0.to_owned());
                state.prev_ema_field = Some(g0.to_owned());
                state.second_moment = Some(g0.mapv(|e| e * e));
            }
        }
        Part { player, config, state }
    }

    /// Block of the second evaluation point, for two-call methods.
    fn probe(&self, w: ArrayView1<T>, g: ArrayView1<T>) -> Option<Array1<T>> {
        match self.config.kind {
            OptimizerKind::Sseg => {
                let mut half = w.to_owned();
                half.scaled_add(-T::of(self.config.eta), &g);
                Some(half)
            }
            // w_{t-1}; at t = 0 there is none and w_t stands in, which turns
            // the first update into plain descent-ascent.
            OptimizerKind::Ssog => Some(self.state.prev_point.clone().unwrap_or_else(|| w.to_owned())),
            _ => None,
        }
    }

    fn update(&mut self, w: ArrayView1<T>, g: ArrayView1<T>, probe_g: Option<ArrayView1<T>>) -> Result<Array1<T>> {
        let cfg = self.config;
        let eta = T::of(cfg.eta);
        let alpha = T::of(cfg.alpha);
        let beta = T::of(cfg.beta);
        let one = T::one();
        let name = cfg.kind.name();
        let missing = || Error::Uninitialized(name);
        let state = &mut self.state;

        let mut next = w.to_owned();
        match cfg.kind {
            OptimizerKind::Sgd => next.scaled_add(-eta, &g),
            OptimizerKind::Sgdm => {
                let buffer = state.momentum_buffer.as_mut().ok_or_else(missing)?;
                Zip::from(&mut *buffer)
                    .and(&g)
                    .for_each(|d, &gi| *d = beta * *d + (one - beta) * gi);
                next.scaled_add(-eta, buffer);
            }
            OptimizerKind::Isog => {
                let prev = state.prev_field.as_mut().ok_or_else(missing)?;
                Zip::from(&mut next)
                    .and(&g)
                    .and(&*prev)
                    .for_each(|wi, &gi, &pi| *wi -= eta * ((one + alpha) * gi - alpha * pi));
                prev.assign(&g);
            }
            OptimizerKind::Ssog => {
                let g_prev = probe_g.ok_or_else(missing)?;
                Zip::from(&mut next)
                    .and(&g)
                    .and(&g_prev)
                    .for_each(|wi, &gi, &pi| *wi -= eta * ((one + alpha) * gi - alpha * pi));
                state.prev_point = Some(w.to_owned());
            }
            OptimizerKind::Sseg => {
                let g_half = probe_g.ok_or_else(missing)?;
                next.scaled_add(-eta, &g_half);
            }
            OptimizerKind::Omega => {
                let ema = state.ema_field.as_mut().ok_or_else(missing)?;
                // correction uses the EMA before it absorbs the current field
                Zip::from(&mut next)
                    .and(&g)
                    .and(&*ema)
                    .for_each(|wi, &gi, &ei| *wi -= eta * ((one + alpha) * gi - alpha * ei));
                Zip::from(ema)
                    .and(&g)
                    .for_each(|e, &gi| *e = (one - beta) * gi + beta * *e);
            }
            OptimizerKind::OmegaM => {
                let ema = state.ema_field.as_mut().ok_or_else(missing)?;
                let prev = state.prev_ema_field.as_mut().ok_or_else(missing)?;
                prev.assign(ema);
                Zip::from(&mut *ema)
                    .and(&g)
                    .for_each(|e, &gi| *e = (one - beta) * gi + beta * *e);
                Zip::from(&mut next)
                    .and(&*ema)
                    .and(&*prev)
                    .for_each(|wi, &ei, &pi| *wi -= eta * ((one + alpha) * ei - alpha * pi));
            }
            OptimizerKind::OptAdam => {
                let gamma = T::of(cfg.gamma);
                let eps = T::of(cfg.epsilon);
                let ema = state.ema_field.as_mut().ok_or_else(missing)?;
                let prev = state.prev_ema_field.as_mut().ok_or_else(missing)?;
                let second = state.second_moment.as_mut().ok_or_else(missing)?;
                let ratio = |m: T, v: T| m / (v.sqrt() + eps);
                let u_prev = Zip::from(&*ema).and(&*second).map_collect(|&m, &v| ratio(m, v));
                prev.assign(ema);
                Zip::from(&mut *ema)
                    .and(&g)
                    .for_each(|e, &gi| *e = (one - beta) * gi + beta * *e);
                Zip::from(&mut *second)
                    .and(&g)
                    .for_each(|v, &gi| *v = (one - gamma) * gi * gi + gamma * *v);
                Zip::from(&mut next)
                    .and(&*ema)
                    .and(&*second)
                    .and(&u_prev)
                    .for_each(|wi, &m, &v, &up| {
                        let u = ratio(m, v);
                        *wi -= eta * (u + alpha * (u - up));
                    });
            }
        }
        state.step_count += 1;
        Ok(next)
    }
}

/// An optimizer bound to its state. A stepper either drives the whole joint
/// iterate or one player's block; two single-player steppers compose into a
/// joint one with [`Stepper::compose`].
#[derive(Clone, Debug, PartialEq)]
pub struct Stepper<T> {
    parts: Vec<Part<T>>,
    d_x: usize,
    d_y: usize,
}

fn check_field<T: Real>(g: &FieldValue<T>, w: &JointPoint<T>) -> Result<()> {
    if !g.same_shape(w.d_x(), w.d_y()) {
        return Err(Error::DimensionMismatch {
            context: "oracle output vs iterate",
            expected: w.len(),
            actual: g.len(),
        });
    }
    Ok(())
}

impl<T: Real> Stepper<T> {
    /// Joint stepper. State that needs an initial field is seeded with
    /// `oracle(w0, batch0)`, so the first step is a plain descent-ascent step.
    pub fn init<O: GradientOracle<T> + ?Sized>(
        config: OptimizerConfig,
        oracle: &O,
        w0: &JointPoint<T>,
        batch0: &[usize],
    ) -> Result<Self> {
        Self::init_player(config, Player::Joint, oracle, w0, batch0)
    }

    /// Stepper restricted to one player's block of the field.
    pub fn init_player<O: GradientOracle<T> + ?Sized>(
        config: OptimizerConfig,
        player: Player,
        oracle: &O,
        w0: &JointPoint<T>,
        batch0: &[usize],
    ) -> Result<Self> {
        config.validate()?;
        let (d_x, d_y) = (w0.d_x(), w0.d_y());
        let range = player.range(d_x, d_y);
        let needs_field = !matches!(
            config.kind,
            OptimizerKind::Sgd | OptimizerKind::Ssog | OptimizerKind::Sseg
        );
        let part = if needs_field {
            let g0 = oracle.field(w0, batch0)?;
            check_field(&g0, w0)?;
            Part::init(config, player, g0.as_array().slice(ndarray::s![range]))
        } else {
            Part::init(config, player, Array1::zeros(0).view())
        };
        Ok(Stepper {
            parts: vec![part],
            d_x,
            d_y,
        })
    }

    /// Joins an x-player stepper and a y-player stepper. Both see the same
    /// oracle evaluations on the same batch; the joint step costs as many
    /// evaluations as the more expensive child.
    pub fn compose(stepper_x: Stepper<T>, stepper_y: Stepper<T>) -> Result<Self> {
        let covers = |s: &Stepper<T>, p: Player| s.parts.len() == 1 && s.parts[0].player == p;
        if !covers(&stepper_x, Player::X) {
            return Err(Error::Composition("first stepper must drive the x player".into()));
        }
        if !covers(&stepper_y, Player::Y) {
            return Err(Error::Composition("second stepper must drive the y player".into()));
        }
        if stepper_x.d_x != stepper_y.d_x || stepper_x.d_y != stepper_y.d_y {
            return Err(Error::Composition(format!(
                "block dimensions differ: ({}, {}) vs ({}, {})",
                stepper_x.d_x, stepper_x.d_y, stepper_y.d_x, stepper_y.d_y
            )));
        }
        if stepper_x.step_count() != stepper_y.step_count() {
            return Err(Error::Composition(
                "children have taken different numbers of steps".into(),
            ));
        }
        let (d_x, d_y) = (stepper_x.d_x, stepper_x.d_y);
        let mut parts = stepper_x.parts;
        parts.extend(stepper_y.parts);
        Ok(Stepper { parts, d_x, d_y })
    }

    pub fn step_count(&self) -> usize {
        self.parts[0].state.step_count
    }

    /// Configurations and states of the children, in block order.
    pub fn parts(&self) -> impl Iterator<Item = (Player, &OptimizerConfig, &StepperState<T>)> {
        self.parts.iter().map(|p| (p.player, &p.config, &p.state))
    }

    /// Oracle evaluations one call to [`Stepper::step`] makes.
    pub fn oracle_calls(&self) -> usize {
        self.parts
            .iter()
            .map(|p| p.config.kind.oracle_calls())
            .max()
            .unwrap_or(1)
    }

    /// Advances one simultaneous step on `batch` and returns `w_{t+1}`.
    /// Coordinates outside the stepper's blocks are returned unchanged.
    pub fn step<O: GradientOracle<T> + ?Sized>(
        &mut self,
        oracle: &O,
        batch: &[usize],
        w: &JointPoint<T>,
    ) -> Result<JointPoint<T>> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if !w.same_shape(self.d_x, self.d_y) {
            return Err(Error::DimensionMismatch {
                context: "stepper iterate",
                expected: self.d_x + self.d_y,
                actual: w.len(),
            });
        }
        let (d_x, d_y) = (self.d_x, self.d_y);
        let g = oracle.field(w, batch)?;
        check_field(&g, w)?;
        let wa = w.as_array();
        let ga = g.as_array();

        let probes: Vec<Option<Array1<T>>> = self
            .parts
            .iter()
            .map(|p| {
                let r = p.player.range(d_x, d_y);
                p.probe(wa.slice(ndarray::s![r.clone()]), ga.slice(ndarray::s![r]))
            })
            .collect();
        let probe_field = if probes.iter().any(Option::is_some) {
            let mut point = wa.clone();
            for (part, probe) in self.parts.iter().zip(&probes) {
                if let Some(block) = probe {
                    let r = part.player.range(d_x, d_y);
                    point.slice_mut(ndarray::s![r]).assign(block);
                }
            }
            let point = JointPoint::from_joint(point, d_x)?;
            let g2 = oracle.field(&point, batch)?;
            check_field(&g2, w)?;
            Some(g2)
        } else {
            None
        };

        let mut next = wa.clone();
        for part in &mut self.parts {
            let r = part.player.range(d_x, d_y);
            let probe_g = probe_field.as_ref().map(|f| f.as_array().slice(ndarray::s![r.clone()]));
            let block = part.update(
                wa.slice(ndarray::s![r.clone()]),
                ga.slice(ndarray::s![r.clone()]),
                probe_g,
            )?;
            next.slice_mut(ndarray::s![r]).assign(&block);
        }
        JointPoint::from_joint(next, d_x)
    }
}
