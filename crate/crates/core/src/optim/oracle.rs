use std::cell::Cell;

use crate::error::Result;
use crate::games::{FieldValue, JointPoint, StochasticGame};
use crate::scalar::Real;

/// Evaluates the mini-batch gradient field. Implementations must be pure:
/// equal arguments give equal results.
pub trait GradientOracle<T: Real> {
    fn field(&self, w: &JointPoint<T>, batch: &[usize]) -> Result<FieldValue<T>>;
}

impl<T: Real> GradientOracle<T> for StochasticGame<T> {
    fn field(&self, w: &JointPoint<T>, batch: &[usize]) -> Result<FieldValue<T>> {
        self.gradient_field(batch, w)
    }
}

impl<T: Real, O: GradientOracle<T> + ?Sized> GradientOracle<T> for &O {
    fn field(&self, w: &JointPoint<T>, batch: &[usize]) -> Result<FieldValue<T>> {
        (**self).field(w, batch)
    }
}

/// Oracle backed by a closure; handy for deterministic test fields.
pub struct FnOracle<F>(pub F);

impl<T, F> GradientOracle<T> for FnOracle<F>
where
    T: Real,
    F: Fn(&JointPoint<T>, &[usize]) -> FieldValue<T>,
{
    fn field(&self, w: &JointPoint<T>, batch: &[usize]) -> Result<FieldValue<T>> {
        Ok((self.0)(w, batch))
    }
}

/// Wraps an oracle and counts its evaluations.
pub struct CountingOracle<O> {
    inner: O,
    calls: Cell<usize>,
}

impl<O> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        CountingOracle {
            inner,
            calls: Cell::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }

    pub fn reset(&self) {
        self.calls.set(0);
    }
}

impl<T: Real, O: GradientOracle<T>> GradientOracle<T> for CountingOracle<O> {
    fn field(&self, w: &JointPoint<T>, batch: &[usize]) -> Result<FieldValue<T>> {
        self.calls.set(self.calls.get() + 1);
        self.inner.field(w, batch)
    }
}
