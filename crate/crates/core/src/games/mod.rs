//! Stochastic quadratic games
//!
//! ```text
//! ℓ_i(x, y) = ½ xᵀA_i x + a_iᵀx + xᵀB_i y − c_iᵀy − ½ yᵀC_i y
//! ```
//!
//! drawn from a fixed dataset of `n` samples. `x` minimizes, `y` maximizes.

mod nash;
mod point;
mod spectrum;

use ndarray::{s, Array1, Array2, ArrayView1, Zip};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use nash::{nash_equilibrium, NashSolution};
pub use point::{distance_to_optimum, FieldValue, JointPoint};
pub use spectrum::{sample_singular_band, sample_spd_with_band};

/// Closed interval `[lower, upper]` bounding eigenvalues or singular values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

impl Band {
    pub const UNIT: Band = Band { lower: 1.0, upper: 1.0 };

    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let band = Band { lower, upper };
        band.validate()?;
        Ok(band)
    }

    /// Band `[1/κ, 1]`: unit upper end and the given condition number.
    pub fn with_condition(kappa: f64) -> Result<Self> {
        Band::new(1.0 / kappa, 1.0)
    }

    pub fn condition_number(&self) -> f64 {
        self.upper / self.lower
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_nan() || self.lower <= 0.0 || !self.upper.is_finite() || self.upper < self.lower {
            return Err(Error::InvalidBand {
                lower: self.lower,
                upper: self.upper,
            });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameKind {
    /// `A = C = 0`.
    Bilinear,
    Quadratic,
    /// Quadratic in `x`, linear in `y` (`C = 0`).
    QuadraticLinear,
}

impl GameKind {
    pub fn name(self) -> &'static str {
        match self {
            GameKind::Bilinear => "bilinear",
            GameKind::Quadratic => "quadratic",
            GameKind::QuadraticLinear => "quadratic_linear",
        }
    }
}

impl std::fmt::Display for GameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Recipe for a generated game. An absent band means the matching matrix is
/// identically zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub d_x: usize,
    pub d_y: usize,
    pub n: usize,
    pub band_a: Option<Band>,
    pub band_b: Band,
    pub band_c: Option<Band>,
    pub seed: u64,
}

impl GameSpec {
    /// 100-dimensional players, 100 samples and unit bands.
    pub fn defaults(kind: GameKind) -> Self {
        let (band_a, band_c) = match kind {
            GameKind::Bilinear => (None, None),
            GameKind::Quadratic => (Some(Band::UNIT), Some(Band::UNIT)),
            GameKind::QuadraticLinear => (Some(Band::UNIT), None),
        };
        GameSpec {
            d_x: 100,
            d_y: 100,
            n: 100,
            band_a,
            band_b: Band::UNIT,
            band_c,
            seed: 0,
        }
    }

    pub fn kind(&self) -> GameKind {
        match (self.band_a.is_some(), self.band_c.is_some()) {
            (false, false) => GameKind::Bilinear,
            (true, true) => GameKind::Quadratic,
            (true, false) => GameKind::QuadraticLinear,
            // rejected by validate()
            (false, true) => GameKind::Quadratic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("d_x", self.d_x), ("d_y", self.d_y), ("n", self.n)] {
            if value == 0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be positive".into(),
                });
            }
        }
        if self.band_a.is_none() && self.band_c.is_some() {
            return Err(Error::InvalidParameter {
                name: "band_c",
                reason: "a quadratic y-term requires a quadratic x-term".into(),
            });
        }
        self.band_b.validate()?;
        if let Some(band) = &self.band_a {
            band.validate()?;
        }
        if let Some(band) = &self.band_c {
            band.validate()?;
        }
        Ok(())
    }
}

/// One realization `(A_i, B_i, C_i, a_i, c_i)`. Zero quadratic terms are
/// stored as `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct GameSample<T> {
    pub quad_x: Option<Array2<T>>,
    pub coupling: Array2<T>,
    pub quad_y: Option<Array2<T>>,
    pub lin_x: Array1<T>,
    pub lin_y: Array1<T>,
}

impl<T: Real> GameSample<T> {
    pub fn d_x(&self) -> usize {
        self.coupling.nrows()
    }

    pub fn d_y(&self) -> usize {
        self.coupling.ncols()
    }

    fn check_shape(&self, d_x: usize, d_y: usize) -> Result<()> {
        let mismatch = |context, expected, actual| Error::DimensionMismatch {
            context,
            expected,
            actual,
        };
        if self.coupling.dim() != (d_x, d_y) {
            return Err(mismatch("sample coupling matrix", d_x * d_y, self.coupling.len()));
        }
        if self.lin_x.len() != d_x {
            return Err(mismatch("sample x-linear term", d_x, self.lin_x.len()));
        }
        if self.lin_y.len() != d_y {
            return Err(mismatch("sample y-linear term", d_y, self.lin_y.len()));
        }
        if let Some(a) = &self.quad_x {
            if a.dim() != (d_x, d_x) {
                return Err(mismatch("sample x-quadratic term", d_x * d_x, a.len()));
            }
        }
        if let Some(c) = &self.quad_y {
            if c.dim() != (d_y, d_y) {
                return Err(mismatch("sample y-quadratic term", d_y * d_y, c.len()));
            }
        }
        Ok(())
    }

    fn payoff(&self, x: ArrayView1<T>, y: ArrayView1<T>) -> T {
        let half = T::of(0.5);
        let mut value = self.lin_x.dot(&x) + x.dot(&self.coupling.dot(&y)) - self.lin_y.dot(&y);
        if let Some(a) = &self.quad_x {
            value += half * x.dot(&a.dot(&x));
        }
        if let Some(c) = &self.quad_y {
            value -= half * y.dot(&c.dot(&y));
        }
        value
    }

    /// Adds `weight · F_i(w)` into `out`.
    fn accumulate_field(&self, x: ArrayView1<T>, y: ArrayView1<T>, weight: T, out: &mut Array1<T>) {
        let d_x = x.len();
        let mut gx = self.coupling.dot(&y) + &self.lin_x;
        if let Some(a) = &self.quad_x {
            gx += &a.dot(&x);
        }
        let mut gy = &self.lin_y - &self.coupling.t().dot(&x);
        if let Some(c) = &self.quad_y {
            gy += &c.dot(&y);
        }
        out.slice_mut(s![..d_x]).scaled_add(weight, &gx);
        out.slice_mut(s![d_x..]).scaled_add(weight, &gy);
    }
}

/// A fixed dataset of game samples with cached sample averages.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticGame<T> {
    spec: Option<GameSpec>,
    kind: GameKind,
    d_x: usize,
    d_y: usize,
    samples: Vec<GameSample<T>>,
    average: GameSample<T>,
}

impl<T: Real> StochasticGame<T> {
    /// Generates the dataset described by `spec`; fully determined by
    /// `spec.seed`.
    pub fn generate(spec: &GameSpec) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let noise_x = Normal::new(0.0, (1.0 / spec.d_x as f64).sqrt()).expect("positive variance");
        let noise_y = Normal::new(0.0, (1.0 / spec.d_y as f64).sqrt()).expect("positive variance");

        let mut samples = Vec::with_capacity(spec.n);
        for _ in 0..spec.n {
            let quad_x = spec
                .band_a
                .map(|b| sample_spd_with_band::<T, _>(spec.d_x, b.lower, b.upper, &mut rng))
                .transpose()?;
            let coupling =
                sample_singular_band::<T, _>(spec.d_x, spec.d_y, spec.band_b.lower, spec.band_b.upper, &mut rng)?;
            let quad_y = spec
                .band_c
                .map(|b| sample_spd_with_band::<T, _>(spec.d_y, b.lower, b.upper, &mut rng))
                .transpose()?;
            let lin_x = Array1::from_shape_simple_fn(spec.d_x, || T::of(noise_x.sample(&mut rng)));
            let lin_y = Array1::from_shape_simple_fn(spec.d_y, || T::of(noise_y.sample(&mut rng)));
            samples.push(GameSample {
                quad_x,
                coupling,
                quad_y,
                lin_x,
                lin_y,
            });
        }
        let mut game = Self::from_samples(samples)?;
        game.kind = spec.kind();
        game.spec = Some(spec.clone());
        Ok(game)
    }

    /// Builds a game from explicit samples. The kind is inferred from which
    /// quadratic terms are present.
    pub fn from_samples(samples: Vec<GameSample<T>>) -> Result<Self> {
        let first = samples.first().ok_or(Error::InvalidParameter {
            name: "n",
            reason: "a game needs at least one sample".into(),
        })?;
        let (d_x, d_y) = (first.d_x(), first.d_y());
        let has_a = samples.iter().any(|s| s.quad_x.is_some());
        let has_c = samples.iter().any(|s| s.quad_y.is_some());
        for sample in &samples {
            sample.check_shape(d_x, d_y)?;
        }
        let kind = match (has_a, has_c) {
            (false, false) => GameKind::Bilinear,
            (true, false) => GameKind::QuadraticLinear,
            (true, true) => GameKind::Quadratic,
            (false, true) => {
                return Err(Error::InvalidParameter {
                    name: "band_c",
                    reason: "a quadratic y-term requires a quadratic x-term".into(),
                })
            }
        };
        let average = average_samples(&samples, d_x, d_y, has_a, has_c);
        Ok(Self {
            spec: None,
            kind,
            d_x,
            d_y,
            samples,
            average,
        })
    }

    pub fn spec(&self) -> Option<&GameSpec> {
        self.spec.as_ref()
    }

    pub fn kind(&self) -> GameKind {
        self.kind
    }

    pub fn d_x(&self) -> usize {
        self.d_x
    }

    pub fn d_y(&self) -> usize {
        self.d_y
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[GameSample<T>] {
        &self.samples
    }

    /// `(Ā, B̄, C̄, ā, c̄)` as a sample.
    pub fn average(&self) -> &GameSample<T> {
        &self.average
    }

    pub fn full_batch(&self) -> Vec<usize> {
        (0..self.n()).collect()
    }

    fn check_call(&self, batch: &[usize], w: &JointPoint<T>) -> Result<bool> {
        if batch.is_empty() {
            return Err(Error::EmptyBatch);
        }
        if let Some(&index) = batch.iter().find(|&&i| i >= self.n()) {
            return Err(Error::IndexOutOfRange { index, n: self.n() });
        }
        if !w.same_shape(self.d_x, self.d_y) {
            return Err(Error::DimensionMismatch {
                context: "joint point vs game dimensions",
                expected: self.d_x + self.d_y,
                actual: w.len(),
            });
        }
        Ok(batch.len() == self.n() && batch.iter().enumerate().all(|(k, &i)| k == i))
    }

    /// Mean payoff over `batch` at `w`.
    pub fn payoff(&self, batch: &[usize], w: &JointPoint<T>) -> Result<T> {
        let full = self.check_call(batch, w)?;
        if full {
            return Ok(self.average.payoff(w.x(), w.y()));
        }
        let total = batch
            .iter()
            .fold(T::zero(), |acc, &i| acc + self.samples[i].payoff(w.x(), w.y()));
        Ok(total / T::of(batch.len() as f64))
    }

    /// Mean gradient field over `batch` at `w`. The full batch is evaluated
    /// through the cached averages.
    pub fn gradient_field(&self, batch: &[usize], w: &JointPoint<T>) -> Result<FieldValue<T>> {
        let full = self.check_call(batch, w)?;
        let mut out = Array1::zeros(self.d_x + self.d_y);
        if full {
            self.average.accumulate_field(w.x(), w.y(), T::one(), &mut out);
        } else {
            let weight = T::one() / T::of(batch.len() as f64);
            for &i in batch {
                self.samples[i].accumulate_field(w.x(), w.y(), weight, &mut out);
            }
        }
        FieldValue::from_joint(out, self.d_x)
    }
}

fn average_samples<T: Real>(
    samples: &[GameSample<T>],
    d_x: usize,
    d_y: usize,
    has_a: bool,
    has_c: bool,
) -> GameSample<T> {
    let scale = T::one() / T::of(samples.len() as f64);
    let mut quad_x = has_a.then(|| Array2::<T>::zeros((d_x, d_x)));
    let mut quad_y = has_c.then(|| Array2::<T>::zeros((d_y, d_y)));
    let mut coupling = Array2::<T>::zeros((d_x, d_y));
    let mut lin_x = Array1::<T>::zeros(d_x);
    let mut lin_y = Array1::<T>::zeros(d_y);
    for sample in samples {
        if let (Some(acc), Some(a)) = (quad_x.as_mut(), sample.quad_x.as_ref()) {
            *acc += a;
        }
        if let (Some(acc), Some(c)) = (quad_y.as_mut(), sample.quad_y.as_ref()) {
            *acc += c;
        }
        coupling += &sample.coupling;
        lin_x += &sample.lin_x;
        lin_y += &sample.lin_y;
    }
    let rescale = |m: &mut Array2<T>| Zip::from(m).for_each(|e| *e *= scale);
    if let Some(m) = quad_x.as_mut() {
        rescale(m);
    }
    if let Some(m) = quad_y.as_mut() {
        rescale(m);
    }
    rescale(&mut coupling);
    lin_x.mapv_inplace(|e| e * scale);
    lin_y.mapv_inplace(|e| e * scale);
    GameSample {
        quad_x,
        coupling,
        quad_y,
        lin_x,
        lin_y,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn scalar_game() -> StochasticGame<f64> {
        StochasticGame::from_samples(vec![GameSample {
            quad_x: Some(array![[2.0]]),
            coupling: array![[1.0]],
            quad_y: Some(array![[3.0]]),
            lin_x: array![1.0],
            lin_y: array![1.0],
        }])
        .unwrap()
    }

    fn point(x: f64, y: f64) -> JointPoint<f64> {
        JointPoint::from_blocks(array![x].view(), array![y].view())
    }

    #[test]
    fn scalar_payoff() {
        let game = scalar_game();
        assert!((game.payoff(&[0], &point(1.0, 1.0)).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn payoff_vanishes_at_origin() {
        let game = StochasticGame::<f64>::generate(&GameSpec {
            n: 4,
            d_x: 3,
            d_y: 3,
            ..GameSpec::defaults(GameKind::Quadratic)
        })
        .unwrap();
        let origin = JointPoint::zeros(3, 3);
        assert_eq!(game.payoff(&[0, 2, 3], &origin).unwrap(), 0.0);
    }

    #[test]
    fn identity_field() {
        let game = StochasticGame::from_samples(vec![GameSample {
            quad_x: Some(array![[1.0]]),
            coupling: array![[1.0]],
            quad_y: Some(array![[1.0]]),
            lin_x: array![0.0],
            lin_y: array![0.0],
        }])
        .unwrap();
        let f = game.gradient_field(&[0], &point(1.0, 1.0)).unwrap();
        assert_eq!(f.as_array(), &array![2.0, 0.0]);
    }

    #[test]
    fn field_at_origin_is_linear_terms() {
        let spec = GameSpec {
            d_x: 4,
            d_y: 3,
            n: 6,
            ..GameSpec::defaults(GameKind::Bilinear)
        };
        let game = StochasticGame::<f64>::generate(&spec).unwrap();
        let batch = [1, 4];
        let f = game.gradient_field(&batch, &JointPoint::zeros(4, 3)).unwrap();
        let ax = (&game.samples()[1].lin_x + &game.samples()[4].lin_x) / 2.0;
        let cy = (&game.samples()[1].lin_y + &game.samples()[4].lin_y) / 2.0;
        assert_eq!(f.x(), ax);
        assert_eq!(f.y(), cy);
    }

    #[test]
    fn bad_batches_rejected() {
        let game = scalar_game();
        assert_eq!(game.payoff(&[], &point(0.0, 0.0)), Err(Error::EmptyBatch));
        assert_eq!(
            game.gradient_field(&[1], &point(0.0, 0.0)),
            Err(Error::IndexOutOfRange { index: 1, n: 1 })
        );
        let wrong = JointPoint::<f64>::zeros(2, 1);
        assert!(game.payoff(&[0], &wrong).is_err());
    }

    #[test]
    fn bilinear_samples_have_no_quadratic_terms() {
        let spec = GameSpec {
            d_x: 5,
            d_y: 5,
            n: 3,
            ..GameSpec::defaults(GameKind::Bilinear)
        };
        let game = StochasticGame::<f64>::generate(&spec).unwrap();
        assert_eq!(game.kind(), GameKind::Bilinear);
        assert!(game.samples().iter().all(|s| s.quad_x.is_none() && s.quad_y.is_none()));
    }

    #[test]
    fn zero_samples_rejected() {
        let spec = GameSpec {
            n: 0,
            ..GameSpec::defaults(GameKind::Bilinear)
        };
        assert!(StochasticGame::<f64>::generate(&spec).is_err());
    }

    #[test]
    fn linear_quadratic_combination_rejected() {
        let spec = GameSpec {
            band_a: None,
            band_c: Some(Band::UNIT),
            ..GameSpec::defaults(GameKind::Bilinear)
        };
        assert!(spec.validate().is_err());
    }
}
