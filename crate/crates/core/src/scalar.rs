use ndarray::NdFloat;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating-point scalar used throughout the crate: `f32` or `f64`.
///
/// Random draws are always made in `f64` and converted, so a game generated
/// with `f32` shares its random stream with the `f64` game of the same seed.
pub trait Real: NdFloat + FromPrimitive + ToPrimitive + Default {
    /// Lossy conversion from a configuration value.
    fn of(value: f64) -> Self {
        Self::from_f64(value).expect("finite f64 converts to a float scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("float scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}
