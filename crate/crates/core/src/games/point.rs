use ndarray::{s, Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::scalar::Real;

macro_rules! blocked_vector {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name<T> {
            data: Array1<T>,
            d_x: usize,
        }

        impl<T: Real> $name<T> {
            pub fn from_blocks(x: ArrayView1<T>, y: ArrayView1<T>) -> Self {
                let mut data = Array1::zeros(x.len() + y.len());
                data.slice_mut(s![..x.len()]).assign(&x);
                data.slice_mut(s![x.len()..]).assign(&y);
                Self { data, d_x: x.len() }
            }

            /// Wraps a concatenated vector whose first `d_x` entries are the
            /// x block.
            pub fn from_joint(data: Array1<T>, d_x: usize) -> Result<Self> {
                if d_x > data.len() {
                    return Err(Error::DimensionMismatch {
                        context: concat!(stringify!($name), "::from_joint"),
                        expected: d_x,
                        actual: data.len(),
                    });
                }
                Ok(Self { data, d_x })
            }

            pub fn zeros(d_x: usize, d_y: usize) -> Self {
                Self { data: Array1::zeros(d_x + d_y), d_x }
            }

            pub fn x(&self) -> ArrayView1<'_, T> {
                self.data.slice(s![..self.d_x])
            }

            pub fn y(&self) -> ArrayView1<'_, T> {
                self.data.slice(s![self.d_x..])
            }

            pub fn d_x(&self) -> usize {
                self.d_x
            }

            pub fn d_y(&self) -> usize {
                self.data.len() - self.d_x
            }

            pub fn len(&self) -> usize {
                self.data.len()
            }

            pub fn is_empty(&self) -> bool {
                self.data.is_empty()
            }

            pub fn as_array(&self) -> &Array1<T> {
                &self.data
            }

            pub fn as_array_mut(&mut self) -> &mut Array1<T> {
                &mut self.data
            }

            pub fn into_array(self) -> Array1<T> {
                self.data
            }

            pub fn same_shape(&self, d_x: usize, d_y: usize) -> bool {
                self.d_x == d_x && self.d_y() == d_y
            }

            pub fn norm_inf(&self) -> T {
                self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
            }
        }
    };
}

blocked_vector!(
    /// Joint iterate `w = [x; y]`.
    JointPoint
);

blocked_vector!(
    /// Gradient field `[∇ₓℓ; −∇ᵧℓ]`, laid out like [`JointPoint`].
    FieldValue
);

/// Euclidean distance between two joint points.
pub fn distance_to_optimum<T: Real>(w: &JointPoint<T>, w_star: &JointPoint<T>) -> Result<T> {
    if !w.same_shape(w_star.d_x(), w_star.d_y()) {
        return Err(Error::DimensionMismatch {
            context: "distance_to_optimum",
            expected: w_star.len(),
            actual: w.len(),
        });
    }
    let diff = w.as_array() - w_star.as_array();
    Ok(diff.dot(&diff).sqrt())
}
