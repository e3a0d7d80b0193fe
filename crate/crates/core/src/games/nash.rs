use ndarray::{s, Array1, Array2};

use super::{JointPoint, StochasticGame};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, solve_linear};
use crate::scalar::Real;

/// The stationary point of the averaged game.
#[derive(Clone, Debug, PartialEq)]
pub struct NashSolution<T> {
    pub w_star: JointPoint<T>,
    /// `‖M w* + [ā; c̄]‖_∞` for the block system `M = [[Ā, B̄], [−B̄ᵀ, C̄]]`.
    pub residual: T,
}

/// Solves `[[Ā, B̄], [−B̄ᵀ, C̄]] [x; y] = −[ā; c̄]`.
///
/// Absent quadratic terms become zero diagonal blocks, so the bilinear case
/// `B̄y = −ā`, `B̄ᵀx = −c̄` goes through the same solve.
pub fn nash_equilibrium<T: Real>(game: &StochasticGame<T>) -> Result<NashSolution<T>> {
    let (d_x, d_y) = (game.d_x(), game.d_y());
    let avg = game.average();
    let dim = d_x + d_y;

    let mut system = Array2::<T>::zeros((dim, dim));
    if let Some(a) = &avg.quad_x {
        system.slice_mut(s![..d_x, ..d_x]).assign(a);
    }
    system.slice_mut(s![..d_x, d_x..]).assign(&avg.coupling);
    system
        .slice_mut(s![d_x.., ..d_x])
        .assign(&avg.coupling.t().mapv(|e| -e));
    if let Some(c) = &avg.quad_y {
        system.slice_mut(s![d_x.., d_x..]).assign(c);
    }

    let mut rhs = Array1::<T>::zeros(dim);
    rhs.slice_mut(s![..d_x]).assign(&avg.lin_x.mapv(|e| -e));
    rhs.slice_mut(s![d_x..]).assign(&avg.lin_y.mapv(|e| -e));

    let z = solve_linear(system.view(), rhs.view()).map_err(|source| Error::NoEquilibrium {
        kind: game.kind().name(),
        source: Box::new(source),
    })?;
    let residual = max_abs(system.dot(&z) - &rhs);
    Ok(NashSolution {
        w_star: JointPoint::from_joint(z, d_x)?,
        residual,
    })
}
