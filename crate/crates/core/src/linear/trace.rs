use crate::error::{Error, Result};
use crate::numerics::trace_weights;
use crate::scalar::Real;

use super::state::HalfLineState;

/// `u(0,t)`, `u_x(0,t)`, `u_xx(0,t)` for every time level.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces<T> {
    pub value: Vec<T>,
    pub dx: Vec<T>,
    pub dxx: Vec<T>,
}

/// Second-order one-sided differences at the first grid node.
pub fn trace_extract<T: Real>(state: &HalfLineState<T>) -> Result<Traces<T>> {
    if state.space_grid.len() < 4 {
        return Err(Error::Precondition("trace extraction needs at least 4 spatial points".into()));
    }
    let h = state.space_grid.spacing();
    let apply = |w: &[T], j: usize| -> T {
        w.iter().enumerate().fold(T::zero(), |acc, (k, &wk)| acc + wk * state.values[[k, j]])
    };
    let (w1, w2) = (trace_weights(1, h), trace_weights(2, h));
    let nt = state.time_grid.len();
    Ok(Traces {
        value: (0..nt).map(|j| state.values[[0, j]]).collect(),
        dx: (0..nt).map(|j| apply(&w1, j)).collect(),
        dxx: (0..nt).map(|j| apply(&w2, j)).collect(),
    })
}
