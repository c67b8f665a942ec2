use ndarray::Array2;

use crate::error::{check_len, Error, Result};
use crate::numerics::Grid1D;
use crate::scalar::Real;

/// Real field `u(x_i, t_j)` stored as `values[[i, j]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineState<T> {
    pub space_grid: Grid1D<T>,
    pub time_grid: Grid1D<T>,
    pub values: Array2<T>,
}

impl<T: Real> HalfLineState<T> {
    pub fn new(space_grid: Grid1D<T>, time_grid: Grid1D<T>, values: Array2<T>) -> Result<Self> {
        check_len(space_grid.len(), values.nrows())?;
        check_len(time_grid.len(), values.ncols())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("state contains non-finite values".into()));
        }
        Ok(Self { space_grid, time_grid, values })
    }

    pub fn zeros(space_grid: Grid1D<T>, time_grid: Grid1D<T>) -> Self {
        let values = Array2::zeros((space_grid.len(), time_grid.len()));
        Self { space_grid, time_grid, values }
    }

    pub fn from_fn(space_grid: Grid1D<T>, time_grid: Grid1D<T>, f: impl Fn(T, T) -> T) -> Self {
        let xs = space_grid.nodes();
        let ts = time_grid.nodes();
        let values = Array2::from_shape_fn((xs.len(), ts.len()), |(i, j)| f(xs[i], ts[j]));
        Self { space_grid, time_grid, values }
    }

    pub fn snapshot(&self, j: usize) -> Vec<T> {
        self.values.column(j).to_vec()
    }

    /// Space-time L² norm by the trapezoid rule in both variables.
    pub fn l2_norm(&self) -> T {
        let wx = crate::numerics::quadrature_weights(self.space_grid.len(), self.space_grid.spacing(), crate::numerics::QuadRule::Trapezoid);
        let wt = crate::numerics::quadrature_weights(self.time_grid.len(), self.time_grid.spacing(), crate::numerics::QuadRule::Trapezoid);
        let mut acc = T::zero();
        for ((i, j), &v) in self.values.indexed_iter() {
            acc = acc + wx[i] * wt[j] * v * v;
        }
        acc.sqrt()
    }

    pub fn distance(&self, other: &Self) -> T {
        let diff = Self {
            space_grid: self.space_grid,
            time_grid: self.time_grid,
            values: &self.values - &other.values,
        };
        diff.l2_norm()
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// Dirichlet values `h` and Neumann values `g` at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData<T> {
    pub time_grid: Grid1D<T>,
    pub h: Vec<T>,
    pub g: Vec<T>,
}

impl<T: Real> BoundaryData<T> {
    pub fn new(time_grid: Grid1D<T>, h: Vec<T>, g: Vec<T>) -> Result<Self> {
        check_len(time_grid.len(), h.len())?;
        check_len(time_grid.len(), g.len())?;
        Ok(Self { time_grid, h, g })
    }

    pub fn zeros(time_grid: Grid1D<T>) -> Self {
        Self { time_grid, h: vec![T::zero(); time_grid.len()], g: vec![T::zero(); time_grid.len()] }
    }

    pub fn from_fns(time_grid: Grid1D<T>, h: impl Fn(T) -> T, g: impl Fn(T) -> T) -> Self {
        let ts = time_grid.nodes();
        Self {
            time_grid,
            h: ts.iter().map(|&t| h(t)).collect(),
            g: ts.iter().map(|&t| g(t)).collect(),
        }
    }

    pub fn dirichlet_only(time_grid: Grid1D<T>, h: Vec<T>) -> Result<Self> {
        let n = h.len();
        Self::new(time_grid, h, vec![T::zero(); n])
    }

    pub fn neumann_only(time_grid: Grid1D<T>, g: Vec<T>) -> Result<Self> {
        let n = g.len();
        Self::new(time_grid, vec![T::zero(); n], g)
    }

    /// `(h(0) - u0(0), g(0) - u0'(0))`; reported, never enforced.
    pub fn compatibility_defect(&self, u0_at_0: T, du0_at_0: T) -> (T, T) {
        (self.h[0] - u0_at_0, self.g[0] - du0_at_0)
    }
}
