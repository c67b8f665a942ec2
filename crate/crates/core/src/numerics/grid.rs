use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform grid on `[x_min, x_max]` including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n_points: usize,
    spacing: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(x_min: T, x_max: T, n_points: usize) -> Result<Self> {
        if n_points < 4 {
            return Err(Error::Grid(format!("need at least 4 points, got {n_points}")));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::Grid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        let spacing = (x_max - x_min) / T::from_usize_lossy(n_points - 1);
        Ok(Self { x_min, x_max, n_points, spacing })
    }

    /// Grid with `n_points` nodes starting at `x_min` with the given spacing.
    pub fn with_spacing(x_min: T, spacing: T, n_points: usize) -> Result<Self> {
        if !(spacing > T::zero()) {
            return Err(Error::Grid(format!("spacing must be positive, got {spacing}")));
        }
        Self::new(x_min, x_min + spacing * T::from_usize_lossy(n_points.max(1) - 1), n_points)
    }

    /// Rebuilds a grid from explicit nodes, rejecting anything non-uniform.
    pub fn from_nodes(nodes: &[T]) -> Result<Self> {
        if nodes.len() < 4 {
            return Err(Error::Grid(format!("need at least 4 nodes, got {}", nodes.len())));
        }
        let grid = Self::new(nodes[0], nodes[nodes.len() - 1], nodes.len())?;
        let tol = T::lit(1e-9) * grid.spacing;
        for (i, &x) in nodes.iter().enumerate() {
            if (x - grid.node(i)).abs() > tol {
                return Err(Error::Grid(format!(
                    "non-uniform grid: node {i} is {x}, expected {}",
                    grid.node(i)
                )));
            }
        }
        Ok(grid)
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn node(&self, i: usize) -> T {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + self.spacing * T::from_usize_lossy(i)
        }
    }

    pub fn nodes(&self) -> Vec<T> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    /// Length of the periodic cell this grid samples (one spacing past `x_max`).
    pub fn period(&self) -> T {
        self.spacing * T::from_usize_lossy(self.n_points)
    }

    /// Grid with half the spacing over the same interval.
    pub fn refined(&self) -> Self {
        Self::new(self.x_min, self.x_max, 2 * self.n_points - 1).expect("refinement of a valid grid")
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= T::lit(1e-12) * (T::one() + self.x_min.abs())
            && (self.spacing - other.spacing).abs() <= T::lit(1e-12) * self.spacing
    }
}

/// Complex samples aligned with a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField<T> {
    pub grid: Grid1D<T>,
    pub values: Vec<Complex<T>>,
}

impl<T: Real> ComplexField<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<Complex<T>>) -> Result<Self> {
        crate::error::check_len(grid.len(), values.len())?;
        Ok(Self { grid, values })
    }

    pub fn from_real(grid: Grid1D<T>, values: &[T]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex::new(v, T::zero())).collect())
    }

    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> Complex<T>) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        Self { grid, values }
    }

    pub fn zeros(grid: Grid1D<T>) -> Self {
        Self { grid, values: vec![Complex::new(T::zero(), T::zero()); grid.len()] }
    }

    pub fn re(&self) -> Vec<T> {
        self.values.iter().map(|z| z.re).collect()
    }

    /// Discrete L² norm `(Δx Σ |v|²)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        let s = self.values.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        (s * self.grid.spacing()).sqrt()
    }
}

/// Coefficients stored in FFT order: index `j` holds integer frequency `frequency(j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoeffs<T> {
    pub coeffs: Vec<Complex<T>>,
    pub base_length: T,
}

impl<T: Real> SpectralCoeffs<T> {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Signed integer frequency of storage slot `j`.
    pub fn frequency(&self, j: usize) -> i64 {
        signed_frequency(j, self.coeffs.len())
    }

    /// Angular wavenumber `2πk / base_length` of slot `j`.
    pub fn wavenumber(&self, j: usize) -> T {
        T::lit(2.0) * T::PI() * T::from_i64(self.frequency(j)).unwrap() / self.base_length
    }

    pub fn get(&self, k: i64) -> Option<Complex<T>> {
        let n = self.coeffs.len() as i64;
        if k < -(n / 2) || k > (n - 1) / 2 {
            return None;
        }
        Some(self.coeffs[k.rem_euclid(n) as usize])
    }

    pub fn l2_sum(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }
}

/// Maps FFT slot `j` of an `n`-point transform to its signed frequency in `[-n/2, (n-1)/2]`.
pub fn signed_frequency(j: usize, n: usize) -> i64 {
    let (j, n) = (j as i64, n as i64);
    if j <= (n - 1) / 2 {
        j
    } else {
        j - n
    }
}

/// Angular wavenumbers of an `n`-point transform over a cell of length `period`.
pub fn wavenumbers<T: Real>(n: usize, period: T) -> Vec<T> {
    let scale = T::lit(2.0) * T::PI() / period;
    (0..n).map(|j| scale * T::from_i64(signed_frequency(j, n)).unwrap()).collect()
}
