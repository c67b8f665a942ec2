use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::grid::{ComplexField, Grid1D, SpectralCoeffs};
use crate::error::{check_len, Result};
use crate::scalar::Real;

/// Unitary forward/inverse DFT pair of a fixed length (`1/√N` both ways).
#[derive(Clone)]
pub struct SpectralPlan<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    scale: T,
}

impl<T: Real> std::fmt::Debug for SpectralPlan<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("n", &self.n).finish()
    }
}

impl<T: Real> SpectralPlan<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: T::one() / T::from_usize_lossy(n).sqrt(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward_in_place(&self, buf: &mut [Complex<T>]) {
        self.forward.process(buf);
        buf.iter_mut().for_each(|z| *z = *z * self.scale);
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex<T>]) {
        self.inverse.process(buf);
        buf.iter_mut().for_each(|z| *z = *z * self.scale);
    }
}

/// Forward transform of samples on a uniform grid.
pub fn dft_forward<T: Real>(field: &ComplexField<T>) -> Result<SpectralCoeffs<T>> {
    check_len(field.grid.len(), field.values.len())?;
    let plan = SpectralPlan::new(field.values.len());
    let mut coeffs = field.values.clone();
    plan.forward_in_place(&mut coeffs);
    Ok(SpectralCoeffs { coeffs, base_length: field.grid.period() })
}

/// Inverse transform back onto `grid`.
pub fn dft_inverse<T: Real>(coeffs: &SpectralCoeffs<T>, grid: Grid1D<T>) -> Result<ComplexField<T>> {
    check_len(grid.len(), coeffs.len())?;
    let plan = SpectralPlan::new(coeffs.len());
    let mut values = coeffs.coeffs.clone();
    plan.inverse_in_place(&mut values);
    ComplexField::new(grid, values)
}

/// Forward transform from raw nodes; non-uniform nodes are rejected.
pub fn dft_from_nodes<T: Real>(nodes: &[T], values: &[Complex<T>]) -> Result<SpectralCoeffs<T>> {
    let grid = Grid1D::from_nodes(nodes)?;
    dft_forward(&ComplexField::new(grid, values.to_vec())?)
}
