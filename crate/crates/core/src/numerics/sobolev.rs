use crate::error::Result;
use crate::scalar::Real;

use super::dft::dft_forward;
use super::grid::{ComplexField, Grid1D};
use super::quadrature::quadrature;
use super::diff::finite_diff;

/// Japanese bracket `⟨t⟩ = (1 + t²)^{1/2}`.
pub fn bracket<T: Real>(t: T) -> T {
    (T::one() + t * t).sqrt()
}

/// `(Σ ⟨k⟩^{2s} |c_k|²)^{1/2}` over the unitary coefficients, `k` the integer frequency.
pub fn sobolev_norm<T: Real>(field: &ComplexField<T>, s: T) -> Result<T> {
    let spec = dft_forward(field)?;
    let two_s = T::lit(2.0) * s;
    let sum = spec.coeffs.iter().enumerate().fold(T::zero(), |acc, (j, c)| {
        let k = T::from_i64(spec.frequency(j)).unwrap();
        acc + bracket(k).powf(two_s) * c.norm_sqr()
    });
    Ok(sum.sqrt())
}

/// Same weight but in the angular wavenumber `ξ_k`, scaled by `Δx` so `s = 0` gives the L² norm.
pub fn sobolev_norm_physical<T: Real>(field: &ComplexField<T>, s: T) -> Result<T> {
    let spec = dft_forward(field)?;
    let two_s = T::lit(2.0) * s;
    let sum = spec.coeffs.iter().enumerate().fold(T::zero(), |acc, (j, c)| {
        acc + bracket(spec.wavenumber(j)).powf(two_s) * c.norm_sqr()
    });
    Ok((sum * field.grid.spacing()).sqrt())
}

/// `H¹` norm on a bounded interval, `(∫ f² + f'²)^{1/2}` with second-order derivatives.
pub fn h1_norm<T: Real>(samples: &[T], grid: &Grid1D<T>) -> Result<T> {
    let d = finite_diff(samples, grid, 1)?;
    let sq: Vec<T> = samples.iter().zip(&d).map(|(&f, &g)| f * f + g * g).collect();
    Ok(quadrature(&sq, grid)?.sqrt())
}

/// `L²` norm on a bounded interval by composite Simpson.
pub fn l2_norm<T: Real>(samples: &[T], grid: &Grid1D<T>) -> Result<T> {
    let sq: Vec<T> = samples.iter().map(|&f| f * f).collect();
    Ok(quadrature(&sq, grid)?.sqrt())
}
