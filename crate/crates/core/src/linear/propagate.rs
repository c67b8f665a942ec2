use num_complex::Complex;

use crate::error::{check_len, Error, Result};
use crate::numerics::{wavenumbers, ComplexField, Grid1D, SpectralPlan};
use crate::scalar::Real;

/// Periodic surrogate of the whole line with the symbol `-(iξ³ + ξ²)` precomputed.
#[derive(Debug, Clone)]
pub struct WholeLine<T: Real> {
    grid: Grid1D<T>,
    plan: SpectralPlan<T>,
    xi: Vec<T>,
    symbol: Vec<Complex<T>>,
    /// `iξ` with the unpaired Nyquist mode zeroed.
    deriv: Vec<Complex<T>>,
}

impl<T: Real> WholeLine<T> {
    pub fn new(grid: Grid1D<T>) -> Self {
        let n = grid.len();
        let xi = wavenumbers(n, grid.period());
        let nyquist = if n % 2 == 0 { Some(n / 2) } else { None };
        let symbol = xi
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                if Some(j) == nyquist {
                    Complex::new(-k * k, T::zero())
                } else {
                    Complex::new(-k * k, -k * k * k)
                }
            })
            .collect();
        let deriv = xi
            .iter()
            .enumerate()
            .map(|(j, &k)| if Some(j) == nyquist { Complex::new(T::zero(), T::zero()) } else { Complex::new(T::zero(), k) })
            .collect();
        Self { grid, plan: SpectralPlan::new(n), xi, symbol, deriv }
    }

    /// Grid `[-x_half, x_half - Δx]` with `n` nodes; an even `n` puts a node at `x = 0`.
    pub fn symmetric(x_half: T, n: usize) -> Result<Self> {
        let dx = T::lit(2.0) * x_half / T::from_usize_lossy(n);
        Ok(Self::new(Grid1D::with_spacing(-x_half, dx, n)?))
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn wavenumbers(&self) -> &[T] {
        &self.xi
    }

    /// Exponent `m_k` of the multiplier `e^{m_k t}`.
    pub fn symbol(&self) -> &[Complex<T>] {
        &self.symbol
    }

    pub fn derivative_symbol(&self) -> &[Complex<T>] {
        &self.deriv
    }

    pub fn plan(&self) -> &SpectralPlan<T> {
        &self.plan
    }

    pub fn forward(&self, values: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = values.to_vec();
        self.plan.forward_in_place(&mut buf);
        buf
    }

    pub fn inverse(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = coeffs.to_vec();
        self.plan.inverse_in_place(&mut buf);
        buf
    }

    pub fn forward_real(&self, values: &[T]) -> Vec<Complex<T>> {
        let buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.forward(&buf)
    }

    /// Multiplies coefficients by `e^{m_k t}`.
    pub fn evolve_coeffs(&self, coeffs: &[Complex<T>], t: T) -> Vec<Complex<T>> {
        coeffs.iter().zip(&self.symbol).map(|(&c, &m)| c * (m * t).exp()).collect()
    }

    pub fn propagate(&self, u0: &[Complex<T>], t: T) -> Result<Vec<Complex<T>>> {
        check_len(self.len(), u0.len())?;
        if t < T::zero() {
            return Err(Error::Precondition(format!(
                "propagation time must be nonnegative, got {t}; the backward multiplier is unbounded"
            )));
        }
        Ok(self.inverse(&self.evolve_coeffs(&self.forward(u0), t)))
    }

    /// Spectral derivative of the field represented by `coeffs`, in physical space.
    pub fn derivative_from_coeffs(&self, coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
        let d: Vec<Complex<T>> = coeffs.iter().zip(&self.deriv).map(|(&c, &k)| c * k).collect();
        self.inverse(&d)
    }

    /// Value and `x`-derivative at an arbitrary point from unitary coefficients.
    pub fn point_value(&self, coeffs: &[Complex<T>], x: T) -> (Complex<T>, Complex<T>) {
        let scale = T::one() / T::from_usize_lossy(self.len()).sqrt();
        let offset = x - self.grid.x_min();
        let mut v = Complex::new(T::zero(), T::zero());
        let mut d = Complex::new(T::zero(), T::zero());
        for ((&c, &k), &dk) in coeffs.iter().zip(&self.xi).zip(&self.deriv) {
            let term = c * Complex::new(T::zero(), k * offset).exp();
            v = v + term;
            d = d + term * dk;
        }
        (v * scale, d * scale)
    }
}

/// Applies `e^{-(iξ³+ξ²)t}` to a field on a uniform grid.
pub fn whole_line_propagate<T: Real>(u0: &ComplexField<T>, t: T) -> Result<ComplexField<T>> {
    let wl = WholeLine::new(u0.grid);
    let values = wl.propagate(&u0.values, t)?;
    ComplexField::new(u0.grid, values)
}
