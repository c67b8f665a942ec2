use ndarray::Array2;
use num_complex::Complex;

use crate::error::{check_len, Error, Result};
use crate::numerics::{ComplexField, Grid1D};
use crate::scalar::Real;

use super::propagate::WholeLine;

/// `(e^z, w_0, w_1)` so one step of `y' = m y + f` with linear `f` reads
/// `y_1 = e^z y_0 + h (w_0 f_0 + w_1 f_1)`, `z = m h`.
pub fn exp_linear_weights<T: Real>(z: Complex<T>) -> (Complex<T>, Complex<T>, Complex<T>) {
    let ez = z.exp();
    let one = Complex::new(T::one(), T::zero());
    let (psi1, phi2) = if z.norm() < T::lit(0.2) {
        let mut term = one;
        let mut p1 = Complex::new(T::zero(), T::zero());
        let mut p2 = Complex::new(T::zero(), T::zero());
        let mut fact1 = T::one();
        for n in 0..16 {
            let nn = T::from_usize_lossy(n);
            fact1 = fact1 * (nn + T::one());
            p1 = p1 + term / fact1;
            p2 = p2 + term / (fact1 * (nn + T::lit(2.0)));
            term = term * z;
        }
        (p1, p2)
    } else {
        ((ez - one) / z, (ez - one - z) / (z * z))
    };
    (ez, psi1 - phi2, phi2)
}

/// Exponential integrator for the forced whole-line problem on a uniform time grid.
pub struct DuhamelStepper<'a, T: Real> {
    wl: &'a WholeLine<T>,
    dt: T,
    factors: Vec<(Complex<T>, Complex<T>, Complex<T>)>,
}

impl<'a, T: Real> DuhamelStepper<'a, T> {
    pub fn new(wl: &'a WholeLine<T>, dt: T) -> Self {
        let factors = wl.symbol().iter().map(|&m| exp_linear_weights(m * dt)).collect();
        Self { wl, dt, factors }
    }

    /// Coefficients of `∫_0^{t_j} W(t_j - s) f(s) ds` for every level, given forcing coefficients per level.
    pub fn integrate(&self, forcing: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
        let n = self.wl.len();
        let mut out = Vec::with_capacity(forcing.len());
        let mut d = vec![Complex::new(T::zero(), T::zero()); n];
        out.push(d.clone());
        for pair in forcing.windows(2) {
            for k in 0..n {
                let (ez, w0, w1) = self.factors[k];
                d[k] = ez * d[k] + (w0 * pair[0][k] + w1 * pair[1][k]) * self.dt;
            }
            out.push(d.clone());
        }
        out
    }
}

/// Whole-line Duhamel integral at time `t` for forcing `f[[i, j]] = f(x_i, t_j)`.
pub fn duhamel_forced<T: Real>(
    wl: &WholeLine<T>,
    f: &Array2<T>,
    time_grid: &Grid1D<T>,
    t: T,
) -> Result<ComplexField<T>> {
    check_len(wl.len(), f.nrows())?;
    check_len(time_grid.len(), f.ncols())?;
    if t < time_grid.x_min() || t > time_grid.x_max() * (T::one() + T::epsilon()) {
        return Err(Error::Precondition(format!("time {t} outside the forcing grid")));
    }
    let dt = time_grid.spacing();
    let rel = (t - time_grid.x_min()) / dt;
    let j_last = rel.floor().to_usize().unwrap_or(0).min(time_grid.len() - 1);
    let coeffs: Vec<Vec<Complex<T>>> = (0..=j_last.min(time_grid.len() - 1))
        .map(|j| wl.forward_real(&f.column(j).to_vec()))
        .collect();
    let stepper = DuhamelStepper::new(wl, dt);
    let mut d = stepper.integrate(&coeffs).pop().unwrap();
    let rem = t - time_grid.node(j_last);
    if rem > T::epsilon() * dt && j_last + 1 < time_grid.len() {
        let fj = &coeffs[j_last];
        let fnext = wl.forward_real(&f.column(j_last + 1).to_vec());
        let theta = rem / dt;
        for k in 0..wl.len() {
            let f_end = fj[k] + (fnext[k] - fj[k]) * theta;
            let (ez, w0, w1) = exp_linear_weights(wl.symbol()[k] * rem);
            d[k] = ez * d[k] + (w0 * fj[k] + w1 * f_end) * rem;
        }
    }
    ComplexField::new(*wl.grid(), wl.inverse(&d))
}
