//! Decaying solutions `w = e^{-λt} e^{ax} sin(bx)` with zero Dirichlet trace.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{finite_diff, h1_norm, l2_norm, Grid1D};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonControlMode<T> {
    pub a: T,
    /// `√(a(2 + 3a))`.
    pub b: T,
    /// `2a(1 + 2a)²`, the value forced by the root relations of `z³ + z² + λ`.
    pub lambda: T,
    /// `2a(1 + 3a)(1 + 2a)`, kept for comparison; it fails direct substitution.
    pub lambda_printed: T,
    /// Real root `-(1 + 2a)`.
    pub z1: T,
}

pub fn mode_construct<T: Real>(a: T) -> Result<NonControlMode<T>> {
    if !(a > T::zero() && a.is_finite()) {
        return Err(Error::Precondition(format!("mode parameter a must be positive, got {a}")));
    }
    let (one, two, three) = (T::one(), T::lit(2.0), T::lit(3.0));
    let q = one + two * a;
    Ok(NonControlMode {
        a,
        b: (a * (two + three * a)).sqrt(),
        lambda: two * a * q * q,
        lambda_printed: two * a * (one + three * a) * q,
        z1: -q,
    })
}

impl<T: Real> NonControlMode<T> {
    pub fn field(&self, x: T, t: T) -> T {
        (-self.lambda * t + self.a * x).exp() * (self.b * x).sin()
    }

    /// `w_x(0, t) = b e^{-λt}`.
    pub fn trace_dx(&self, t: T) -> T {
        self.b * (-self.lambda * t).exp()
    }

    /// `w_xx(0, t) = 2ab e^{-λt}`.
    pub fn trace_dxx(&self, t: T) -> T {
        T::lit(2.0) * self.a * self.b * (-self.lambda * t).exp()
    }

    /// `|z³ + z² + λ|` at `z = a + ib` and at `z = z₁`.
    pub fn cubic_residuals(&self) -> (T, T) {
        let z = Complex::new(self.a, self.b);
        let lam = Complex::new(self.lambda, T::zero());
        let r1 = (z * z * z + z * z + lam).norm();
        let z1 = self.z1;
        let r2 = (z1 * z1 * z1 + z1 * z1 + self.lambda).abs();
        (r1, r2)
    }

    /// `‖w(·, 0)‖_{L²(0, X)}` in closed form.
    pub fn initial_norm(&self, x_max: T) -> T {
        let two = T::lit(2.0);
        let (a, b) = (self.a, self.b);
        let z = Complex::new(two * a, two * b);
        let osc = ((z * x_max).exp() - T::one()) / z;
        let mono = ((two * a * x_max).exp() - T::one()) / (two * a);
        ((mono - osc.re) / two).sqrt()
    }

    /// `‖c e^{-λt}‖_{H¹(0,T)}` in closed form.
    pub fn trace_h1_norm(&self, c: T, horizon: T) -> T {
        let lam = self.lambda;
        let two = T::lit(2.0);
        (c * c * (T::one() + lam * lam) * (T::one() - (-two * lam * horizon).exp()) / (two * lam)).sqrt()
    }

    /// `‖w_x(0, ·)‖_{L²(0,T)} = b √((1 - e^{-2λT})/(2λ))`.
    pub fn trace_dx_l2(&self, horizon: T) -> T {
        let two = T::lit(2.0);
        self.b * ((T::one() - (-two * self.lambda * horizon).exp()) / (two * self.lambda)).sqrt()
    }
}

/// Max-norm of the discrete `P` applied to the sampled mode on interior nodes.
///
/// Time derivatives are centered, space derivatives use the centered stencils of
/// [`finite_diff`]; the result is second order in both steps.
pub fn mode_residual<T: Real>(mode: &NonControlMode<T>, xg: &Grid1D<T>, tg: &Grid1D<T>) -> Result<T> {
    if xg.len() < 7 || tg.len() < 3 {
        return Err(Error::Grid("mode residual needs at least 7 space and 3 time nodes".into()));
    }
    let (nx, nt) = (xg.len(), tg.len());
    let dt = tg.spacing();
    let mut worst = T::zero();
    for j in 1..nt - 1 {
        let t = tg.node(j);
        let col: Vec<T> = xg.nodes().into_iter().map(|x| mode.field(x, t)).collect();
        let d2 = finite_diff(&col, xg, 2)?;
        let d3 = finite_diff(&col, xg, 3)?;
        for i in 2..nx - 2 {
            let x = xg.node(i);
            let ut = (mode.field(x, tg.node(j + 1)) - mode.field(x, tg.node(j - 1))) / (T::lit(2.0) * dt);
            worst = worst.max((ut - d3[i] - d2[i]).abs());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub lambda_printed: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    /// Same ratio with both norms from sampled quadrature.
    pub ratio_quadrature: f64,
    pub cubic_residual: f64,
}

/// `N(a)/D(a)` with `N = ‖w(·,0)‖_{L²(0,X)}` and `D = ‖w_x(0,·)‖_{H¹(0,T)} + ‖w_xx(0,·)‖_{H¹(0,T)}`.
pub fn noncontrol_scan<T: Real>(a_values: &[T], x_max: T, horizon: T, samples: usize) -> Result<Vec<ScanRow>> {
    if a_values.windows(2).any(|p| p[1] >= p[0]) {
        return Err(Error::Precondition("a values must be strictly decreasing".into()));
    }
    if !(x_max > T::zero() && horizon > T::zero()) {
        return Err(Error::Precondition("X and T must be positive".into()));
    }
    let xg = Grid1D::new(T::zero(), x_max, samples)?;
    let tg = Grid1D::new(T::zero(), horizon, samples)?;
    a_values
        .iter()
        .map(|&a| {
            let m = mode_construct(a)?;
            let num = m.initial_norm(x_max);
            let den = m.trace_h1_norm(m.b, horizon) + m.trace_h1_norm(T::lit(2.0) * m.a * m.b, horizon);
            let w0: Vec<T> = xg.nodes().into_iter().map(|x| m.field(x, T::zero())).collect();
            let tx: Vec<T> = tg.nodes().into_iter().map(|t| m.trace_dx(t)).collect();
            let txx: Vec<T> = tg.nodes().into_iter().map(|t| m.trace_dxx(t)).collect();
            let qd = h1_norm(&tx, &tg)? + h1_norm(&txx, &tg)?;
            let (r1, r2) = m.cubic_residuals();
            Ok(ScanRow {
                a: a.as_f64(),
                b: m.b.as_f64(),
                lambda: m.lambda.as_f64(),
                lambda_printed: m.lambda_printed.as_f64(),
                numerator: num.as_f64(),
                denominator: den.as_f64(),
                ratio: (num / den).as_f64(),
                ratio_quadrature: (l2_norm(&w0, &xg)? / qd).as_f64(),
                cubic_residual: r1.max(r2).as_f64(),
            })
        })
        .collect()
}
