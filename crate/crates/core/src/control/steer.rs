//! Three-stage steering `ν = φν₁ + (1 - φ)ν₂ + ω` from `u0` at `t = 0` to `uT` at `t = T`.

use ndarray::Array2;
use num_complex::Complex;
use serde::Serialize;

use super::hum::{hum_solve, ControlProblem, ControlSolution, HumDiagnostics};
use crate::error::{Error, Result};
use crate::linear::{smooth_step_down, WholeLine};
use crate::numerics::{quadrature, Grid1D};
use crate::scalar::Real;

/// Coefficients of `uT` below this fraction of the largest are treated as round-off and dropped
/// before running the backward flow.
const BACKWARD_FLOOR: f64 = 1e-13;
const BACKWARD_GROWTH_CAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SteerVariant {
    /// `ν₂(t) = S(t - T)uT`, which solves `Pν₂ = 0`; the forcing is `-φ'(ν₁ - ν₂)`.
    #[default]
    BackwardFlow,
    /// `ν₂(t) = S(T - t)uT`; the forcing picks up `2(1 - φ)Aν₂`, which is not supported in the
    /// control window, so the pipeline stops with a support error.
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteerParams<T> {
    pub horizon: T,
    /// Width of the plateaus of `φ`: `φ = 1` on `[0, τ]`, `φ = 0` on `[T - τ, T]`.
    pub tau: T,
    pub epsilon: T,
    pub beta: T,
    /// Endpoint checks run on `(0, X)`.
    pub x_max: T,
    pub check_points: usize,
    /// Periodic surrogate `[-x_half, x_half)` for `S(t)`.
    pub spectral_half_width: T,
    pub spectral_points: usize,
    pub box_center: T,
    pub box_half_width: T,
    pub hum_nx: usize,
    pub hum_nt: usize,
    pub variant: SteerVariant,
}

impl<T: Real> SteerParams<T> {
    pub fn desk() -> Self {
        Self {
            horizon: T::lit(2.0),
            tau: T::lit(0.5),
            epsilon: T::lit(0.1),
            beta: T::lit(0.5),
            x_max: T::lit(20.0),
            check_points: 401,
            spectral_half_width: T::lit(60.0),
            spectral_points: 1024,
            box_center: T::lit(10.0),
            box_half_width: T::lit(30.0),
            hum_nx: 48,
            hum_nt: 48,
            variant: SteerVariant::BackwardFlow,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let two = T::lit(2.0);
        if !(self.horizon > T::zero() && self.tau > T::zero() && two * self.tau < self.horizon) {
            return Err(Error::Precondition(format!("need 0 < τ < T/2, got τ = {}, T = {}", self.tau, self.horizon)));
        }
        if !(self.beta >= T::zero() && self.x_max > T::zero()) {
            return Err(Error::Precondition("need β ≥ 0 and X > 0".into()));
        }
        let lo = self.box_center - self.box_half_width;
        let hi = self.box_center + self.box_half_width;
        if !(lo < T::zero() && hi > self.x_max) {
            return Err(Error::Precondition("control box must contain the check interval (0, X)".into()));
        }
        if !(-self.spectral_half_width < lo && self.spectral_half_width > hi) {
            return Err(Error::Precondition("spectral domain must contain the control box".into()));
        }
        if self.check_points < 3 {
            return Err(Error::Grid("need at least 3 check points".into()));
        }
        Ok(())
    }

    /// `φ(t)`.
    pub fn cutoff(&self, t: T) -> T {
        smooth_step_down((t - self.tau) / (self.horizon - T::lit(2.0) * self.tau))
    }

    /// `φ'(t)` in closed form.
    pub fn cutoff_rate(&self, t: T) -> T {
        let w = self.horizon - T::lit(2.0) * self.tau;
        let s = (t - self.tau) / w;
        if s <= T::zero() || s >= T::one() {
            return T::zero();
        }
        let f = |z: T| (-T::one() / z).exp();
        let df = |z: T| f(z) / (z * z);
        let (a, b) = (f(T::one() - s), f(s));
        let den = a + b;
        -(df(T::one() - s) * b + a * df(s)) / (den * den) / w
    }
}

#[derive(Debug, Clone)]
pub struct SteeringPlan<T: Real> {
    pub params: SteerParams<T>,
    pub whole: WholeLine<T>,
    pub u0: Vec<T>,
    pub u_target: Vec<T>,
}

impl<T: Real> SteeringPlan<T> {
    pub fn from_fns(params: SteerParams<T>, u0: impl Fn(T) -> T, ut: impl Fn(T) -> T) -> Result<Self> {
        params.validate()?;
        let whole = WholeLine::symmetric(params.spectral_half_width, params.spectral_points)?;
        let xs = whole.grid().nodes();
        Ok(Self {
            params,
            u0: xs.iter().map(|&x| u0(x)).collect(),
            u_target: xs.iter().map(|&x| ut(x)).collect(),
            whole,
        })
    }

    /// `u0 = e^{-(x-5)²}`, `uT = e^{-(x-10)²/12}`.
    pub fn desk() -> Result<Self> {
        let five = T::lit(5.0);
        let ten = T::lit(10.0);
        let twelve = T::lit(12.0);
        Self::from_fns(SteerParams::desk(), |x| (-(x - five) * (x - five)).exp(), |x| (-(x - ten) * (x - ten) / twelve).exp())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StageNorm {
    pub t: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub omega: f64,
    pub nu: f64,
}

#[derive(Debug, Clone)]
pub struct SteerReport<T> {
    pub f: Array2<T>,
    pub nu1: Array2<T>,
    pub nu2: Array2<T>,
    pub hum: ControlSolution<T>,
    /// `‖ν(·,0) - u0‖ / ‖u0‖` on `(0, X)`.
    pub err_initial: T,
    /// `‖ν(·,T) - uT‖_β / ‖uT‖_β` on `(0, X)`.
    pub err_final: T,
    pub stage_norms: Vec<StageNorm>,
    pub dropped_target_modes: usize,
}

impl<T: Real> SteerReport<T> {
    pub fn hum_diagnostics(&self) -> HumDiagnostics {
        self.hum.diagnostics()
    }
}

/// Samples `Re Σ_k c_k e^{m_k s_j} e^{iξ_k(x_i - x_0)} / √N`.
fn sample_flow<T: Real>(wl: &WholeLine<T>, coeffs: &[Complex<T>], xs: &[T], times: &[T], symbol_scale: Option<&[Complex<T>]>) -> Array2<T> {
    let n = wl.len();
    let scale = T::one() / T::from_usize_lossy(n).sqrt();
    let x0 = wl.grid().x_min();
    let phases: Vec<Vec<Complex<T>>> = xs
        .iter()
        .map(|&x| wl.wavenumbers().iter().map(|&k| Complex::new(T::zero(), k * (x - x0)).exp()).collect())
        .collect();
    let mut out = Array2::zeros((xs.len(), times.len()));
    for (j, &s) in times.iter().enumerate() {
        let c: Vec<Complex<T>> = coeffs
            .iter()
            .zip(wl.symbol())
            .enumerate()
            .map(|(k, (&c, &m))| {
                if c == Complex::new(T::zero(), T::zero()) {
                    return c;
                }
                let w = symbol_scale.map_or(Complex::new(T::one(), T::zero()), |a| a[k]);
                c * w * (m * s).exp()
            })
            .collect();
        for (i, ph) in phases.iter().enumerate() {
            let v = c.iter().zip(ph).fold(Complex::new(T::zero(), T::zero()), |acc, (&a, &b)| acc + a * b);
            out[[i, j]] = v.re * scale;
        }
    }
    out
}

fn interp_linear<T: Real>(grid: &Grid1D<T>, values: &[T], x: T) -> T {
    let h = grid.spacing();
    let s = (x - grid.x_min()) / h;
    if s <= T::zero() {
        return values[0];
    }
    let k = s.floor().to_usize().unwrap_or(0).min(values.len() - 2);
    let w = s - T::from_usize_lossy(k);
    values[k] * (T::one() - w) + values[k + 1] * w
}

pub fn steer_pipeline<T: Real>(plan: &SteeringPlan<T>) -> Result<SteerReport<T>> {
    let p = &plan.params;
    p.validate()?;
    let wl = &plan.whole;
    let box_x = Grid1D::new(p.box_center - p.box_half_width, p.box_center + p.box_half_width, p.hum_nx)?;
    let box_t = Grid1D::new(T::zero(), p.horizon, p.hum_nt)?;
    let (xs, ts) = (box_x.nodes(), box_t.nodes());

    let c0 = wl.forward_real(&plan.u0);
    let mut ct = wl.forward_real(&plan.u_target);
    let cmax = ct.iter().fold(T::zero(), |m, c| m.max(c.norm()));
    let mut dropped = 0;
    if p.variant == SteerVariant::BackwardFlow {
        for (c, &m) in ct.iter_mut().zip(wl.symbol()) {
            if c.norm() < T::lit(BACKWARD_FLOOR) * cmax {
                if c.norm() > T::zero() {
                    dropped += 1;
                }
                *c = Complex::new(T::zero(), T::zero());
            } else if c.norm() * (-m.re * p.horizon).exp() > T::lit(BACKWARD_GROWTH_CAP) * cmax {
                return Err(Error::Numerical(
                    "target has too much high-frequency content for the backward flow on this grid".into(),
                ));
            }
        }
    }

    let nu1 = sample_flow(wl, &c0, &xs, &ts, None);
    let (nu2, a_nu2) = match p.variant {
        SteerVariant::BackwardFlow => {
            let back: Vec<T> = ts.iter().map(|&t| t - p.horizon).collect();
            (sample_flow(wl, &ct, &xs, &back, None), None)
        }
        SteerVariant::Forward => {
            let fwd: Vec<T> = ts.iter().map(|&t| p.horizon - t).collect();
            let gen = wl.symbol().to_vec();
            (sample_flow(wl, &ct, &xs, &fwd, None), Some(sample_flow(wl, &ct, &xs, &fwd, Some(&gen))))
        }
    };

    let two = T::lit(2.0);
    let mut f = Array2::zeros((xs.len(), ts.len()));
    for (j, &t) in ts.iter().enumerate() {
        let rate = p.cutoff_rate(t);
        let phi = p.cutoff(t);
        for i in 0..xs.len() {
            let mut v = -rate * (nu1[[i, j]] - nu2[[i, j]]);
            if let Some(a) = &a_nu2 {
                v = v + two * (T::one() - phi) * a[[i, j]];
            }
            f[[i, j]] = v;
        }
    }
    let problem = ControlProblem::new(p.box_center, p.box_half_width, p.horizon, p.tau, p.horizon - p.tau, p.epsilon, f.clone())?;
    let hum = hum_solve(&problem)?;

    let check = Grid1D::new(T::zero(), p.x_max, p.check_points)?;
    let cx = check.nodes();
    let compose = |j: usize, t: T| -> Result<Vec<T>> {
        let times = [if p.variant == SteerVariant::BackwardFlow { t - p.horizon } else { p.horizon - t }];
        let v1 = sample_flow(wl, &c0, &cx, &[t], None);
        let v2 = sample_flow(wl, &ct, &cx, &times, None);
        let om: Vec<T> = (0..xs.len()).map(|i| hum.v[[i, j]]).collect();
        let phi = p.cutoff(t);
        Ok(cx
            .iter()
            .enumerate()
            .map(|(i, &x)| phi * v1[[i, 0]] + (T::one() - phi) * v2[[i, 0]] + interp_linear(&box_x, &om, x))
            .collect())
    };
    let last = ts.len() - 1;
    let nu_0 = compose(0, T::zero())?;
    let nu_t = compose(last, p.horizon)?;
    let u0c = sample_flow(wl, &c0, &cx, &[T::zero()], None);
    let utc = sample_flow(wl, &wl.forward_real(&plan.u_target), &cx, &[T::zero()], None);
    let weight: Vec<T> = cx.iter().map(|&x| (-two * p.beta * x).exp()).collect();
    let norm = |v: &[T], w: Option<&[T]>| -> Result<T> {
        let sq: Vec<T> = v.iter().enumerate().map(|(i, &a)| a * a * w.map_or(T::one(), |w| w[i])).collect();
        Ok(quadrature(&sq, &check)?.sqrt())
    };
    let d0: Vec<T> = (0..cx.len()).map(|i| nu_0[i] - u0c[[i, 0]]).collect();
    let dt_: Vec<T> = (0..cx.len()).map(|i| nu_t[i] - utc[[i, 0]]).collect();
    let u0n = norm(&u0c.column(0).to_vec(), None)?;
    let utn = norm(&utc.column(0).to_vec(), Some(&weight))?;
    let err_initial = if u0n > T::zero() { norm(&d0, None)? / u0n } else { norm(&d0, None)? };
    let err_final = if utn > T::zero() { norm(&dt_, Some(&weight))? / utn } else { norm(&dt_, Some(&weight))? };

    let l2 = |a: &Array2<T>, j: usize| -> Result<f64> {
        let col: Vec<T> = a.column(j).iter().map(|&v| v * v).collect();
        Ok(quadrature(&col, &box_x)?.sqrt().as_f64())
    };
    let mut stage_norms = Vec::with_capacity(ts.len());
    for (j, &t) in ts.iter().enumerate() {
        let phi = p.cutoff(t);
        let nu = Array2::from_shape_fn((xs.len(), 1), |(i, _)| phi * nu1[[i, j]] + (T::one() - phi) * nu2[[i, j]] + hum.v[[i, j]]);
        stage_norms.push(StageNorm { t: t.as_f64(), nu1: l2(&nu1, j)?, nu2: l2(&nu2, j)?, omega: l2(&hum.v, j)?, nu: l2(&nu, 0)? });
    }
    Ok(SteerReport { f, nu1, nu2, hum, err_initial, err_final, stage_norms, dropped_target_modes: dropped })
}
