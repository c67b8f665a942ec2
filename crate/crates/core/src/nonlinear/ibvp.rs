use ndarray::Array2;
use num_complex::Complex;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::linear::{
    boundary_operator, whole_line_part, BoundaryData, BoundaryQuadrature, DuhamelStepper, ExtensionRule, HalfLineSetup,
    HalfLineState,
};
use crate::numerics::Grid1D;
use crate::scalar::Real;

use super::energy::energy_audit;

/// Data of `u_t - u_xxx - u_xx = u u_x + F` on `x > 0` with `u(0,t) = h`, `u_x(0,t) = g`.
#[derive(Debug, Clone)]
pub struct IbvpProblem<T> {
    pub u0: Vec<T>,
    pub space_grid: Grid1D<T>,
    pub boundary: BoundaryData<T>,
    pub nonlinearity_on: bool,
    /// `F(x_i, t_j)` on `space_grid × boundary.time_grid`.
    pub forcing: Option<Array2<T>>,
    pub extension: ExtensionRule,
    pub quadrature: BoundaryQuadrature,
}

impl<T: Real> IbvpProblem<T> {
    pub fn new(u0: Vec<T>, space_grid: Grid1D<T>, boundary: BoundaryData<T>) -> Result<Self> {
        check_len(space_grid.len(), u0.len())?;
        Ok(Self {
            u0,
            space_grid,
            boundary,
            nonlinearity_on: true,
            forcing: None,
            extension: ExtensionRule::default(),
            quadrature: BoundaryQuadrature::default(),
        })
    }

    pub fn with_forcing(mut self, forcing: Array2<T>) -> Result<Self> {
        check_len(self.space_grid.len(), forcing.nrows())?;
        check_len(self.time_grid().len(), forcing.ncols())?;
        self.forcing = Some(forcing);
        Ok(self)
    }

    pub fn linear(mut self) -> Self {
        self.nonlinearity_on = false;
        self
    }

    pub fn time_grid(&self) -> Grid1D<T> {
        self.boundary.time_grid
    }

    pub fn horizon(&self) -> T {
        self.boundary.time_grid.x_max()
    }

    /// Same problem with all data multiplied by `a`.
    pub fn scaled(&self, a: T) -> Self {
        let mut p = self.clone();
        p.u0.iter_mut().for_each(|v| *v = *v * a);
        p.boundary.h.iter_mut().for_each(|v| *v = *v * a);
        p.boundary.g.iter_mut().for_each(|v| *v = *v * a);
        if let Some(f) = p.forcing.as_mut() {
            f.mapv_inplace(|v| v * a);
        }
        p
    }

    fn validate(&self) -> Result<()> {
        if !(self.horizon() > self.time_grid().x_min()) {
            return Err(Error::Precondition("time horizon must be positive".into()));
        }
        if self.time_grid().x_min() != T::zero() {
            return Err(Error::Grid("time grid must start at t = 0".into()));
        }
        Ok(())
    }
}

/// Everything in `Γ` that does not depend on the iterate.
pub struct GammaContext<T: Real> {
    setup: HalfLineSetup<T>,
    time_grid: Grid1D<T>,
    free: HalfLineState<T>,
    free_traces: BoundaryData<T>,
    forcing_coeffs: Vec<Vec<Complex<T>>>,
    mask: Vec<bool>,
    boundary: BoundaryData<T>,
    nonlinear: bool,
    quadrature: BoundaryQuadrature,
}

impl<T: Real> GammaContext<T> {
    pub fn new(problem: &IbvpProblem<T>) -> Result<Self> {
        problem.validate()?;
        let setup = HalfLineSetup::new(problem.space_grid, problem.extension)?;
        let tg = problem.time_grid();
        let (free, free_traces) = whole_line_part(&setup, &problem.u0, &tg)?;
        let n_whole = setup.whole.len();
        let forcing_coeffs = match &problem.forcing {
            Some(f) => (0..tg.len()).map(|j| setup.whole.forward_real(&setup.extend(&f.column(j).to_vec()))).collect(),
            None => vec![vec![Complex::new(T::zero(), T::zero()); n_whole]; tg.len()],
        };
        let cut = n_whole / 3;
        let mask = (0..n_whole)
            .map(|j| crate::numerics::signed_frequency(j, n_whole).unsigned_abs() as usize <= cut)
            .collect();
        Ok(Self {
            setup,
            time_grid: tg,
            free,
            free_traces,
            forcing_coeffs,
            mask,
            boundary: problem.boundary.clone(),
            nonlinear: problem.nonlinearity_on,
            quadrature: problem.quadrature.clone(),
        })
    }

    pub fn setup(&self) -> &HalfLineSetup<T> {
        &self.setup
    }

    /// De-aliased `w w_x` of an extended snapshot, in spectral form.
    fn nonlinear_coeffs(&self, w_half: &[T]) -> Vec<Complex<T>> {
        let wl = &self.setup.whole;
        let mut c = wl.forward_real(&self.setup.extend(w_half));
        for (ck, &keep) in c.iter_mut().zip(&self.mask) {
            if !keep {
                *ck = Complex::new(T::zero(), T::zero());
            }
        }
        let w = wl.inverse(&c);
        let dw = wl.derivative_from_coeffs(&c);
        let prod: Vec<Complex<T>> = w.iter().zip(&dw).map(|(a, b)| Complex::new(a.re * b.re, T::zero())).collect();
        let mut p = wl.forward(&prod);
        for (pk, &keep) in p.iter_mut().zip(&self.mask) {
            if !keep {
                *pk = Complex::new(T::zero(), T::zero());
            }
        }
        p
    }

    pub fn apply(&self, w: &HalfLineState<T>) -> Result<HalfLineState<T>> {
        self.apply_inner(w, self.nonlinear)
    }

    /// `Γ` with the quadratic term switched off, which is the linear solution.
    pub fn linear_solution(&self) -> Result<HalfLineState<T>> {
        self.apply_inner(&HalfLineState::zeros(self.setup.half, self.time_grid), false)
    }

    fn apply_inner(&self, w: &HalfLineState<T>, nonlinear: bool) -> Result<HalfLineState<T>> {
        if !w.space_grid.same_as(&self.setup.half) || !w.time_grid.same_as(&self.time_grid) {
            return Err(Error::Grid("iterate is not on the problem grids".into()));
        }
        if w.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("iterate contains non-finite values".into()));
        }
        let nt = self.time_grid.len();
        let forcing: Vec<Vec<Complex<T>>> = (0..nt)
            .map(|j| {
                if nonlinear {
                    let nl = self.nonlinear_coeffs(&w.values.column(j).to_vec());
                    nl.iter().zip(&self.forcing_coeffs[j]).map(|(a, b)| *a + *b).collect()
                } else {
                    self.forcing_coeffs[j].clone()
                }
            })
            .collect();
        let stepper = DuhamelStepper::new(&self.setup.whole, self.time_grid.spacing());
        let duhamel = stepper.integrate(&forcing);
        let n = self.setup.half.len();
        let mut values = self.free.values.clone();
        let mut h = self.boundary.h.clone();
        let mut g = self.boundary.g.clone();
        for (j, d) in duhamel.iter().enumerate() {
            let (q1, q2) = self.setup.origin_traces(d);
            h[j] = h[j] - self.free_traces.h[j] - q1;
            g[j] = g[j] - self.free_traces.g[j] - q2;
            let field = self.setup.whole.inverse(d);
            for i in 0..n {
                values[[i, j]] = values[[i, j]] + field[self.setup.origin() + i].re;
            }
        }
        let corr_data = BoundaryData::new(self.time_grid, h, g)?;
        let (corr, _) = boundary_operator(&corr_data, &self.setup.half, &self.quadrature)?;
        HalfLineState::new(self.setup.half, self.time_grid, values + &corr.values)
    }
}

/// One application of `Γ`.
pub fn gamma_map<T: Real>(w: &HalfLineState<T>, problem: &IbvpProblem<T>) -> Result<HalfLineState<T>> {
    GammaContext::new(problem)?.apply(w)
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub solution: HalfLineState<T>,
    pub iterations: usize,
    /// `‖w^{k+1} - w^k‖` for each Picard step.
    pub residual_history: Vec<T>,
    /// Geometric-decay fit of the residual history.
    pub contraction_ratio: T,
    pub converged: bool,
    pub energy_audit: Vec<T>,
}

impl<T: Real> SolveReport<T> {
    /// Largest successive residual ratio from the second step on.
    pub fn max_step_ratio(&self) -> T {
        self.residual_history
            .windows(2)
            .skip(1)
            .fold(T::zero(), |m, p| m.max(p[1] / p[0]))
    }
}

/// Picard iteration from the linear solution until successive iterates are within `tol`.
pub fn solve_fixed_point<T: Real>(problem: &IbvpProblem<T>, tol: T, max_iter: usize) -> Result<SolveReport<T>> {
    if !(tol > T::zero()) {
        return Err(Error::Precondition(format!("tolerance must be positive, got {tol}")));
    }
    let ctx = GammaContext::new(problem)?;
    let mut w = ctx.linear_solution()?;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iter.max(1) {
        iterations += 1;
        let next = ctx.apply(&w)?;
        let r = next.distance(&w);
        w = next;
        if !r.is_finite() {
            return Err(Error::Numerical("Picard residual is not finite".into()));
        }
        let r = r.max(T::min_positive_value());
        history.push(r);
        if r < tol {
            converged = true;
            break;
        }
    }
    let audit = energy_audit(&w, &problem.boundary).map(|l| l.residual).unwrap_or_default();
    Ok(SolveReport {
        contraction_ratio: fit_ratio(&history),
        solution: w,
        iterations,
        residual_history: history,
        converged,
        energy_audit: audit,
    })
}

/// `exp` of the least-squares slope of `log r_k`; 0 for fewer than two residuals.
fn fit_ratio<T: Real>(history: &[T]) -> T {
    if history.len() < 2 {
        return T::zero();
    }
    let n = T::from_usize_lossy(history.len());
    let ks: Vec<T> = (0..history.len()).map(T::from_usize_lossy).collect();
    let ls: Vec<T> = history.iter().map(|r| r.ln()).collect();
    let mk = ks.iter().fold(T::zero(), |a, &b| a + b) / n;
    let ml = ls.iter().fold(T::zero(), |a, &b| a + b) / n;
    let (mut num, mut den) = (T::zero(), T::zero());
    for (k, l) in ks.iter().zip(&ls) {
        num = num + (*k - mk) * (*l - ml);
        den = den + (*k - mk) * (*k - mk);
    }
    (num / den).exp()
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusProbe {
    pub amplitude: f64,
    pub converged: bool,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RadiusReport {
    /// Largest amplitude that passed the contraction test.
    pub radius: f64,
    pub probes: Vec<RadiusProbe>,
}

/// Bisection on the data amplitude for the largest scale with step ratios below `ratio_cap`.
pub fn contraction_radius<T: Real>(
    base: &IbvpProblem<T>,
    lo: T,
    hi: T,
    steps: usize,
    ratio_cap: T,
    tol: T,
    max_iter: usize,
) -> Result<RadiusReport> {
    let mut probes = Vec::new();
    let mut probe = |a: T| -> Result<bool> {
        let rep = match solve_fixed_point(&base.scaled(a), tol, max_iter) {
            Ok(rep) => rep,
            Err(Error::Numerical(_)) => {
                probes.push(RadiusProbe { amplitude: a.as_f64(), converged: false, max_ratio: f64::INFINITY });
                return Ok(false);
            }
            Err(e) => return Err(e),
        };
        let ratio = rep.max_step_ratio();
        let ok = rep.converged && ratio <= ratio_cap;
        probes.push(RadiusProbe { amplitude: a.as_f64(), converged: rep.converged, max_ratio: ratio.as_f64() });
        Ok(ok)
    };
    let (mut a, mut b) = (lo, hi);
    if !probe(a)? {
        return Ok(RadiusReport { radius: 0.0, probes });
    }
    if probe(b)? {
        return Ok(RadiusReport { radius: b.as_f64(), probes });
    }
    for _ in 0..steps {
        let mid = (a * b).sqrt();
        if probe(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(RadiusReport { radius: a.as_f64(), probes })
}
