//! Minimum-norm synthesis of `v` with `P_h v = f`, `v` supported in a time window.
//!
//! `P_h` is Crank-Nicolson in time with the 5-point third and 3-point second difference in
//! space, imposed on interior rows only, so the two outermost spatial layers act as boundary
//! controls. With `M` the matrix of `P_h` restricted to the window unknowns and `Q = Mᵀ` its
//! discrete adjoint, the normal equations `QᵀQ p = f` give `v = Qp`, the smallest `v` that
//! solves the forward equation exactly, and `‖v‖² = ⟨p, f⟩`.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::Grid1D;
use crate::scalar::Real;

const SUPPORT_TOL: f64 = 1e-12;
const TIKHONOV: f64 = 1e-12;
/// An unshifted factorization is kept only if it reproduces `f` to this relative accuracy.
const ACCEPT_RESIDUAL: f64 = 1e-10;

/// Forcing on the box `(c - L, c + L) × (0, T)`, sampled at `nx × nt` nodes including the edges.
#[derive(Debug, Clone)]
pub struct ControlProblem<T> {
    pub center: T,
    pub l: T,
    pub horizon: T,
    pub t1: T,
    pub t2: T,
    pub epsilon: T,
    pub f: Array2<T>,
}

#[derive(Debug, Clone)]
pub struct ControlSolution<T> {
    pub v: Array2<T>,
    pub p: Vec<T>,
    pub forward_residual: T,
    pub support_leakage: T,
    pub quadratic_cost: T,
    /// `⟨p, f⟩`; equals `quadratic_cost` at the minimizer.
    pub dual_pairing: T,
    pub regularized: bool,
    pub window: (usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HumDiagnostics {
    pub forward_residual: f64,
    pub support_leakage: f64,
    pub quadratic_cost: f64,
    pub dual_pairing: f64,
    pub regularized: bool,
}

impl<T: Real> ControlSolution<T> {
    pub fn diagnostics(&self) -> HumDiagnostics {
        HumDiagnostics {
            forward_residual: self.forward_residual.as_f64(),
            support_leakage: self.support_leakage.as_f64(),
            quadratic_cost: self.quadratic_cost.as_f64(),
            dual_pairing: self.dual_pairing.as_f64(),
            regularized: self.regularized,
        }
    }
}

impl<T: Real> ControlProblem<T> {
    pub fn new(center: T, l: T, horizon: T, t1: T, t2: T, epsilon: T, f: Array2<T>) -> Result<Self> {
        let p = Self { center, l, horizon, t1, t2, epsilon, f };
        p.validate()?;
        Ok(p)
    }

    pub fn x_grid(&self) -> Result<Grid1D<T>> {
        Grid1D::new(self.center - self.l, self.center + self.l, self.f.nrows())
    }

    pub fn t_grid(&self) -> Result<Grid1D<T>> {
        Grid1D::new(T::zero(), self.horizon, self.f.ncols())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > T::zero() && self.horizon > T::zero()) {
            return Err(Error::Precondition("box half-width and horizon must be positive".into()));
        }
        if !(T::zero() < self.t1 && self.t1 < self.t2 && self.t2 < self.horizon) {
            return Err(Error::Precondition(format!(
                "need 0 < t1 < t2 < T, got t1 = {}, t2 = {}, T = {}",
                self.t1, self.t2, self.horizon
            )));
        }
        if !(self.epsilon > T::zero() && self.epsilon < self.t1.min(self.horizon - self.t2)) {
            return Err(Error::Precondition(format!("need 0 < epsilon < min(t1, T - t2), got {}", self.epsilon)));
        }
        let (nx, nt) = self.f.dim();
        if nx < 8 || nt < 4 {
            return Err(Error::Grid(format!("control grid {nx}×{nt} is too coarse; need at least 8×4")));
        }
        if self.f.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("forcing must be finite".into()));
        }
        let leak = self.forcing_leakage()?;
        let total = self.f.iter().fold(T::zero(), |a, &v| a + v * v);
        if leak > T::lit(SUPPORT_TOL) * total {
            return Err(Error::Support(format!(
                "forcing mass {leak:e} outside (x_min, x_max) × [t1, t2] exceeds {SUPPORT_TOL:e} of total {total:e}"
            )));
        }
        Ok(())
    }

    fn forcing_leakage(&self) -> Result<T> {
        let tg = self.t_grid()?;
        let (nx, nt) = self.f.dim();
        let slack = tg.spacing() * T::lit(1e-9);
        let mut leak = T::zero();
        for j in 0..nt {
            let t = tg.node(j);
            let outside_t = t < self.t1 - slack || t > self.t2 + slack;
            for i in 0..nx {
                if outside_t || i < 2 || i + 2 >= nx {
                    leak = leak + self.f[[i, j]] * self.f[[i, j]];
                }
            }
        }
        Ok(leak)
    }

    /// Time-node range `[a, b]` inside `[t1 - ε, t2 + ε]`.
    pub fn window(&self) -> Result<(usize, usize)> {
        let tg = self.t_grid()?;
        let dt = tg.spacing().as_f64();
        let lo = (self.t1 - self.epsilon).as_f64() / dt;
        let hi = (self.t2 + self.epsilon).as_f64() / dt;
        let a = (lo - 1e-9).ceil().max(1.0) as usize;
        let b = ((hi + 1e-9).floor() as usize).min(self.f.ncols() - 2);
        if b <= a {
            return Err(Error::Grid("time grid too coarse to resolve the control window".into()));
        }
        Ok((a, b))
    }
}

struct Stencil {
    d3: [f64; 5],
    d2: [f64; 5],
    inv_dt: f64,
}

impl Stencil {
    fn new(dx: f64, dt: f64) -> Self {
        let c3 = 1.0 / (2.0 * dx * dx * dx);
        let c2 = 1.0 / (dx * dx);
        Self { d3: [-c3, 2.0 * c3, 0.0, -2.0 * c3, c3], d2: [0.0, c2, -2.0 * c2, c2, 0.0], inv_dt: 1.0 / dt }
    }

    /// Coefficient of `v_{i+k-2}` at the new (`new = true`) or old level in row `i` of a step.
    fn coeff(&self, k: usize, new: bool) -> f64 {
        let l = 0.5 * (self.d3[k] + self.d2[k]);
        let id = if k == 2 { self.inv_dt } else { 0.0 };
        if new {
            id - l
        } else {
            -id - l
        }
    }
}

/// `P_h v` on interior rows, one column per step; `v` is `nx × nt`.
pub fn apply_discrete_operator(v: &Array2<f64>, dx: f64, dt: f64) -> Array2<f64> {
    let (nx, nt) = v.dim();
    let st = Stencil::new(dx, dt);
    let mut out = Array2::zeros((nx - 4, nt - 1));
    for n in 0..nt - 1 {
        for i in 2..nx - 2 {
            let mut acc = 0.0;
            for k in 0..5 {
                acc += st.coeff(k, true) * v[[i + k - 2, n + 1]] + st.coeff(k, false) * v[[i + k - 2, n]];
            }
            out[[i - 2, n]] = acc;
        }
    }
    out
}

/// Half-step forcing `(f^n + f^{n+1})/2` on interior rows.
fn half_step_forcing(f: &Array2<f64>) -> Array2<f64> {
    let (nx, nt) = f.dim();
    Array2::from_shape_fn((nx - 4, nt - 1), |(i, n)| 0.5 * (f[[i + 2, n]] + f[[i + 2, n + 1]]))
}

pub fn hum_solve<T: Real>(problem: &ControlProblem<T>) -> Result<ControlSolution<T>> {
    problem.validate()?;
    let (nx, nt) = problem.f.dim();
    let dx = problem.x_grid()?.spacing().as_f64();
    let dt = problem.t_grid()?.spacing().as_f64();
    let (a, b) = problem.window()?;
    let f64s = problem.f.mapv(|v| v.as_f64());
    let rhs_full = half_step_forcing(&f64s);
    let f_norm = rhs_full.iter().map(|v| v * v).sum::<f64>().sqrt();
    let zero = T::zero();
    if f_norm == 0.0 {
        return Ok(ControlSolution {
            v: Array2::zeros((nx, nt)),
            p: Vec::new(),
            forward_residual: zero,
            support_leakage: zero,
            quadratic_cost: zero,
            dual_pairing: zero,
            regularized: false,
            window: (a, b),
        });
    }

    let levels = b - a + 1;
    let steps: Vec<usize> = (a - 1..=b).collect();
    let rows_per = nx - 4;
    let (nr, nc) = (steps.len() * rows_per, levels * nx);
    if nr > nc {
        return Err(Error::Grid(format!(
            "control window spans {levels} time levels, too few for {nr} constraints on {nc} unknowns"
        )));
    }
    let st = Stencil::new(dx, dt);
    let col = |level: usize, i: usize| (level - a) * nx + i;
    let mut m = DMatrix::<f64>::zeros(nr, nc);
    let mut rhs = DVector::<f64>::zeros(nr);
    for (s, &n) in steps.iter().enumerate() {
        for i in 2..nx - 2 {
            let r = s * rows_per + i - 2;
            rhs[r] = rhs_full[[i - 2, n]];
            for k in 0..5 {
                let ii = i + k - 2;
                if (a..=b).contains(&(n + 1)) {
                    m[(r, col(n + 1, ii))] += st.coeff(k, true);
                }
                if (a..=b).contains(&n) {
                    m[(r, col(n, ii))] += st.coeff(k, false);
                }
            }
        }
    }
    let mt = m.transpose();
    let plain = (&m * &mt).cholesky().map(|chol| refine(&m, &mt, &rhs, |r| chol.solve(r)));
    let (p, regularized) = match plain {
        Some(p) if (&rhs - &m * (&mt * &p)).norm() <= ACCEPT_RESIDUAL * rhs.norm() => (p, false),
        _ => (tikhonov_normal(&m, &mt, &rhs)?, true),
    };
    let vvec = &mt * &p;

    let mut v = Array2::<f64>::zeros((nx, nt));
    for level in a..=b {
        for i in 0..nx {
            v[[i, level]] = vvec[col(level, i)];
        }
    }
    let res = apply_discrete_operator(&v, dx, dt) - &rhs_full;
    let forward_residual = res.iter().map(|x| x * x).sum::<f64>().sqrt() / f_norm;
    let support_leakage: f64 = (0..nt)
        .filter(|n| !(a..=b).contains(n))
        .map(|n| (0..nx).map(|i| v[[i, n]] * v[[i, n]]).sum::<f64>())
        .sum();
    let quadratic_cost = vvec.norm_squared();
    let dual_pairing = p.dot(&rhs);
    if !(forward_residual.is_finite() && quadratic_cost.is_finite()) {
        return Err(Error::Numerical("control synthesis produced non-finite values".into()));
    }
    Ok(ControlSolution {
        v: v.mapv(T::lit),
        p: p.iter().map(|&x| T::lit(x)).collect(),
        forward_residual: T::lit(forward_residual),
        support_leakage: T::lit(support_leakage),
        quadratic_cost: T::lit(quadratic_cost),
        dual_pairing: T::lit(dual_pairing),
        regularized,
        window: (a, b),
    })
}

/// Solves `MMᵀp = f` with a few steps of iterative refinement on top of `solve`.
fn refine(m: &DMatrix<f64>, mt: &DMatrix<f64>, rhs: &DVector<f64>, solve: impl Fn(&DVector<f64>) -> DVector<f64>) -> DVector<f64> {
    let mut p = solve(rhs);
    for _ in 0..3 {
        let r = rhs - m * (mt * &p);
        p += solve(&r);
    }
    p
}

/// Boundary control of the discrete scheme is exponentially ill-conditioned, so `MMᵀ` is
/// often numerically singular; the shift is `1e-12` times its largest diagonal entry.
fn tikhonov_normal(m: &DMatrix<f64>, mt: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<DVector<f64>> {
    let mut g = m * mt;
    let shift = TIKHONOV * g.diagonal().max();
    for k in 0..g.nrows() {
        g[(k, k)] += shift;
    }
    let chol = g.cholesky().ok_or_else(|| Error::Numerical("normal matrix singular even after Tikhonov shift".into()))?;
    Ok(refine(m, mt, rhs, |r| chol.solve(r)))
}
