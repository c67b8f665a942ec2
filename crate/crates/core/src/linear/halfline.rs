use ndarray::Array2;
use num_complex::Complex;
use serde::Serialize;

use crate::error::{check_len, Error, Result};
use crate::numerics::{trace_weights, Grid1D};
use crate::scalar::Real;

use super::boundary::{boundary_operator, BoundaryQuadrature, BoundaryReport};
use super::extension::ExtensionRule;
use super::propagate::WholeLine;
use super::state::{BoundaryData, HalfLineState};
use super::trace::trace_extract;

/// A half-line grid `[0, (n-1)Δx]` paired with the whole-line grid `[-nΔx, (n-1)Δx]`.
#[derive(Debug, Clone)]
pub struct HalfLineSetup<T: Real> {
    pub half: Grid1D<T>,
    pub whole: WholeLine<T>,
    pub rule: ExtensionRule,
    parity: Vec<T>,
}

impl<T: Real> HalfLineSetup<T> {
    pub fn new(half: Grid1D<T>, rule: ExtensionRule) -> Result<Self> {
        if half.x_min() != T::zero() {
            return Err(Error::Grid(format!("half-line grid must start at 0, got {}", half.x_min())));
        }
        let n = half.len();
        let dx = half.spacing();
        let whole = WholeLine::new(Grid1D::with_spacing(-dx * T::from_usize_lossy(n), dx, 2 * n)?);
        let parity = (0..2 * n)
            .map(|j| {
                let k = crate::numerics::signed_frequency(j, 2 * n);
                if k % 2 == 0 {
                    T::one()
                } else {
                    -T::one()
                }
            })
            .collect();
        Ok(Self { half, whole, rule, parity })
    }

    pub fn origin(&self) -> usize {
        self.half.len()
    }

    pub fn extend(&self, half_values: &[T]) -> Vec<T> {
        self.rule.extend(half_values, self.half.spacing())
    }

    pub fn restrict(&self, whole: &[Complex<T>]) -> Vec<T> {
        whole[self.origin()..].iter().map(|z| z.re).collect()
    }

    /// Value and first derivative at `x = 0` of the field with unitary coefficients `c`.
    pub fn origin_traces(&self, c: &[Complex<T>]) -> (T, T) {
        let scale = T::one() / T::from_usize_lossy(c.len()).sqrt();
        let mut v = Complex::new(T::zero(), T::zero());
        let mut d = Complex::new(T::zero(), T::zero());
        for ((&ck, &p), &ik) in c.iter().zip(&self.parity).zip(self.whole.derivative_symbol()) {
            let term = ck * p;
            v = v + term;
            d = d + term * ik;
        }
        (v.re * scale, d.re * scale)
    }
}

/// Whole-line evolution of the extended data, restricted to `x ≥ 0`, with its traces at `x = 0`.
pub fn whole_line_part<T: Real>(
    setup: &HalfLineSetup<T>,
    u0: &[T],
    time_grid: &Grid1D<T>,
) -> Result<(HalfLineState<T>, BoundaryData<T>)> {
    check_len(setup.half.len(), u0.len())?;
    let wl = &setup.whole;
    let c0 = wl.forward_real(&setup.extend(u0));
    let n = setup.half.len();
    let nt = time_grid.len();
    let mut values = Array2::<T>::zeros((n, nt));
    let mut h = vec![T::zero(); nt];
    let mut g = vec![T::zero(); nt];
    for (j, t) in time_grid.nodes().into_iter().enumerate() {
        let c = wl.evolve_coeffs(&c0, t);
        let (v, d) = setup.origin_traces(&c);
        h[j] = v;
        g[j] = d;
        let field = wl.inverse(&c);
        for (i, z) in field[setup.origin()..].iter().enumerate() {
            values[[i, j]] = z.re;
        }
    }
    Ok((HalfLineState::new(setup.half, *time_grid, values)?, BoundaryData::new(*time_grid, h, g)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct SemigroupReport {
    /// `(u0(0), u0'(0))`; both vanish for compatible data.
    pub compatibility_defect: (f64, f64),
    /// `max_t |u(0,t)| + max_t |u_x(0,t)|` of the result.
    pub trace_residual: f64,
    pub boundary: BoundaryReport,
}

/// `W_0(t)u_0` on `space_grid × time_grid` with default extension and quadrature.
pub fn halfline_semigroup<T: Real>(u0: &[T], space_grid: &Grid1D<T>, time_grid: &Grid1D<T>) -> Result<HalfLineState<T>> {
    let setup = HalfLineSetup::new(*space_grid, ExtensionRule::default())?;
    Ok(halfline_semigroup_with(u0, &setup, time_grid, &BoundaryQuadrature::default())?.0)
}

/// Extend, propagate on the whole line, then cancel the traces at `x = 0` with `W_D`, `W_N`.
pub fn halfline_semigroup_with<T: Real>(
    u0: &[T],
    setup: &HalfLineSetup<T>,
    time_grid: &Grid1D<T>,
    quad: &BoundaryQuadrature,
) -> Result<(HalfLineState<T>, SemigroupReport)> {
    let (free, traces) = whole_line_part(setup, u0, time_grid)?;
    let (corr, boundary) = boundary_operator(&traces, &setup.half, quad)?;
    let state = HalfLineState::new(setup.half, *time_grid, &free.values - &corr.values)?;
    let w1 = trace_weights(1, setup.half.spacing());
    let du0 = w1.iter().enumerate().fold(T::zero(), |acc, (k, &w)| acc + w * u0[k]);
    let tr = trace_extract(&state)?;
    let sup = |v: &[T]| v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let report = SemigroupReport {
        compatibility_defect: (u0[0].as_f64(), du0.as_f64()),
        trace_residual: (sup(&tr.value) + sup(&tr.dx)).as_f64(),
        boundary,
    };
    Ok((state, report))
}
