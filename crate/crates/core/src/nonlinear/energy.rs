use serde::Serialize;

use crate::error::{check_len, Result};
use crate::linear::{trace_extract, BoundaryData, HalfLineState};
use crate::numerics::{finite_diff, quadrature};
use crate::scalar::Real;

/// Both sides of `(1/2) d/dt ∫u² = -h u_xx(0) + g²/2 - h g - ∫u_x²` per time step.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyLedger<T> {
    /// `(1/2)∫u²` at every time level.
    pub energy: Vec<T>,
    /// Right-hand side at every time level.
    pub rhs: Vec<T>,
    /// `|ΔE/Δt - (rhs_j + rhs_{j+1})/2|` for every step.
    pub residual: Vec<T>,
}

impl<T: Real> EnergyLedger<T> {
    pub fn max_residual(&self) -> T {
        self.residual.iter().fold(T::zero(), |m, &r| m.max(r))
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.energy.windows(2).all(|p| p[1] <= p[0])
    }
}

/// `(1/2)∫_0^X u(x,t_j)² dx` for every time level.
pub fn energy_series<T: Real>(state: &HalfLineState<T>) -> Result<Vec<T>> {
    (0..state.time_grid.len())
        .map(|j| {
            let sq: Vec<T> = state.values.column(j).iter().map(|&v| v * v).collect();
            Ok(T::lit(0.5) * quadrature(&sq, &state.space_grid)?)
        })
        .collect()
}

/// Audits the energy identity of `u_t = u_xxx + u_xx` on `x > 0` with traces `h`, `g`.
pub fn energy_audit<T: Real>(state: &HalfLineState<T>, boundary: &BoundaryData<T>) -> Result<EnergyLedger<T>> {
    check_len(state.time_grid.len(), boundary.h.len())?;
    let energy = energy_series(state)?;
    let traces = trace_extract(state)?;
    let nt = state.time_grid.len();
    let mut rhs = Vec::with_capacity(nt);
    for j in 0..nt {
        let col = state.values.column(j).to_vec();
        let ux = finite_diff(&col, &state.space_grid, 1)?;
        let sq: Vec<T> = ux.iter().map(|&v| v * v).collect();
        let diss = quadrature(&sq, &state.space_grid)?;
        let (h, g) = (boundary.h[j], boundary.g[j]);
        rhs.push(-h * traces.dxx[j] + T::lit(0.5) * g * g - h * g - diss);
    }
    let dt = state.time_grid.spacing();
    let residual = (0..nt.saturating_sub(1))
        .map(|j| ((energy[j + 1] - energy[j]) / dt - T::lit(0.5) * (rhs[j] + rhs[j + 1])).abs())
        .collect();
    Ok(EnergyLedger { energy, rhs, residual })
}
