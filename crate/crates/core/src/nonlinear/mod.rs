//! Picard iteration for the forced nonlinear problem and the boundary energy ledger.

mod energy;
mod ibvp;

pub use energy::{energy_audit, energy_series, EnergyLedger};
pub use ibvp::{
    contraction_radius, gamma_map, solve_fixed_point, GammaContext, IbvpProblem, RadiusProbe, RadiusReport, SolveReport,
};
