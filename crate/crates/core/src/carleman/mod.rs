//! Weighted estimate for `P = ∂t - ∂xxx - ∂xx` on `(-L, L) × (0, T)`: closed-form coefficients,
//! positivity threshold and quadrature checks on admissible test functions.

mod fields;
mod inequality;
pub mod symbolic;
mod weight;

pub use fields::{
    coefficients_def, default_ladder, fd_cross_check, positivity_scan, CoefficientField, FdCheck, MarginGrid,
    PositivityScan, ScanRung,
};
pub use inequality::{verify_inequality, AdmissibleTest, Bump, CarlemanQuadrature, InequalityReport, Profile, QSample};
pub use weight::{coefficients_abc, weight_eval, CarlemanWeight, Expansion, ExpansionVariant, WeightPartials};
