//! Control constructions: minimum-norm synthesis, non-controllable modes and steering.

mod hum;
mod modes;
mod steer;

pub use hum::{apply_discrete_operator, hum_solve, ControlProblem, ControlSolution, HumDiagnostics};
pub use modes::{mode_construct, mode_residual, noncontrol_scan, NonControlMode, ScanRow};
pub use steer::{steer_pipeline, StageNorm, SteerParams, SteerReport, SteerVariant, SteeringPlan};
