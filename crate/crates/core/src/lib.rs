//! Numerical laboratory for the Korteweg-de Vries-Burgers equation on the half-line.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases at the bottom fix `f64`.

pub mod carleman;
pub mod control;
pub mod error;
pub mod io;
pub mod linear;
pub mod nonlinear;
pub mod numerics;
pub mod periodic;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid = numerics::Grid1D<f64>;
pub type Field = numerics::ComplexField<f64>;
pub type State = linear::HalfLineState<f64>;
pub type Boundary = linear::BoundaryData<f64>;
pub type Spectrum = periodic::PeriodicSpectrum<f64>;
pub type Modes = periodic::ModeCoeffs<f64>;
pub type Weight = carleman::CarlemanWeight<f64>;
pub type TestFunction = carleman::AdmissibleTest<f64>;
pub type Control = control::ControlProblem<f64>;
pub type Mode = control::NonControlMode<f64>;
pub type Steering = control::SteeringPlan<f64>;
