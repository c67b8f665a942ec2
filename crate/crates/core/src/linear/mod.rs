//! Whole-line propagator, boundary operators, half-line semigroup and Duhamel term.

pub mod boundary;
pub mod duhamel;
pub mod extension;
pub mod halfline;
pub mod propagate;
pub mod roots;
pub mod state;
pub mod trace;

pub use boundary::{
    boundary_dirichlet, boundary_kernels, boundary_neumann, boundary_operator, decaying_pair_at, neumann_kernel_sup,
    BoundaryQuadrature, BoundaryReport,
};
pub use duhamel::{duhamel_forced, exp_linear_weights, DuhamelStepper};
pub use extension::{reflection_coefficients, rho, smooth_step_down, ExtensionRule};
pub use halfline::{halfline_semigroup, halfline_semigroup_with, whole_line_part, HalfLineSetup, SemigroupReport};
pub use propagate::{whole_line_propagate, WholeLine};
pub use roots::{characteristic_roots, root_split, CubicRootTriple, RootSplit, DEAD_BAND};
pub use state::{BoundaryData, HalfLineState};
pub use trace::{trace_extract, Traces};
