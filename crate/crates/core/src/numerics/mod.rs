//! Grids, transforms, quadrature, finite differences and cubic roots.

pub mod cubic;
pub mod dft;
pub mod diff;
pub mod grid;
pub mod quadrature;
pub mod sobolev;

pub use cubic::{cubic_roots, CubicRoots};
pub use dft::{dft_forward, dft_from_nodes, dft_inverse, SpectralPlan};
pub use diff::{finite_diff, stencil_weights, trace_weights};
pub use grid::{signed_frequency, wavenumbers, ComplexField, Grid1D, SpectralCoeffs};
pub use quadrature::{gauss_legendre, panel_rule, quadrature, quadrature_weights, quadrature_with, QuadRule};
pub use sobolev::{bracket, h1_norm, l2_norm, sobolev_norm, sobolev_norm_physical};
