//! Adaptive quadrature for the oscillatory integrals and the 1D model bounds.

mod adaptive;
mod fresnel;
mod phase;
mod vdc;

pub use adaptive::{
    adaptive, gk15_from_samples, integrate_1d, integrate_oscillatory, kronrod_nodes, presplit, PanelSampler,
    QuadResult, C64, MAX_DEPTH,
};
pub use fresnel::{fresnel_grid, fresnel_max, fresnel_partial, fresnel_profile, FRESNEL_TOL};
pub use phase::{integrate_phase, integrate_phase_with, variable_components, weight_integral, PhaseProblem};
pub use vdc::{vdc_bound_i, vdc_bound_ii, VdcGeometry};
