//! Photon release from the fluxonium into the resonator and out through its port.

pub mod heisenberg;
pub mod shaping;

pub use heisenberg::{constant_g_analytical, heisenberg_evolve, quadrature_trace, FieldSample, FieldTrace};
pub use shaping::{
    analytic_shaping_pulse, default_sech_grid, evacuation_residual, numerical_shaping_pulse, sech_target, SumRule,
    DEFAULT_WINDOW_SAMPLES, DEFAULT_WINDOW_WIDTHS, DEPLETION_FLOOR, TAIL_ALLOWANCE,
};
