//! Open-system dynamics of the effective conversion model.

mod chevron;
mod lindblad;
mod model;
mod reset;

pub use chevron::{rabi_chevron, ChevronMap, ChevronOptions};
pub use lindblad::{lindblad_evolve, step_bound, SimulationTrace};
pub use model::{
    calibrate_gamma_total, thermal_rates, DensityMatrix, EffectiveModel, StarkTerms, ThermalModel, BASIS,
    CALIBRATION_THRESHOLD, DEVICE_TEMPERATURE_MK, E0, E1, G0, G1,
};
pub use reset::{
    effective_decay_rate, heating_trace, readout_averaged_population, reset_simulation, reset_threshold,
    ResetMode, ResetOutcome,
};
