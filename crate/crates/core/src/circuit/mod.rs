//! Circuit Hamiltonians and the static quantities derived from them.

mod fluxonium;
mod params;
mod pump;
mod snail;
mod sweep;
mod system;

pub use fluxonium::{
    fluxonium_hamiltonian, fluxonium_levels, fluxonium_transition, OscillatorBasis, DEFAULT_FLUXONIUM_DIM,
    MIN_FLUXONIUM_DIM,
};
pub use params::{
    CouplingParams, DeviceParams, FluxBias, FluxoniumParams, Preset, ResonatorParams, SnailParams,
    DEFAULT_AREA_RATIO, OPERATING_FLUX_F, OPERATING_FLUX_S,
};
pub use pump::{coupling_rate, pump_to_displacement, stark_shifts, StarkShifts};
pub use snail::{principal_phase, resolve_c3, snail_c3, snail_expansion, snail_mode_c3, C3Source, SnailExpansion};
pub use sweep::{flux_sweep, FluxPoint};
pub use system::{
    build_system, build_system_hamiltonian, dress_spectrum, phi2_matrix_element, phi_matrix_element, system_levels,
    zero_point_fluctuations, BareLabel, DressedState, Mode, ModeOperators, ModeZpf, SystemHamiltonian,
    SystemOptions, SystemSpectrum, Truncation, ZpfProjection, DEFAULT_DIMENSION_CAP, DEFAULT_LABELED_STATES,
    LABEL_THRESHOLD,
};
