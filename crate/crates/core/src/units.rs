//! Unit conventions.
//!
//! Hamiltonians are in GHz (frequency units, h = 1). Rates and couplings are
//! carried as ordinary frequencies in MHz and turned into angular rates
//! (rad/us) exactly once, through [`angular`], where an equation of motion is
//! integrated. Times are in microseconds.

use std::f64::consts::TAU;

/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Ordinary frequency in MHz to angular rate in rad/us.
#[inline]
pub fn angular(mhz: f64) -> f64 {
    TAU * mhz
}

/// Angular rate in rad/us to ordinary frequency in MHz.
#[inline]
pub fn ordinary(rad_per_us: f64) -> f64 {
    rad_per_us / TAU
}

#[inline]
pub fn mhz_to_ghz(mhz: f64) -> f64 {
    mhz * 1e-3
}

#[inline]
pub fn ghz_to_mhz(ghz: f64) -> f64 {
    ghz * 1e3
}

/// Boltzmann factor exp(-h f / k_B T) for a transition at `freq_ghz` and a
/// temperature in millikelvin.
pub fn boltzmann_factor(freq_ghz: f64, temperature_mk: f64) -> f64 {
    let energy = PLANCK * freq_ghz * 1e9;
    let thermal = BOLTZMANN * temperature_mk * 1e-3;
    (-energy / thermal).exp()
}
