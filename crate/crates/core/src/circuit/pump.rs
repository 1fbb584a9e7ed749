//! Pump displacement, the resulting conversion rate and ac-Stark shifts.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::system::ModeZpf;
use crate::error::{require_finite, require_non_negative, Error, Result};
use crate::units::ghz_to_mhz;

/// g = 6 c3 ξ φ_f,zpf φ_s,zpf φ_r,zpf, in the units of `c3_mhz`.
pub fn coupling_rate(c3_mhz: f64, xi: C64, zpf: &ModeZpf) -> C64 {
    xi * (6.0 * c3_mhz * zpf.phi_zpf_f * zpf.phi_zpf_s * zpf.phi_zpf_r)
}

/// ξ = ε / (iκ_s/4 + Δ) with Δ = ω_d − ω_s.
///
/// `kappa_s_mhz` is the SNAIL-mode linewidth; it has no default.
pub fn pump_to_displacement(epsilon_mhz: f64, omega_d_ghz: f64, omega_s_ghz: f64, kappa_s_mhz: f64) -> Result<C64> {
    require_finite("epsilon_mhz", epsilon_mhz)?;
    require_finite("omega_d_ghz", omega_d_ghz)?;
    require_finite("omega_s_ghz", omega_s_ghz)?;
    require_non_negative("kappa_s_mhz", kappa_s_mhz)?;
    let delta = ghz_to_mhz(omega_d_ghz - omega_s_ghz);
    if delta == 0.0 && kappa_s_mhz == 0.0 {
        return Err(Error::Singularity);
    }
    Ok(C64::new(epsilon_mhz, 0.0) / C64::new(delta, kappa_s_mhz / 4.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StarkShifts {
    pub fluxonium_mhz: f64,
    pub resonator_mhz: f64,
}

/// |ξ|² χ per mode.
pub fn stark_shifts(xi: C64, chi_fs_mhz: f64, chi_sr_mhz: f64) -> StarkShifts {
    let p = xi.norm_sqr();
    StarkShifts {
        fluxonium_mhz: p * chi_fs_mhz,
        resonator_mhz: p * chi_sr_mhz,
    }
}
