use serde::Serialize;

use super::fluxonium::fluxonium_transition;
use super::params::DeviceParams;
use crate::error::{Error, Result};
use crate::exec::{try_map_ordered, Execution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxPoint {
    /// Fluxonium external phase, rad.
    pub phi_ext_f: f64,
    /// SNAIL external phase that follows from the area ratio, rad.
    pub phi_ext_s: f64,
    pub frequency_ghz: f64,
}

/// Fluxonium transition `from -> to` across external phases `phis` (rad).
///
/// With an area ratio configured the SNAIL flux tracks the fluxonium flux as
/// φ_s = φ_f / ratio; otherwise it stays at the configured bias.
pub fn flux_sweep(
    params: &DeviceParams,
    phis: &[f64],
    transition: (usize, usize),
    dim: usize,
    exec: Execution,
) -> Result<Vec<FluxPoint>> {
    if phis.is_empty() {
        return Err(Error::param("phi_list", "must not be empty"));
    }
    params.validate()?;
    try_map_ordered(exec, phis, |_, &phi| {
        let mut p = *params;
        p.flux.phi_ext_f = phi;
        if let Some(ratio) = p.area_ratio {
            p.flux.phi_ext_s = phi / ratio;
        }
        fluxonium_transition(&p, dim, transition.0, transition.1)
            .map(|frequency_ghz| FluxPoint {
                phi_ext_f: phi,
                phi_ext_s: p.flux.phi_ext_s,
                frequency_ghz,
            })
            .map_err(|e| Error::AtFlux {
                phi_ext: phi,
                source: Box::new(e),
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn sweet_spot_at_half_flux() {
        let p = DeviceParams::fig_s6();
        let phis: Vec<f64> = (0..=40).map(|k| TAU * (8.5 + k as f64 * 0.05)).collect();
        let curve = flux_sweep(&p, &phis, (0, 1), 40, Execution::Parallel).unwrap();
        let min = curve
            .iter()
            .min_by(|a, b| a.frequency_ghz.total_cmp(&b.frequency_ghz))
            .unwrap();
        assert!(((min.phi_ext_f / TAU).fract() - 0.5).abs() < 1e-9);
        assert!((min.phi_ext_s - min.phi_ext_f / 35.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_about_half_flux() {
        let p = DeviceParams::table1();
        for d in [0.05, 0.3, 1.1] {
            let c = flux_sweep(&p, &[PI + d, PI - d], (0, 1), 40, Execution::Sequential).unwrap();
            assert!((c[0].frequency_ghz - c[1].frequency_ghz).abs() < 1e-9);
        }
    }

    #[test]
    fn operating_point_frequency() {
        let p = DeviceParams::table1();
        let c = flux_sweep(&p, &[TAU * 9.5], (0, 1), 40, Execution::Sequential).unwrap();
        assert!((c[0].frequency_ghz * 1e3 - 81.0).abs() <= 0.2 * 81.0);
    }

    #[test]
    fn errors_name_the_flux_point() {
        let p = DeviceParams::table1();
        let e = flux_sweep(&p, &[1.0], (0, 1), 10, Execution::Sequential).unwrap_err();
        assert!(matches!(e, Error::AtFlux { phi_ext, .. } if phi_ext == 1.0));
        assert!(flux_sweep(&p, &[], (0, 1), 40, Execution::Sequential).is_err());
    }

    #[test]
    fn sequential_matches_parallel() {
        let p = DeviceParams::table1();
        let phis: Vec<f64> = (0..16).map(|k| 2.5 + 0.1 * k as f64).collect();
        let a = flux_sweep(&p, &phis, (0, 1), 30, Execution::Sequential).unwrap();
        let b = flux_sweep(&p, &phis, (0, 1), 30, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
