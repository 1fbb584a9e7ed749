use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxoniumParams {
    pub ec_ghz: f64,
    pub el_ghz: f64,
    pub ej_ghz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SnailParams {
    /// Small-junction asymmetry, 0 < alpha < 1.
    pub alpha: f64,
    /// Josephson energy of one large junction.
    pub ej_ghz: f64,
    pub n_junctions: u32,
    /// Charging and inductive energy of the linearized SNAIL resonator mode.
    pub ec_ghz: f64,
    pub el_ghz: f64,
    /// Third-order coefficient of the mode; `None` means "compute from the junctions".
    pub c3_mhz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonatorParams {
    pub omega_ghz: f64,
    pub kappa_mhz: f64,
    pub chi_fr_mhz: f64,
    /// Charging energy of the readout mode; `None` gives symmetric quadratures
    /// (E_C = omega/8, so n_zpf = phi_zpf = 1/sqrt 2).
    pub ec_ghz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingParams {
    /// Inductive fluxonium-SNAIL coupling, multiplies phi_f phi_s.
    pub g_fs_mhz: f64,
    /// Capacitive SNAIL-resonator coupling, multiplies n_s n_r.
    pub g_sr_mhz: f64,
}

/// External fluxes as phases, 2π Φ/Φ₀.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxBias {
    pub phi_ext_f: f64,
    pub phi_ext_s: f64,
}

impl FluxBias {
    /// From fluxes in units of Φ₀.
    pub fn from_flux_quanta(flux_f: f64, flux_s: f64) -> Self {
        Self {
            phi_ext_f: TAU * flux_f,
            phi_ext_s: TAU * flux_s,
        }
    }
}

/// Static circuit parameters of the fluxonium-SNAIL-resonator device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams {
    pub fluxonium: FluxoniumParams,
    pub snail: SnailParams,
    pub resonator: ResonatorParams,
    pub coupling: CouplingParams,
    pub flux: FluxBias,
    /// Loop-area ratio A_f / A_s tying the SNAIL flux to the fluxonium flux
    /// under a global coil.
    pub area_ratio: Option<f64>,
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Operating-point table values, fluxonium {0.89, 0.47, 5.54} GHz.
    Table1,
    /// Flux-spectroscopy fit values, fluxonium {0.9, 0.5, 5.54} GHz.
    #[serde(rename = "figS6", alias = "figs6")]
    FigS6,
}

impl Preset {
    pub fn params(self) -> DeviceParams {
        match self {
            Preset::Table1 => DeviceParams::table1(),
            Preset::FigS6 => DeviceParams::fig_s6(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::FigS6 => "figS6",
        }
    }
}

/// Fluxonium flux bias of the operating point, in Φ₀.
pub const OPERATING_FLUX_F: f64 = 9.5;
/// SNAIL flux bias of the operating point, in Φ₀.
pub const OPERATING_FLUX_S: f64 = 0.27;
/// Designed loop-area ratio A_f / A_s.
pub const DEFAULT_AREA_RATIO: f64 = 35.0;

impl DeviceParams {
    pub fn table1() -> Self {
        Self {
            fluxonium: FluxoniumParams {
                ec_ghz: 0.89,
                el_ghz: 0.47,
                ej_ghz: 5.54,
            },
            snail: SnailParams {
                alpha: 0.5,
                ej_ghz: 65.0,
                n_junctions: 3,
                ec_ghz: 0.39,
                el_ghz: 15.4,
                c3_mhz: Some(350.0),
            },
            resonator: ResonatorParams {
                omega_ghz: 6.245,
                kappa_mhz: 0.4,
                chi_fr_mhz: 0.55,
                ec_ghz: None,
            },
            coupling: CouplingParams {
                g_fs_mhz: 500.0,
                g_sr_mhz: 130.0,
            },
            flux: FluxBias::from_flux_quanta(OPERATING_FLUX_F, OPERATING_FLUX_S),
            area_ratio: Some(DEFAULT_AREA_RATIO),
        }
    }

    pub fn fig_s6() -> Self {
        let mut p = Self::table1();
        p.fluxonium.ec_ghz = 0.9;
        p.fluxonium.el_ghz = 0.5;
        p
    }

    /// Copy with every inter-mode coupling and the SNAIL cubic term switched off.
    pub fn decoupled(&self) -> Self {
        let mut p = *self;
        p.coupling.g_fs_mhz = 0.0;
        p.coupling.g_sr_mhz = 0.0;
        p.snail.c3_mhz = Some(0.0);
        p
    }

    /// Readout-mode charging energy, defaulting to symmetric quadratures.
    pub fn resonator_ec_ghz(&self) -> f64 {
        self.resonator
            .ec_ghz
            .unwrap_or(self.resonator.omega_ghz / 8.0)
    }

    /// Readout-mode inductive energy from omega = sqrt(8 E_C E_L).
    pub fn resonator_el_ghz(&self) -> f64 {
        let w = self.resonator.omega_ghz;
        w * w / (8.0 * self.resonator_ec_ghz())
    }

    pub fn validate(&self) -> Result<()> {
        let f = &self.fluxonium;
        require_positive("fluxonium.ec_ghz", f.ec_ghz)?;
        require_positive("fluxonium.el_ghz", f.el_ghz)?;
        require_non_negative("fluxonium.ej_ghz", f.ej_ghz)?;

        let s = &self.snail;
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return Err(Error::param("snail.alpha", format!("must lie in (0, 1), got {}", s.alpha)));
        }
        require_positive("snail.ej_ghz", s.ej_ghz)?;
        if s.n_junctions < 1 {
            return Err(Error::param("snail.n_junctions", "must be at least 1"));
        }
        require_positive("snail.ec_ghz", s.ec_ghz)?;
        require_positive("snail.el_ghz", s.el_ghz)?;
        if let Some(c3) = s.c3_mhz {
            require_finite("snail.c3_mhz", c3)?;
        }

        let r = &self.resonator;
        require_positive("resonator.omega_ghz", r.omega_ghz)?;
        require_positive("resonator.kappa_mhz", r.kappa_mhz)?;
        require_finite("resonator.chi_fr_mhz", r.chi_fr_mhz)?;
        if let Some(ec) = r.ec_ghz {
            require_positive("resonator.ec_ghz", ec)?;
        }

        require_finite("coupling.g_fs_mhz", self.coupling.g_fs_mhz)?;
        require_finite("coupling.g_sr_mhz", self.coupling.g_sr_mhz)?;
        require_finite("flux.phi_ext_f", self.flux.phi_ext_f)?;
        require_finite("flux.phi_ext_s", self.flux.phi_ext_s)?;
        if let Some(ratio) = self.area_ratio {
            require_positive("area_ratio", ratio)?;
        }
        Ok(())
    }
}

impl Default for DeviceParams {
    fn default() -> Self {
        Self::table1()
    }
}
