use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::operators::{eigvals_hermitian, OperatorMatrix};
use crate::units::boltzmann_factor;

/// Basis order of the effective model.
pub const BASIS: [&str; 4] = ["g0", "e0", "g1", "e1"];
pub const G0: usize = 0;
pub const E0: usize = 1;
pub const G1: usize = 2;
pub const E1: usize = 3;

/// Explicit pump-induced Stark terms |ξ|²(χ_fs f†f + χ_sr r†r), with
/// |ξ| = |g| / g_per_xi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarkTerms {
    pub chi_fs_mhz: f64,
    pub chi_sr_mhz: f64,
    /// Conversion rate per unit displacement, MHz.
    pub g_per_xi_mhz: f64,
}

/// Conversion model on {g0, e0, g1, e1} in the frame rotating with the pump.
///
/// Frequencies are ordinary (f = ω/2π) in MHz unless the name says otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveModel {
    pub omega_f_ghz: f64,
    pub omega_r_ghz: f64,
    pub chi_fr_mhz: f64,
    /// Drive amplitude used by the square-pulse runners.
    pub g_mhz: f64,
    /// ω_d − (ω_r − ω_f), already Stark-compensated.
    pub delta_mhz: f64,
    pub kappa_mhz: f64,
    pub stark: Option<StarkTerms>,
}

impl EffectiveModel {
    /// Device operating point, on resonance.
    pub fn table1(g_mhz: f64) -> Self {
        Self {
            omega_f_ghz: 0.081,
            omega_r_ghz: 6.245,
            chi_fr_mhz: 0.55,
            g_mhz,
            delta_mhz: 0.0,
            kappa_mhz: 0.4,
            stark: None,
        }
    }

    pub fn with_delta(mut self, delta_mhz: f64) -> Self {
        self.delta_mhz = delta_mhz;
        self
    }

    pub fn with_kappa(mut self, kappa_mhz: f64) -> Self {
        self.kappa_mhz = kappa_mhz;
        self
    }

    pub fn validate(&self) -> Result<()> {
        require_positive("omega_f_ghz", self.omega_f_ghz)?;
        require_positive("omega_r_ghz", self.omega_r_ghz)?;
        require_finite("chi_fr_mhz", self.chi_fr_mhz)?;
        require_finite("g_mhz", self.g_mhz)?;
        require_finite("delta_mhz", self.delta_mhz)?;
        require_non_negative("kappa_mhz", self.kappa_mhz)?;
        if let Some(s) = self.stark {
            require_finite("stark.chi_fs_mhz", s.chi_fs_mhz)?;
            require_finite("stark.chi_sr_mhz", s.chi_sr_mhz)?;
            require_positive("stark.g_per_xi_mhz", s.g_per_xi_mhz)?;
        }
        Ok(())
    }
}

/// Qubit depolarization split into up and down rates (1/µs).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalModel {
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub temperature_mk: f64,
    pub omega_f_ghz: f64,
}

/// Qubit temperature of the device, mK.
pub const DEVICE_TEMPERATURE_MK: f64 = 20.0;
/// Ground-state saturation under continuous pumping that fixes the unstated T1.
pub const CALIBRATION_THRESHOLD: f64 = 0.993;

impl ThermalModel {
    pub fn gamma_total(&self) -> f64 {
        self.gamma_up + self.gamma_down
    }

    /// Equilibrium excited population Γ_up/Γ.
    pub fn excited_fraction(&self) -> f64 {
        let g = self.gamma_total();
        if g == 0.0 {
            0.0
        } else {
            self.gamma_up / g
        }
    }

    pub fn ground_fraction(&self) -> f64 {
        1.0 - self.excited_fraction()
    }

    /// No qubit relaxation at all.
    pub fn none(omega_f_ghz: f64) -> Self {
        Self {
            gamma_up: 0.0,
            gamma_down: 0.0,
            temperature_mk: 0.0,
            omega_f_ghz,
        }
    }

    /// 20 mK, 81 MHz, with Γ fixed by the 99.3% continuous-pump saturation at κ/2π = 0.4 MHz.
    pub fn calibrated() -> Self {
        let omega_f = 0.081;
        let gamma_eff = crate::units::angular(super::effective_decay_rate(1.27, 0.4));
        let gamma = calibrate_gamma_total(CALIBRATION_THRESHOLD, gamma_eff, DEVICE_TEMPERATURE_MK, omega_f)
            .expect("calibration constants are consistent");
        thermal_rates(gamma, DEVICE_TEMPERATURE_MK, omega_f).expect("calibration constants are valid")
    }
}

/// Detailed-balance split of Γ: Γ_up/Γ_down = exp(−hf/k_B T).
pub fn thermal_rates(gamma_total: f64, temperature_mk: f64, omega_f_ghz: f64) -> Result<ThermalModel> {
    require_non_negative("gamma_total", gamma_total)?;
    if !(temperature_mk >= 0.0) {
        return Err(Error::param("temperature_mk", format!("must be >= 0, got {temperature_mk}")));
    }
    require_positive("omega_f_ghz", omega_f_ghz)?;
    let p_up = if temperature_mk == 0.0 {
        0.0
    } else if temperature_mk.is_infinite() {
        0.5
    } else {
        let b = boltzmann_factor(omega_f_ghz, temperature_mk);
        b / (1.0 + b)
    };
    Ok(ThermalModel {
        gamma_up: gamma_total * p_up,
        gamma_down: gamma_total * (1.0 - p_up),
        temperature_mk,
        omega_f_ghz,
    })
}

/// Γ that makes the continuous-pump ground population (Γ_down + Γ_eff)/(Γ + Γ_eff)
/// equal `threshold` at the given temperature.
pub fn calibrate_gamma_total(threshold: f64, gamma_eff: f64, temperature_mk: f64, omega_f_ghz: f64) -> Result<f64> {
    require_positive("gamma_eff", gamma_eff)?;
    let p_up = thermal_rates(1.0, temperature_mk, omega_f_ghz)?.gamma_up;
    let loss = 1.0 - threshold;
    if !(loss > 0.0 && loss < p_up) {
        return Err(Error::param(
            "threshold",
            format!("must lie in ({}, 1) for this temperature, got {threshold}", 1.0 - p_up),
        ));
    }
    Ok(loss * gamma_eff / (p_up - loss))
}

/// 4×4 density matrix over [`BASIS`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityMatrix {
    pub entries: [[C64; 4]; 4],
    /// µs.
    pub time: f64,
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl DensityMatrix {
    pub fn zeros() -> Self {
        Self {
            entries: [[ZERO; 4]; 4],
            time: 0.0,
        }
    }

    /// Diagonal state with the given populations.
    pub fn from_populations(p: [f64; 4]) -> Result<Self> {
        for (k, &x) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::param("populations", format!("{} population {x} outside [0, 1]", BASIS[k])));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::param("populations", format!("sum to {sum}, not 1")));
        }
        let mut rho = Self::zeros();
        for k in 0..4 {
            rho.entries[k][k] = C64::new(p[k], 0.0);
        }
        Ok(rho)
    }

    pub fn pure(index: usize) -> Self {
        let mut rho = Self::zeros();
        rho.entries[index][index] = C64::new(1.0, 0.0);
        rho
    }

    /// Qubit in thermal equilibrium, resonator empty.
    pub fn thermal(thermal: &ThermalModel) -> Self {
        let pe = thermal.excited_fraction();
        let mut rho = Self::zeros();
        rho.entries[G0][G0] = C64::new(1.0 - pe, 0.0);
        rho.entries[E0][E0] = C64::new(pe, 0.0);
        rho
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|k| self.entries[k][k]).sum()
    }

    pub fn populations(&self) -> [f64; 4] {
        std::array::from_fn(|k| self.entries[k][k].re)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                worst = worst.max((self.entries[i][j] - self.entries[j][i].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let mut m = OperatorMatrix::from_fn(4, "g0,e0,g1,e1", |i, j| self.entries[i][j]);
        // symmetrize round-off before handing to the Hermitian solver
        let adj = m.adjoint();
        m = (&m + &adj).scale_real(0.5);
        Ok(eigvals_hermitian(&m)?[0])
    }

    /// Checks trace, Hermiticity and positivity.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-6 {
            return Err(Error::param("rho", format!("trace {tr} differs from 1")));
        }
        let herm = self.hermiticity_error();
        if herm > 1e-9 {
            return Err(Error::param("rho", format!("not Hermitian (deviation {herm:e})")));
        }
        let min = self.min_eigenvalue()?;
        if min < -1e-8 {
            return Err(Error::param("rho", format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detailed_balance_ratio() {
        let t = thermal_rates(0.02, 20.0, 0.081).unwrap();
        let expect = boltzmann_factor(0.081, 20.0);
        assert!((t.gamma_up / t.gamma_down - expect).abs() < 1e-9 * expect);
        assert!((t.gamma_total() - 0.02).abs() < 1e-15);
    }

    #[test]
    fn temperature_limits() {
        let cold = thermal_rates(1.0, 0.0, 0.081).unwrap();
        assert_eq!((cold.gamma_up, cold.gamma_down), (0.0, 1.0));
        let hot = thermal_rates(1.0, 1e12, 0.081).unwrap();
        assert!((hot.gamma_up - 0.5).abs() < 1e-9);
        let inf = thermal_rates(1.0, f64::INFINITY, 0.081).unwrap();
        assert_eq!(inf.gamma_up, 0.5);
    }

    #[test]
    fn ground_population_at_device_temperature() {
        let t = thermal_rates(1.0, 20.0, 0.081).unwrap();
        assert!((t.ground_fraction() - 0.55).abs() <= 0.01, "P_g = {}", t.ground_fraction());
    }

    #[test]
    fn calibrated_preset() {
        let t = ThermalModel::calibrated();
        // T1 about 50 us
        assert!((1.0 / t.gamma_total() - 50.54).abs() < 0.1, "T1 = {}", 1.0 / t.gamma_total());
        let gamma_eff = crate::units::angular(0.2);
        let th = (t.gamma_down + gamma_eff) / (t.gamma_total() + gamma_eff);
        assert!((th - 0.993).abs() < 1e-12);
    }

    #[test]
    fn density_matrix_checks() {
        let rho = DensityMatrix::thermal(&ThermalModel::calibrated());
        rho.validate().unwrap();
        assert!(DensityMatrix::from_populations([0.5, 0.5, 0.1, 0.0]).is_err());
        let mut bad = DensityMatrix::pure(G0);
        bad.entries[0][1] = C64::new(0.7, 0.0);
        bad.entries[1][0] = C64::new(0.7, 0.0);
        assert!(bad.validate().is_err());
    }
}
