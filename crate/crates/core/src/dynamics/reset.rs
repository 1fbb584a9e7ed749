use serde::{Deserialize, Serialize};

use super::lindblad::{lindblad_evolve, SimulationTrace};
use super::model::{DensityMatrix, EffectiveModel, ThermalModel, G0};
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::pulse::SquarePulse;

/// Decay rate of the e0 population under conversion at rate g into a
/// resonator of linewidth κ, all in MHz.
///
/// Weak coupling gives 4g²/κ, strong coupling the κ/2 ceiling; the switch is
/// where the two expressions meet, g = κ/(2√2).
pub fn effective_decay_rate(g_mhz: f64, kappa_mhz: f64) -> f64 {
    let weak = 4.0 * g_mhz * g_mhz / kappa_mhz;
    weak.min(kappa_mhz / 2.0)
}

/// P_e(t) = Γ_up/Γ + (P_e0 − Γ_up/Γ) e^{−Γt}.
pub fn heating_trace(p_e0: f64, thermal: &ThermalModel, t: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_e0) {
        return Err(Error::param("p_e0", format!("probability {p_e0} outside [0, 1]")));
    }
    require_non_negative("t", t)?;
    let p_inf = thermal.excited_fraction();
    Ok(p_inf + (p_e0 - p_inf) * (-thermal.gamma_total() * t).exp())
}

/// Time average of [`heating_trace`] over [t_buffer, t_buffer + t_readout].
pub fn readout_averaged_population(p_e0: f64, thermal: &ThermalModel, t_buffer: f64, t_readout: f64) -> Result<f64> {
    require_non_negative("t_buffer", t_buffer)?;
    require_non_negative("t_readout", t_readout)?;
    let x = thermal.gamma_total() * t_readout;
    if t_readout == 0.0 || x == 0.0 {
        return heating_trace(p_e0, thermal, t_buffer);
    }
    let p_inf = thermal.excited_fraction();
    let start = heating_trace(p_e0, thermal, t_buffer)?;
    // (1 − e^{−x})/x, written to stay accurate for small x
    let avg_factor = -(-x).exp_m1() / x;
    Ok(p_inf + (start - p_inf) * avg_factor)
}

/// Ground population reached under continuous pumping, (Γ_down + Γ_eff)/(Γ + Γ_eff),
/// the steady state of Ṗ_e = Γ_up P_g − (Γ_down + Γ_eff) P_e. `gamma_eff` in 1/µs.
pub fn reset_threshold(thermal: &ThermalModel, gamma_eff: f64) -> Result<f64> {
    require_non_negative("gamma_eff", gamma_eff)?;
    let den = thermal.gamma_total() + gamma_eff;
    if !(den > 0.0) {
        return Err(Error::param("gamma_eff", "total rate must be positive"));
    }
    Ok((thermal.gamma_down + gamma_eff) / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ResetMode {
    /// Square pump of `t_pulse_us`, then free evolution for `t_buffer_us`.
    Pulsed { t_pulse_us: f64, t_buffer_us: f64 },
    /// Pump held on for `t_pump_us`.
    Continuous { t_pump_us: f64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ResetOutcome {
    /// Ground population at the end of the run.
    pub final_g0: f64,
    pub trace: SimulationTrace,
}

/// Reset from thermal equilibrium with the model's `g_mhz`.
pub fn reset_simulation(model: &EffectiveModel, thermal: &ThermalModel, mode: ResetMode, dt: f64) -> Result<ResetOutcome> {
    let (pulse, t_end) = match mode {
        ResetMode::Pulsed { t_pulse_us, t_buffer_us } => {
            require_non_negative("t_pulse_us", t_pulse_us)?;
            require_non_negative("t_buffer_us", t_buffer_us)?;
            (SquarePulse::new(model.g_mhz, 0.0, t_pulse_us), t_pulse_us + t_buffer_us)
        }
        ResetMode::Continuous { t_pump_us } => {
            require_positive("t_pump_us", t_pump_us)?;
            (SquarePulse::new(model.g_mhz, 0.0, f64::INFINITY), t_pump_us)
        }
    };
    let rho0 = DensityMatrix::thermal(thermal);
    let trace = lindblad_evolve(model, thermal, &rho0, &pulse, (0.0, t_end), dt)?;
    Ok(ResetOutcome {
        final_g0: trace.final_populations()[G0],
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::angular;

    #[test]
    fn decay_rate_regimes() {
        assert_eq!(effective_decay_rate(0.0, 0.4), 0.0);
        assert!((effective_decay_rate(1.27, 0.4) - 0.2).abs() < 1e-12);
        assert!((effective_decay_rate(0.14, 0.4) - 0.196).abs() < 1e-12);
        let g = 0.4 / (2.0 * 2f64.sqrt());
        assert!((effective_decay_rate(g, 0.4) - 0.2).abs() < 1e-12);
    }

    #[test]
    fn heating_limits() {
        let th = ThermalModel::calibrated();
        assert!((heating_trace(0.02, &th, 0.0).unwrap() - 0.02).abs() < 1e-15);
        assert!((heating_trace(0.02, &th, 1e5).unwrap() - th.excited_fraction()).abs() < 1e-12);
        assert!(heating_trace(1.5, &th, 1.0).is_err());
    }

    #[test]
    fn readout_average_matches_quadrature() {
        let th = ThermalModel::calibrated();
        let (p0, tb, tr) = (0.01, 5.0, 10.0);
        let n = 20_000;
        let h = tr / n as f64;
        // composite Simpson
        let mut s = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * heating_trace(p0, &th, tb + k as f64 * h).unwrap();
        }
        let quad = s * h / 3.0 / tr;
        let closed = readout_averaged_population(p0, &th, tb, tr).unwrap();
        assert!((quad - closed).abs() < 1e-9);
        assert_eq!(
            readout_averaged_population(p0, &th, tb, 0.0).unwrap(),
            heating_trace(p0, &th, tb).unwrap()
        );
        let frozen = ThermalModel::none(0.081);
        assert_eq!(readout_averaged_population(p0, &frozen, tb, tr).unwrap(), p0);
    }

    #[test]
    fn threshold_examples() {
        let mut cold = ThermalModel::calibrated();
        cold.gamma_up = 0.0;
        assert_eq!(reset_threshold(&cold, 1.0).unwrap(), 1.0);
        let th = ThermalModel::calibrated();
        let strong = reset_threshold(&th, angular(effective_decay_rate(1.27, 0.4))).unwrap();
        assert!((strong - 0.993).abs() < 1e-9);
        let fast = reset_threshold(&th, angular(effective_decay_rate(1.27, 4.0))).unwrap();
        assert!(fast > 0.998 && fast < 0.9995, "{fast}");
        // no drive leaves the thermal ground population
        assert!((reset_threshold(&th, 0.0).unwrap() - th.ground_fraction()).abs() < 1e-15);
    }

    #[test]
    fn no_pump_keeps_equilibrium() {
        let th = ThermalModel::calibrated();
        let m = EffectiveModel::table1(0.0);
        let out = reset_simulation(&m, &th, ResetMode::Continuous { t_pump_us: 5.0 }, 0.02).unwrap();
        assert!((out.final_g0 - th.ground_fraction()).abs() < 1e-12);
    }

    #[test]
    fn fast_resonator_resets_within_500_ns() {
        let th = ThermalModel::calibrated();
        let m = EffectiveModel::table1(1.27).with_kappa(4.0);
        let out = reset_simulation(&m, &th, ResetMode::Continuous { t_pump_us: 0.5 }, 0.002).unwrap();
        assert!(out.final_g0 >= 0.997, "{}", out.final_g0);
    }
}
