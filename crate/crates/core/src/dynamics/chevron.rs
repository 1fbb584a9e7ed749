use serde::Serialize;

use super::lindblad::{lindblad_evolve, step_bound};
use super::model::{DensityMatrix, EffectiveModel, ThermalModel, E0};
use crate::error::{Error, Result};
use crate::exec::{try_map_ordered, Execution};
use crate::pulse::SquarePulse;

/// e0 population after a square conversion pulse, over detuning × duration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChevronMap {
    pub detunings_mhz: Vec<f64>,
    pub durations_us: Vec<f64>,
    /// `p_e0[i][j]` for detuning i and duration j.
    pub p_e0: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChevronOptions {
    /// Free evolution after the pulse before the population is read, µs.
    pub buffer_us: f64,
    /// Step size; `None` picks a tenth of the stability bound.
    pub dt: Option<f64>,
    pub exec: Execution,
}

impl Default for ChevronOptions {
    fn default() -> Self {
        Self {
            buffer_us: 0.0,
            dt: None,
            exec: Execution::Parallel,
        }
    }
}

/// Runs one trajectory per grid point, starting from e0, with the template's
/// detuning replaced and coupling `g_mhz`.
pub fn rabi_chevron(
    template: &EffectiveModel,
    thermal: &ThermalModel,
    detunings_mhz: &[f64],
    durations_us: &[f64],
    g_mhz: f64,
    options: &ChevronOptions,
) -> Result<ChevronMap> {
    if detunings_mhz.is_empty() || durations_us.is_empty() {
        return Err(Error::param("grid", "detuning and duration lists must be non-empty"));
    }
    let max_delta = detunings_mhz.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let dt = options.dt.unwrap_or_else(|| {
        let mut m = *template;
        m.delta_mhz = max_delta;
        (step_bound(&m, g_mhz) / 10.0).min(0.01)
    });
    let points: Vec<(f64, f64)> = detunings_mhz
        .iter()
        .flat_map(|&d| durations_us.iter().map(move |&t| (d, t)))
        .collect();
    let rho0 = DensityMatrix::pure(E0);
    let values = try_map_ordered(options.exec, &points, |_, &(delta, duration)| {
        let mut model = *template;
        model.delta_mhz = delta;
        model.g_mhz = g_mhz;
        let pulse = SquarePulse::new(g_mhz, 0.0, duration);
        lindblad_evolve(&model, thermal, &rho0, &pulse, (0.0, duration + options.buffer_us), dt)
            .map(|tr| tr.final_populations()[E0])
            .map_err(|e| Error::AtGridPoint {
                detuning_mhz: delta,
                duration_us: duration,
                source: Box::new(e),
            })
    })?;
    let p_e0 = values.chunks(durations_us.len()).map(<[f64]>::to_vec).collect();
    Ok(ChevronMap {
        detunings_mhz: detunings_mhz.to_vec(),
        durations_us: durations_us.to_vec(),
        p_e0,
    })
}
