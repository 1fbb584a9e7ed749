#![allow(dead_code)]

use fluxlink::dynamics::*;
use fluxlink::emission::heisenberg_evolve;
use fluxlink::pulse::{PulseEnvelope, SquarePulse, TimeGrid};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

/// Random parameters for one open-system run.
#[derive(Debug, Clone)]
pub struct LindbladCase {
    pub g: f64,
    pub kappa: f64,
    pub delta: f64,
    pub chi: f64,
    pub gamma: f64,
    pub temp_mk: f64,
    pub pops: [f64; 4],
    pub t_off: f64,
}

pub fn lindblad_case() -> impl Strategy<Value = LindbladCase> {
    (
        0.0..2.0f64,
        0.0..1.0f64,
        -1.5..1.5f64,
        0.0..1.0f64,
        0.0..0.5f64,
        0.0..200.0f64,
        prop::array::uniform4(0.0..1.0f64),
        0.1..2.0f64,
    )
        .prop_map(|(g, kappa, delta, chi, gamma, temp_mk, pops, t_off)| LindbladCase {
            g,
            kappa,
            delta,
            chi,
            gamma,
            temp_mk,
            pops,
            t_off,
        })
}

/// Evolves 2 µs and checks trace, Hermiticity and positivity of the final state.
pub fn check_lindblad_case(c: &LindbladCase) -> Result<(), String> {
    let mut model = EffectiveModel::table1(c.g).with_kappa(c.kappa).with_delta(c.delta);
    model.chi_fr_mhz = c.chi;
    let th = thermal_rates(c.gamma, c.temp_mk, 0.081).map_err(|e| e.to_string())?;
    let s: f64 = c.pops.iter().sum::<f64>() + 1e-3;
    let rho0 = DensityMatrix::from_populations(c.pops.map(|p| (p + 2.5e-4) / s)).map_err(|e| e.to_string())?;
    let dt = step_bound(&model, c.g) / 2.0;
    let tr = lindblad_evolve(&model, &th, &rho0, &SquarePulse::new(c.g, 0.0, c.t_off), (0.0, 2.0), dt)
        .map_err(|e| e.to_string())?;
    let rho = &tr.final_state;
    let trace_err = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let herm = rho.hermiticity_error();
    let min_eig = rho.min_eigenvalue().map_err(|e| e.to_string())?;
    if trace_err < 1e-9 && herm < 1e-12 && min_eig > -1e-8 {
        Ok(())
    } else {
        Err(format!("trace error {trace_err:e}, hermiticity {herm:e}, min eigenvalue {min_eig:e}"))
    }
}

/// Gaussian bumps (amplitude, phase, center, width) summed into one coupling envelope.
pub type Bumps = Vec<(f64, f64, f64, f64)>;

pub fn envelope(grid: TimeGrid, bumps: &[(f64, f64, f64, f64)]) -> PulseEnvelope {
    PulseEnvelope::from_fn(grid, |t| {
        bumps
            .iter()
            .map(|&(amp, phase, center, width)| C64::from_polar(amp * (-((t - center) / width).powi(2)).exp(), phase))
            .sum()
    })
    .unwrap()
}

pub fn energy_case() -> impl Strategy<Value = (Bumps, f64, C64)> {
    (
        prop::collection::vec((0.0..1.5f64, -3.2..3.2f64, 0.5..7.5f64, 0.3..3.0f64), 1..4),
        0.05..1.0f64,
        (-1.0..1.0f64, -1.0..1.0f64).prop_filter("source must hold something", |(a, b)| a.hypot(*b) > 0.05),
    )
        .prop_map(|(bumps, kappa, (a, b))| (bumps, kappa, C64::new(a, b)))
}

/// Largest violation of |f|² + |r|² + emitted = |f0|² along an 8 µs release.
pub fn energy_bookkeeping_error(bumps: &[(f64, f64, f64, f64)], kappa: f64, f0: C64) -> f64 {
    let drive = envelope(TimeGrid::spanning(0.0, 8.0, 801).unwrap(), bumps);
    let dt = 1.0 / (200.0 * drive.peak().max(kappa));
    let tr = heisenberg_evolve(&drive, kappa, f0, (0.0, 8.0), dt).unwrap();
    let cum = tr.cumulative_emission();
    (0..tr.times.len())
        .map(|k| (tr.f_amp[k].norm_sqr() + tr.r_amp[k].norm_sqr() + cum[k] - f0.norm_sqr()).abs() / f0.norm_sqr().max(1.0))
        .fold(0.0, f64::max)
}

/// Largest population change when the step is halved, for a detuned strong-coupling pulse.
pub fn dt_halving_deviation() -> f64 {
    let model = EffectiveModel::table1(1.27).with_delta(0.3);
    let th = ThermalModel::calibrated();
    let pulse = SquarePulse::new(1.27, 0.0, 0.7);
    let run = |dt: f64| {
        lindblad_evolve(&model, &th, &DensityMatrix::pure(E0), &pulse, (0.0, 1.5), dt)
            .unwrap()
            .final_populations()
    };
    let (coarse, fine) = (run(0.004), run(0.002));
    (0..4).map(|i| (coarse[i] - fine[i]).abs()).fold(0.0, f64::max)
}

/// |P_e − Γ_up/Γ| after 15/Γ of idling from the ground state.
pub fn detailed_balance_deviation() -> f64 {
    let th = ThermalModel::calibrated();
    let model = EffectiveModel::table1(0.0);
    let t_end = 15.0 / th.gamma_total();
    let tr = lindblad_evolve(&model, &th, &DensityMatrix::pure(G0), &SquarePulse::constant(0.0), (0.0, t_end), 0.05)
        .unwrap();
    (tr.final_populations()[E0] - th.excited_fraction()).abs()
}
