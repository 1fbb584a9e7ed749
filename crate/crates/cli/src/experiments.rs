//! One runner per experiment kind. Each returns its artifacts without touching the disk.

use std::f64::consts::{FRAC_PI_2, TAU};

use fluxlink::circuit::{build_system, dress_spectrum, flux_sweep, fluxonium_transition, BareLabel, SystemOptions};
use fluxlink::dynamics::{
    effective_decay_rate, rabi_chevron, reset_simulation, reset_threshold, step_bound, ChevronOptions, ResetMode,
    SimulationTrace, BASIS,
};
use fluxlink::emission::{
    analytic_shaping_pulse, default_sech_grid, evacuation_residual, heisenberg_evolve, numerical_shaping_pulse,
    quadrature_trace, sech_target,
};
use fluxlink::exec::Execution;
use fluxlink::pulse::{compare_pulses, Drive, PulseEnvelope, SquarePulse};
use fluxlink::units::angular;
use num_complex::Complex64 as C64;

use crate::config::{
    ChevronRun, Experiment, ReleaseRun, ResetRun, Resolved, ShapeMethod, ShapeRun, SpectrumRun, ThresholdRun,
};
use crate::error::{CliError, CoreContext};
use crate::output::{num, Artifacts, Table};

const TOOL: &str = concat!("fluxlink ", env!("CARGO_PKG_VERSION"));

pub fn run(r: &Resolved) -> Result<Artifacts, CliError> {
    match &r.experiment {
        Experiment::Spectrum(s) => spectrum(r, s),
        Experiment::Chevron(c) => chevron(r, c),
        Experiment::Reset(x) => reset(r, x),
        Experiment::Threshold(t) => threshold(r, t),
        Experiment::Release(x) => release(r, x),
        Experiment::Shape(s) => shape(r, s),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![b];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// A tenth of the stability bound, and never coarser than 1 ns.
fn default_dt(bound: f64) -> f64 {
    (bound / 10.0).min(1e-3)
}

fn spectrum(r: &Resolved, s: &SpectrumRun) -> Result<Artifacts, CliError> {
    let mut art = Artifacts::default();
    let f01 = fluxonium_transition(&r.device, s.dims.fluxonium.max(fluxlink::circuit::MIN_FLUXONIUM_DIM), 0, 1)
        .ctx("fluxonium spectrum")?;
    art.result("fluxonium_f01_mhz", f01 * 1e3);

    let options = SystemOptions {
        dims: s.dims,
        c3_source: s.c3_source,
        ..SystemOptions::default()
    };
    let system = build_system(&r.device, &options).ctx("system Hamiltonian")?;
    art.result("c3_mhz", system.c3_mhz);
    let spec = dress_spectrum(&system, s.levels).ctx("dressed spectrum")?;
    let mut levels = Table::new(&["index", "label", "energy_ghz", "overlap"]);
    for st in &spec.states {
        levels.push(vec![st.index.to_string(), st.label.to_string(), num(st.energy_ghz), num(st.overlap)]);
    }
    art.tables.push(("levels", levels));
    if let Ok(f) = spec.transition_frequency(BareLabel::G0, BareLabel::E0) {
        art.result("qubit_mhz", f * 1e3);
    }
    if let Ok(f) = spec.transition_frequency(BareLabel::E0, BareLabel::G1) {
        art.result("pump_e0_g1_ghz", f);
    }

    if let Some(sw) = &s.sweep {
        let fluxes = linspace(sw.start_flux, sw.stop_flux, sw.points);
        let phis: Vec<f64> = fluxes.iter().map(|f| TAU * f).collect();
        let curve = flux_sweep(&r.device, &phis, (0, 1), sw.fluxonium_dim, Execution::Parallel).ctx("flux sweep")?;
        let mut table = Table::new(&["flux_quanta", "phi_ext_f_rad", "phi_ext_s_rad", "f01_ghz"]);
        for (f, p) in fluxes.iter().zip(&curve) {
            table.push_nums(&[*f, p.phi_ext_f, p.phi_ext_s, p.frequency_ghz]);
        }
        art.tables.push(("flux_sweep", table));
        let (k_min, lowest) = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.frequency_ghz.total_cmp(&b.1.frequency_ghz))
            .expect("sweep has points");
        art.result("sweep_min_flux_quanta", fluxes[k_min]);
        art.result("sweep_min_f01_mhz", lowest.frequency_ghz * 1e3);
    }
    Ok(art)
}

fn chevron(r: &Resolved, c: &ChevronRun) -> Result<Artifacts, CliError> {
    let template = r.effective_model(c.g_mhz, c.kappa_mhz);
    let detunings = linspace(c.detuning_min_mhz, c.detuning_max_mhz, c.detuning_points);
    let durations = linspace(0.0, c.duration_max_us, c.duration_points);
    let options = ChevronOptions {
        buffer_us: c.buffer_us,
        dt: c.dt_us,
        exec: Execution::Parallel,
    };
    let map = rabi_chevron(&template, &r.thermal, &detunings, &durations, c.g_mhz, &options).ctx("chevron")?;

    let mut art = Artifacts::default();
    let mut table = Table::new(&["detuning_mhz", "duration_us", "p_e0"]);
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (i, d) in map.detunings_mhz.iter().enumerate() {
        for (j, t) in map.durations_us.iter().enumerate() {
            let p = map.p_e0[i][j];
            table.push_nums(&[*d, *t, p]);
            if p < best.0 {
                best = (p, *d, *t);
            }
        }
    }
    art.tables.push(("chevron", table));
    art.result("min_p_e0", best.0);
    art.result("min_p_e0_detuning_mhz", best.1);
    art.result("min_p_e0_duration_us", best.2);
    Ok(art)
}

fn population_table(trace: &SimulationTrace) -> Table {
    let mut table = Table::new(&["time_us", "p_g0", "p_e0", "p_g1", "p_e1"]);
    for (t, p) in trace.times.iter().zip(&trace.populations) {
        table.push_nums(&[*t, p[0], p[1], p[2], p[3]]);
    }
    table
}

fn final_populations(art: &mut Artifacts, trace: &SimulationTrace) {
    let p = trace.final_populations();
    for (name, v) in BASIS.iter().zip(p) {
        art.result(&format!("final_p_{name}"), v);
    }
}

fn reset(r: &Resolved, x: &ResetRun) -> Result<Artifacts, CliError> {
    let model = r.effective_model(x.g_mhz, x.kappa_mhz).with_delta(x.delta_mhz);
    let dt = x.dt_us.unwrap_or_else(|| default_dt(step_bound(&model, x.g_mhz)));
    let mode = ResetMode::Pulsed {
        t_pulse_us: x.pulse_us,
        t_buffer_us: x.buffer_us,
    };
    let out = reset_simulation(&model, &r.thermal, mode, dt).ctx("reset")?;
    let mut art = Artifacts::default();
    art.tables.push(("populations", population_table(&out.trace)));
    art.result("dt_us", dt);
    art.result("initial_p_g0", r.thermal.ground_fraction());
    final_populations(&mut art, &out.trace);
    Ok(art)
}

fn threshold(r: &Resolved, t: &ThresholdRun) -> Result<Artifacts, CliError> {
    let model = r.effective_model(t.g_mhz, t.kappa_mhz);
    let gamma_eff = angular(effective_decay_rate(t.g_mhz.abs(), model.kappa_mhz));
    let closed_form = reset_threshold(&r.thermal, gamma_eff).ctx("threshold")?;
    let dt = t.dt_us.unwrap_or_else(|| default_dt(step_bound(&model, t.g_mhz)));
    let out = reset_simulation(&model, &r.thermal, ResetMode::Continuous { t_pump_us: t.pump_us }, dt).ctx("threshold")?;
    let mut art = Artifacts::default();
    art.tables.push(("populations", population_table(&out.trace)));
    art.result("reset_threshold", closed_form);
    art.result("simulated_p_g0", out.final_g0);
    art.result("gamma_eff_per_us", gamma_eff);
    art.result("t1_us", 1.0 / r.thermal.gamma_total());
    art.result("dt_us", dt);
    final_populations(&mut art, &out.trace);
    Ok(art)
}

fn read_pulse(r: &Resolved, file: &std::path::Path) -> Result<PulseEnvelope, CliError> {
    let path = r.base_dir.join(file);
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Read { path: path.clone(), source })?;
    PulseEnvelope::parse_text(&text).map_err(|e| CliError::invalid("experiment.pulse_file", format!("{}: {e}", path.display())))
}

fn release(r: &Resolved, x: &ReleaseRun) -> Result<Artifacts, CliError> {
    let kappa = r.kappa(x.kappa_mhz);
    let f0 = C64::new(x.f0_re, x.f0_im);
    let envelope;
    let square;
    let drive: &dyn Drive = match &x.pulse_file {
        Some(file) => {
            envelope = read_pulse(r, file)?;
            &envelope
        }
        None => {
            square = SquarePulse::new(x.g_mhz, x.t_start_us, f64::INFINITY);
            &square
        }
    };
    let fastest = drive.max_abs().max(kappa);
    let dt = x.dt_us.unwrap_or(if fastest > 0.0 { 1.0 / (200.0 * fastest) } else { 1e-3 });
    let trace = heisenberg_evolve(drive, kappa, f0, (x.t_start_us, x.t_end_us), dt).ctx("release")?;
    let quad = quadrature_trace(&trace, x.lo_phase);

    let mut table = Table::new(&["time_us", "f_re", "f_im", "r_re", "r_im", "r_out_re", "r_out_im", "i_quadrature"]);
    for k in 0..trace.times.len() {
        let (f, rr, o) = (trace.f_amp[k], trace.r_amp[k], trace.r_out[k]);
        table.push_nums(&[trace.times[k], f.re, f.im, rr.re, rr.im, o.re, o.im, quad[k]]);
    }
    let mut art = Artifacts::default();
    art.tables.push(("field", table));
    let last = trace.times.len() - 1;
    art.result("initial_energy", f0.norm_sqr());
    art.result("emitted_energy", trace.emitted_energy());
    art.result("final_source_energy", trace.f_amp[last].norm_sqr());
    art.result("final_resonator_energy", trace.r_amp[last].norm_sqr());
    art.result("dt_us", dt);
    Ok(art)
}

fn shape(r: &Resolved, s: &ShapeRun) -> Result<Artifacts, CliError> {
    let kappa = r.kappa(s.kappa_mhz);
    let grid = default_sech_grid(s.gamma_ph_mhz).ctx("shape")?;
    let target = sech_target(s.gamma_ph_mhz, s.phase, grid).ctx("shape")?;
    // Real g emits with phase arg(f0) − π/2.
    let f0 = C64::from_polar(0.5, s.phase + FRAC_PI_2);
    let analytic = analytic_shaping_pulse(kappa, s.gamma_ph_mhz, grid).ctx("analytic pulse")?;
    let numerical = numerical_shaping_pulse(&target, kappa, f0, s.sum_rule).ctx("numerical pulse")?;
    let pulse = match s.method {
        ShapeMethod::Analytic => &analytic,
        ShapeMethod::Numerical => &numerical,
    };

    // forward run on a refinement of the target grid, read back at the target samples
    let bound = 1.0 / (50.0 * pulse.peak().max(kappa));
    let sub = (target.dt / bound).ceil().max(1.0) as usize;
    let trace = heisenberg_evolve(pulse, kappa, f0, (target.t0, target.t_end()), target.dt / sub as f64).ctx("forward run")?;
    let out: Vec<C64> = (0..target.len()).map(|k| trace.r_out[k * sub]).collect();
    let peak = target.peak();
    let (mut err, mut norm) = (0.0, 0.0);
    for (z, o) in target.samples.iter().zip(&out) {
        if z.norm() > 0.01 * peak {
            err += (o - z).norm_sqr();
            norm += z.norm_sqr();
        }
    }

    let mut art = Artifacts::default();
    art.result("roundtrip_residual", (err / norm).sqrt());
    art.result(
        "evacuation_residual",
        evacuation_residual(pulse, &target, kappa, f0).ctx("evacuation")?,
    );
    art.result(
        "analytic_vs_numerical_rms",
        compare_pulses(&analytic, &numerical, false).ctx("pulse comparison")?,
    );
    art.result("peak_g_mhz", pulse.peak());
    art.result("samples", target.len() as u64);
    art.result("dt_us", target.dt);

    let mut table = Table::new(&["time_us", "g_re_mhz", "g_im_mhz", "target_re", "target_im", "r_out_re", "r_out_im"]);
    for (k, t) in target.times().into_iter().enumerate() {
        let (g, z, o) = (pulse.samples[k], target.samples[k], out[k]);
        table.push_nums(&[t, g.re, g.im, z.re, z.im, o.re, o.im]);
    }
    art.tables.push(("shape", table));
    let method = match s.method {
        ShapeMethod::Analytic => "analytic",
        ShapeMethod::Numerical => "numerical",
    };
    art.files.push((
        "pulse.txt",
        pulse.to_text(&format!("{TOOL}: {method} coupling g/2pi in MHz, gamma_ph {} MHz, kappa {kappa} MHz", s.gamma_ph_mhz)),
    ));
    art.files.push((
        "target.txt",
        target.to_text(&format!("{TOOL}: sech output field r_out in us^-1/2")),
    ));
    Ok(art)
}
