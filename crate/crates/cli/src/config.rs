//! Run configuration: TOML in, a fully resolved parameter set out.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use fluxlink::circuit::{C3Source, DeviceParams, FluxBias, Preset, Truncation, DEFAULT_FLUXONIUM_DIM};
use fluxlink::dynamics::{calibrate_gamma_total, thermal_rates, EffectiveModel, ThermalModel, CALIBRATION_THRESHOLD};
use fluxlink::emission::SumRule;
use fluxlink::units::angular;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CoreContext};

/// Qubit frequency used by the effective conversion model, GHz.
const MEASURED_QUBIT_GHZ: f64 = 0.081;
/// Coupling of the device's reset pulse, MHz.
const RESET_G_MHZ: f64 = 1.27;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub device: DeviceSection,
    #[serde(default)]
    pub thermal: ThermalSection,
    pub experiment: Experiment,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSection {
    /// Named parameter set; `table1` unless `params` is given.
    pub preset: Option<Preset>,
    /// Full parameter set, instead of a preset.
    pub params: Option<DeviceParams>,
    /// Fluxonium and SNAIL bias in flux quanta, overriding the parameter set.
    pub flux_f: Option<f64>,
    pub flux_s: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalSection {
    pub temperature_mk: f64,
    /// Qubit T1 in µs; by default fixed by the continuous-pump saturation.
    pub t1_us: Option<f64>,
}

impl Default for ThermalSection {
    fn default() -> Self {
        Self {
            temperature_mk: fluxlink::dynamics::DEVICE_TEMPERATURE_MK,
            t1_us: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("fluxlink-out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Experiment {
    Spectrum(SpectrumRun),
    Chevron(ChevronRun),
    Reset(ResetRun),
    Threshold(ThresholdRun),
    Release(ReleaseRun),
    Shape(ShapeRun),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Spectrum(_) => "spectrum",
            Experiment::Chevron(_) => "chevron",
            Experiment::Reset(_) => "reset",
            Experiment::Threshold(_) => "threshold",
            Experiment::Release(_) => "release",
            Experiment::Shape(_) => "shape",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxSweep {
    pub start_flux: f64,
    pub stop_flux: f64,
    pub points: usize,
    #[serde(default = "default_fluxonium_dim")]
    pub fluxonium_dim: usize,
}

fn default_fluxonium_dim() -> usize {
    DEFAULT_FLUXONIUM_DIM
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumRun {
    pub dims: Truncation,
    pub levels: usize,
    pub c3_source: C3Source,
    pub sweep: Option<FluxSweep>,
}

impl Default for SpectrumRun {
    fn default() -> Self {
        Self {
            dims: Truncation::default(),
            levels: 8,
            c3_source: C3Source::default(),
            sweep: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChevronRun {
    pub g_mhz: f64,
    pub kappa_mhz: Option<f64>,
    pub detuning_min_mhz: f64,
    pub detuning_max_mhz: f64,
    pub detuning_points: usize,
    pub duration_max_us: f64,
    pub duration_points: usize,
    pub buffer_us: f64,
    pub dt_us: Option<f64>,
}

impl Default for ChevronRun {
    fn default() -> Self {
        Self {
            g_mhz: RESET_G_MHZ,
            kappa_mhz: None,
            detuning_min_mhz: -4.0,
            detuning_max_mhz: 4.0,
            detuning_points: 41,
            duration_max_us: 1.0,
            duration_points: 51,
            buffer_us: 0.0,
            dt_us: None,
        }
    }
}

/// Square reset pulse followed by a free buffer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResetRun {
    pub g_mhz: f64,
    pub kappa_mhz: Option<f64>,
    pub delta_mhz: f64,
    pub pulse_us: f64,
    pub buffer_us: f64,
    pub dt_us: Option<f64>,
}

impl Default for ResetRun {
    fn default() -> Self {
        Self {
            g_mhz: RESET_G_MHZ,
            kappa_mhz: None,
            delta_mhz: 0.0,
            pulse_us: 0.2,
            buffer_us: 0.0,
            dt_us: None,
        }
    }
}

/// Continuous pumping until the ground population saturates.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdRun {
    pub g_mhz: f64,
    pub kappa_mhz: Option<f64>,
    pub pump_us: f64,
    pub dt_us: Option<f64>,
}

impl Default for ThresholdRun {
    fn default() -> Self {
        Self {
            g_mhz: RESET_G_MHZ,
            kappa_mhz: None,
            pump_us: 20.0,
            dt_us: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReleaseRun {
    /// Constant coupling, used when no pulse file is given.
    pub g_mhz: f64,
    /// Coupling envelope file (`t re,im` per line), relative to the config file.
    pub pulse_file: Option<PathBuf>,
    pub kappa_mhz: Option<f64>,
    pub f0_re: f64,
    pub f0_im: f64,
    pub t_start_us: f64,
    pub t_end_us: f64,
    pub dt_us: Option<f64>,
    /// Local-oscillator phase of the recorded quadrature, rad.
    pub lo_phase: f64,
}

impl Default for ReleaseRun {
    fn default() -> Self {
        Self {
            g_mhz: RESET_G_MHZ,
            pulse_file: None,
            kappa_mhz: None,
            f0_re: 0.5,
            f0_im: 0.0,
            t_start_us: 0.0,
            t_end_us: 10.0,
            dt_us: None,
            lo_phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeMethod {
    Analytic,
    Numerical,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShapeRun {
    pub gamma_ph_mhz: f64,
    pub kappa_mhz: Option<f64>,
    pub phase: f64,
    pub method: ShapeMethod,
    pub sum_rule: SumRule,
}

impl Default for ShapeRun {
    fn default() -> Self {
        Self {
            gamma_ph_mhz: 0.2,
            kappa_mhz: None,
            phase: -FRAC_PI_2,
            method: ShapeMethod::Numerical,
            sum_rule: SumRule::Trapezoid,
        }
    }
}

/// Everything a run depends on, with every default filled in.
#[derive(Debug, Clone, Serialize)]
pub struct Resolved {
    pub preset: Option<&'static str>,
    pub device: DeviceParams,
    pub thermal: ThermalModel,
    pub experiment: Experiment,
    pub formats: Vec<Format>,
    #[serde(skip)]
    pub output_dir: PathBuf,
    /// Directory relative file references are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Resolved {
    /// Conversion model at the device's readout parameters.
    pub fn effective_model(&self, g_mhz: f64, kappa_override: Option<f64>) -> EffectiveModel {
        let r = &self.device.resonator;
        EffectiveModel {
            omega_f_ghz: MEASURED_QUBIT_GHZ,
            omega_r_ghz: r.omega_ghz,
            chi_fr_mhz: r.chi_fr_mhz,
            g_mhz,
            delta_mhz: 0.0,
            kappa_mhz: kappa_override.unwrap_or(r.kappa_mhz),
            stark: None,
        }
    }

    pub fn kappa(&self, kappa_override: Option<f64>) -> f64 {
        kappa_override.unwrap_or(self.device.resonator.kappa_mhz)
    }
}

pub fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Config {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn finite(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be finite, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be finite and > 0, got {v}")))
    }
}

fn non_negative(field: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be finite and >= 0, got {v}")))
    }
}

fn at_least(field: &str, v: usize, min: usize) -> Result<(), CliError> {
    if v >= min {
        Ok(())
    } else {
        Err(CliError::invalid(field, format!("must be at least {min}, got {v}")))
    }
}

fn opt(field: &str, v: Option<f64>, check: fn(&str, f64) -> Result<(), CliError>) -> Result<(), CliError> {
    v.map_or(Ok(()), |v| check(field, v))
}

/// Applies presets and defaults, and checks every value before anything runs.
pub fn resolve(config: Config, config_path: &Path, out_override: Option<PathBuf>) -> Result<Resolved, CliError> {
    let dev = &config.device;
    let (preset, mut device) = match (dev.preset, dev.params) {
        (Some(_), Some(_)) => {
            return Err(CliError::invalid("device", "give either `preset` or `params`, not both"));
        }
        (_, Some(p)) => (None, p),
        (p, None) => {
            let p = p.unwrap_or(Preset::Table1);
            (Some(p.name()), p.params())
        }
    };
    if let Some(f) = dev.flux_f {
        finite("device.flux_f", f)?;
        device.flux.phi_ext_f = FluxBias::from_flux_quanta(f, 0.0).phi_ext_f;
    }
    if let Some(s) = dev.flux_s {
        finite("device.flux_s", s)?;
        device.flux.phi_ext_s = FluxBias::from_flux_quanta(0.0, s).phi_ext_s;
    }
    finite("device.flux.phi_ext_f", device.flux.phi_ext_f)?;
    finite("device.flux.phi_ext_s", device.flux.phi_ext_s)?;
    device.validate().ctx("device")?;

    let th = &config.thermal;
    non_negative("thermal.temperature_mk", th.temperature_mk)?;
    let gamma_total = match th.t1_us {
        Some(t1) => {
            positive("thermal.t1_us", t1)?;
            1.0 / t1
        }
        None => {
            let gamma_eff = angular(fluxlink::dynamics::effective_decay_rate(RESET_G_MHZ, device.resonator.kappa_mhz));
            calibrate_gamma_total(CALIBRATION_THRESHOLD, gamma_eff, th.temperature_mk, MEASURED_QUBIT_GHZ)
                .ctx("thermal calibration")?
        }
    };
    let thermal = thermal_rates(gamma_total, th.temperature_mk, MEASURED_QUBIT_GHZ).ctx("thermal")?;

    let base_dir = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate_experiment(&config.experiment, &base_dir)?;
    if config.output.formats.is_empty() {
        return Err(CliError::invalid("output.formats", "must name at least one of csv, json"));
    }
    let mut formats = config.output.formats.clone();
    formats.sort_by_key(|f| *f as u8);
    formats.dedup();

    // Linewidth defaults to the device's readout resonator.
    let mut experiment = config.experiment;
    let kappa = device.resonator.kappa_mhz;
    match &mut experiment {
        Experiment::Chevron(ChevronRun { kappa_mhz, .. })
        | Experiment::Reset(ResetRun { kappa_mhz, .. })
        | Experiment::Threshold(ThresholdRun { kappa_mhz, .. })
        | Experiment::Release(ReleaseRun { kappa_mhz, .. })
        | Experiment::Shape(ShapeRun { kappa_mhz, .. }) => {
            kappa_mhz.get_or_insert(kappa);
        }
        Experiment::Spectrum(_) => {}
    }

    let resolved = Resolved {
        preset,
        device,
        thermal,
        experiment,
        formats,
        output_dir: out_override.unwrap_or(config.output.dir),
        base_dir,
    };
    let model_check = |g: f64, kappa: Option<f64>| resolved.effective_model(g, kappa).validate().ctx("model");
    match &resolved.experiment {
        Experiment::Chevron(c) => model_check(c.g_mhz, c.kappa_mhz)?,
        Experiment::Reset(r) => model_check(r.g_mhz, r.kappa_mhz)?,
        Experiment::Threshold(t) => model_check(t.g_mhz, t.kappa_mhz)?,
        Experiment::Release(r) => non_negative("experiment.kappa_mhz", resolved.kappa(r.kappa_mhz))?,
        Experiment::Shape(s) => {
            let kappa = resolved.kappa(s.kappa_mhz);
            positive("experiment.kappa_mhz", kappa)?;
            if s.gamma_ph_mhz >= kappa {
                return Err(CliError::invalid(
                    "experiment.gamma_ph_mhz",
                    format!("photon bandwidth {} MHz must be below kappa {kappa} MHz", s.gamma_ph_mhz),
                ));
            }
        }
        Experiment::Spectrum(_) => {}
    }
    Ok(resolved)
}

fn validate_experiment(e: &Experiment, base_dir: &Path) -> Result<(), CliError> {
    match e {
        Experiment::Spectrum(s) => {
            at_least("experiment.levels", s.levels, 1)?;
            for (name, d) in [
                ("experiment.dims.fluxonium", s.dims.fluxonium),
                ("experiment.dims.snail", s.dims.snail),
                ("experiment.dims.resonator", s.dims.resonator),
            ] {
                at_least(name, d, 3)?;
            }
            if let Some(sw) = &s.sweep {
                finite("experiment.sweep.start_flux", sw.start_flux)?;
                finite("experiment.sweep.stop_flux", sw.stop_flux)?;
                at_least("experiment.sweep.points", sw.points, 2)?;
                at_least("experiment.sweep.fluxonium_dim", sw.fluxonium_dim, fluxlink::circuit::MIN_FLUXONIUM_DIM)?;
            }
        }
        Experiment::Chevron(c) => {
            finite("experiment.g_mhz", c.g_mhz)?;
            opt("experiment.kappa_mhz", c.kappa_mhz, non_negative)?;
            finite("experiment.detuning_min_mhz", c.detuning_min_mhz)?;
            finite("experiment.detuning_max_mhz", c.detuning_max_mhz)?;
            if c.detuning_max_mhz < c.detuning_min_mhz {
                return Err(CliError::invalid("experiment.detuning_max_mhz", "must not be below detuning_min_mhz"));
            }
            at_least("experiment.detuning_points", c.detuning_points, 1)?;
            positive("experiment.duration_max_us", c.duration_max_us)?;
            at_least("experiment.duration_points", c.duration_points, 1)?;
            non_negative("experiment.buffer_us", c.buffer_us)?;
            opt("experiment.dt_us", c.dt_us, positive)?;
        }
        Experiment::Reset(r) => {
            finite("experiment.g_mhz", r.g_mhz)?;
            opt("experiment.kappa_mhz", r.kappa_mhz, non_negative)?;
            finite("experiment.delta_mhz", r.delta_mhz)?;
            non_negative("experiment.pulse_us", r.pulse_us)?;
            non_negative("experiment.buffer_us", r.buffer_us)?;
            if r.pulse_us + r.buffer_us == 0.0 {
                return Err(CliError::invalid("experiment.pulse_us", "pulse and buffer are both empty"));
            }
            opt("experiment.dt_us", r.dt_us, positive)?;
        }
        Experiment::Threshold(t) => {
            finite("experiment.g_mhz", t.g_mhz)?;
            opt("experiment.kappa_mhz", t.kappa_mhz, non_negative)?;
            positive("experiment.pump_us", t.pump_us)?;
            opt("experiment.dt_us", t.dt_us, positive)?;
        }
        Experiment::Release(r) => {
            finite("experiment.g_mhz", r.g_mhz)?;
            opt("experiment.kappa_mhz", r.kappa_mhz, non_negative)?;
            finite("experiment.f0_re", r.f0_re)?;
            finite("experiment.f0_im", r.f0_im)?;
            finite("experiment.t_start_us", r.t_start_us)?;
            finite("experiment.t_end_us", r.t_end_us)?;
            if r.t_end_us <= r.t_start_us {
                return Err(CliError::invalid("experiment.t_end_us", "must exceed t_start_us"));
            }
            opt("experiment.dt_us", r.dt_us, positive)?;
            finite("experiment.lo_phase", r.lo_phase)?;
            if let Some(p) = &r.pulse_file {
                let path = base_dir.join(p);
                if !path.is_file() {
                    return Err(CliError::invalid("experiment.pulse_file", format!("{} is not a file", path.display())));
                }
            }
        }
        Experiment::Shape(s) => {
            positive("experiment.gamma_ph_mhz", s.gamma_ph_mhz)?;
            opt("experiment.kappa_mhz", s.kappa_mhz, positive)?;
            finite("experiment.phase", s.phase)?;
        }
    }
    Ok(())
}
