//! Fixed-step RK4 integration of the master equation on {g0, e0, g1, e1}.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::model::{DensityMatrix, EffectiveModel, ThermalModel, E0, E1, G0, G1};
use crate::error::{require_finite, require_positive, Error, Result};
use crate::pulse::Drive;
use crate::units::angular;

type Mat4 = [[C64; 4]; 4];
const ZERO: C64 = C64::new(0.0, 0.0);

/// Largest step allowed: 1/(50·max(|g|, κ, |δ|)) with rates in MHz, so dt in µs.
pub fn step_bound(model: &EffectiveModel, g_max_mhz: f64) -> f64 {
    let fastest = g_max_mhz.abs().max(model.kappa_mhz).max(model.delta_mhz.abs());
    if fastest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (50.0 * fastest)
    }
}

/// Populations sampled along a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct SimulationTrace {
    pub times: Vec<f64>,
    /// Per sample, ordered g0, e0, g1, e1.
    pub populations: Vec<[f64; 4]>,
    pub final_state: DensityMatrix,
    pub model: EffectiveModel,
    pub thermal: ThermalModel,
    /// Step actually used, µs.
    pub dt: f64,
}

impl SimulationTrace {
    pub fn population(&self, index: usize) -> Vec<f64> {
        self.populations.iter().map(|p| p[index]).collect()
    }

    pub fn final_populations(&self) -> [f64; 4] {
        self.final_state.populations()
    }
}

/// Jump operator |to⟩⟨from| with its rate in 1/µs.
struct Jump {
    to: usize,
    from: usize,
    rate: f64,
}

struct Generator {
    /// Static diagonal of H, rad/µs.
    h0: [f64; 4],
    chi_f: f64,
    chi_r: f64,
    stark_scale: f64,
    jumps: Vec<Jump>,
}

impl Generator {
    fn new(model: &EffectiveModel, thermal: &ThermalModel) -> Self {
        let d = angular(model.delta_mhz);
        let chi = angular(model.chi_fr_mhz);
        let (chi_f, chi_r, stark_scale) = match model.stark {
            Some(s) => (angular(s.chi_fs_mhz), angular(s.chi_sr_mhz), 1.0 / (s.g_per_xi_mhz * s.g_per_xi_mhz)),
            None => (0.0, 0.0, 0.0),
        };
        let jumps = [
            Jump {
                to: G0,
                from: E0,
                rate: thermal.gamma_down,
            },
            Jump {
                to: E0,
                from: G0,
                rate: thermal.gamma_up,
            },
            Jump {
                to: G0,
                from: G1,
                rate: angular(model.kappa_mhz),
            },
        ]
        .into_iter()
        .filter(|j| j.rate > 0.0)
        .collect();
        Self {
            h0: [0.0, 0.0, -d, chi - d],
            chi_f,
            chi_r,
            stark_scale,
            jumps,
        }
    }

    /// dρ/dt for coupling g (MHz) at this instant.
    fn rhs(&self, rho: &Mat4, g_mhz: C64) -> Mat4 {
        let g = g_mhz * std::f64::consts::TAU;
        let mut diag = self.h0;
        if self.stark_scale != 0.0 {
            // |ξ|² from |g|², in MHz² so the scale stays unit-free
            let xi2 = g_mhz.norm_sqr() * self.stark_scale;
            diag[E0] += xi2 * self.chi_f;
            diag[E1] += xi2 * (self.chi_f + self.chi_r);
            diag[G1] += xi2 * self.chi_r;
        }
        let mut out = [[ZERO; 4]; 4];
        // −i[H, ρ] with H = diag + g|g1⟩⟨e0| + g*|e0⟩⟨g1|
        let mi = C64::new(0.0, -1.0);
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = mi * (diag[i] - diag[j]) * rho[i][j];
            }
        }
        let gc = g.conj();
        for j in 0..4 {
            // (Hρ)_{g1,j} += g ρ_{e0,j};  (Hρ)_{e0,j} += g* ρ_{g1,j}
            out[G1][j] += mi * g * rho[E0][j];
            out[E0][j] += mi * gc * rho[G1][j];
        }
        for i in 0..4 {
            // (ρH)_{i,e0} += ρ_{i,g1} g;  (ρH)_{i,g1} += ρ_{i,e0} g*
            out[i][E0] -= mi * rho[i][G1] * g;
            out[i][G1] -= mi * rho[i][E0] * gc;
        }
        for jump in &self.jumps {
            let (a, b, r) = (jump.to, jump.from, jump.rate);
            out[a][a] += rho[b][b] * r;
            for k in 0..4 {
                out[b][k] -= rho[b][k] * (0.5 * r);
                out[k][b] -= rho[k][b] * (0.5 * r);
            }
        }
        out
    }
}

fn axpy(y: &Mat4, a: f64, x: &Mat4) -> Mat4 {
    let mut out = *y;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += x[i][j] * a;
        }
    }
    out
}

fn check_state(rho: &DensityMatrix, deep: bool) -> std::result::Result<(), String> {
    let tr = rho.trace();
    if !(tr.re.is_finite() && tr.im.is_finite()) {
        return Err("non-finite density matrix".into());
    }
    if (tr - C64::new(1.0, 0.0)).norm() > 1e-6 {
        return Err(format!("trace drifted to {tr}"));
    }
    if deep {
        let herm = rho.hermiticity_error();
        if herm > 1e-9 {
            return Err(format!("Hermiticity lost ({herm:e})"));
        }
        let min = rho.min_eigenvalue().map_err(|e| e.to_string())?;
        if min < -1e-8 {
            return Err(format!("negative eigenvalue {min:e}"));
        }
    }
    Ok(())
}

/// Samples per positivity check; trace is checked every step.
const DEEP_CHECK_STRIDE: usize = 16;

/// Integrates ρ over `t_span` (µs) with step at most `dt`.
///
/// The span is divided into equal steps no longer than `dt`, so the final
/// time is hit exactly. Every step is recorded.
pub fn lindblad_evolve(
    model: &EffectiveModel,
    thermal: &ThermalModel,
    rho0: &DensityMatrix,
    drive: &dyn Drive,
    t_span: (f64, f64),
    dt: f64,
) -> Result<SimulationTrace> {
    model.validate()?;
    require_positive("dt", dt)?;
    require_finite("t_start", t_span.0)?;
    require_finite("t_end", t_span.1)?;
    if t_span.1 < t_span.0 {
        return Err(Error::param("t_span", "end precedes start"));
    }
    let bound = step_bound(model, drive.max_abs());
    if dt > bound {
        return Err(Error::StepSize { dt, bound });
    }
    rho0.validate()?;

    let span = t_span.1 - t_span.0;
    let steps = if span == 0.0 { 0 } else { (span / dt).ceil() as usize };
    let h = if steps == 0 { 0.0 } else { span / steps as f64 };
    let gen = Generator::new(model, thermal);

    let mut rho = rho0.entries;
    let mut times = Vec::with_capacity(steps + 1);
    let mut pops = Vec::with_capacity(steps + 1);
    let record = |rho: &Mat4, t: f64, times: &mut Vec<f64>, pops: &mut Vec<[f64; 4]>| {
        times.push(t);
        pops.push(std::array::from_fn(|k| rho[k][k].re));
    };
    record(&rho, t_span.0, &mut times, &mut pops);

    for k in 0..steps {
        let t = t_span.0 + k as f64 * h;
        let g1 = drive.value(t);
        let g2 = drive.value(t + 0.5 * h);
        // left limit at the step end, so an edge on a step boundary belongs to one step
        let g3 = drive.value_left(t + h);
        let k1 = gen.rhs(&rho, g1);
        let k2 = gen.rhs(&axpy(&rho, 0.5 * h, &k1), g2);
        let k3 = gen.rhs(&axpy(&rho, 0.5 * h, &k2), g2);
        let k4 = gen.rhs(&axpy(&rho, h, &k3), g3);
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += (k1[i][j] + (k2[i][j] + k3[i][j]) * 2.0 + k4[i][j]) * (h / 6.0);
            }
        }
        let t_next = t_span.0 + (k + 1) as f64 * h;
        let state = DensityMatrix {
            entries: rho,
            time: t_next,
        };
        let deep = (k + 1) % DEEP_CHECK_STRIDE == 0 || k + 1 == steps;
        check_state(&state, deep).map_err(|reason| Error::Diverged { time: t_next, reason })?;
        record(&rho, t_next, &mut times, &mut pops);
    }

    Ok(SimulationTrace {
        times,
        populations: pops,
        final_state: DensityMatrix {
            entries: rho,
            time: t_span.1,
        },
        model: *model,
        thermal: *thermal,
        dt: h,
    })
}
