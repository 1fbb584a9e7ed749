//! Amplitude equations ḟ = −i g* r, ṙ = −i g f − κr/2 with r_out = √κ r.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{require_finite, require_non_negative, require_positive, Error, Result};
use crate::pulse::Drive;
use crate::units::angular;

/// Mode amplitudes along a release. `r_out` in µs^-1/2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldTrace {
    pub times: Vec<f64>,
    pub f_amp: Vec<C64>,
    pub r_amp: Vec<C64>,
    pub r_out: Vec<C64>,
    pub kappa_mhz: f64,
}

impl FieldTrace {
    /// ∫|r_out|² dt by the trapezoid rule.
    pub fn emitted_energy(&self) -> f64 {
        self.cumulative_emission().last().copied().unwrap_or(0.0)
    }

    /// Running ∫₀ᵗ|r_out|² dτ at every sample.
    pub fn cumulative_emission(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.times.len());
        for k in 0..self.times.len() {
            if k > 0 {
                let h = self.times[k] - self.times[k - 1];
                acc += 0.5 * h * (self.r_out[k - 1].norm_sqr() + self.r_out[k].norm_sqr());
            }
            out.push(acc);
        }
        out
    }
}

fn step_bound(g_max_mhz: f64, kappa_mhz: f64) -> f64 {
    let fastest = g_max_mhz.max(kappa_mhz);
    if fastest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (50.0 * fastest)
    }
}

/// RK4 from (f0, 0) at `t_span.0`; every step is recorded.
pub fn heisenberg_evolve(drive: &dyn Drive, kappa_mhz: f64, f0: C64, t_span: (f64, f64), dt: f64) -> Result<FieldTrace> {
    require_non_negative("kappa_mhz", kappa_mhz)?;
    require_positive("dt", dt)?;
    require_finite("t_start", t_span.0)?;
    require_finite("t_end", t_span.1)?;
    if t_span.1 < t_span.0 {
        return Err(Error::param("t_span", "end precedes start"));
    }
    let bound = step_bound(drive.max_abs(), kappa_mhz);
    if dt > bound {
        return Err(Error::StepSize { dt, bound });
    }
    let kappa = angular(kappa_mhz);
    let sqrt_kappa = kappa.sqrt();
    let span = t_span.1 - t_span.0;
    let steps = if span == 0.0 { 0 } else { (span / dt).ceil() as usize };
    let h = if steps == 0 { 0.0 } else { span / steps as f64 };

    let i = C64::new(0.0, 1.0);
    let rhs = |f: C64, r: C64, g_mhz: C64| {
        let g = g_mhz * std::f64::consts::TAU;
        (-i * g.conj() * r, -i * g * f - r * (0.5 * kappa))
    };

    let (mut f, mut r) = (f0, C64::new(0.0, 0.0));
    let mut trace = FieldTrace {
        times: Vec::with_capacity(steps + 1),
        f_amp: Vec::with_capacity(steps + 1),
        r_amp: Vec::with_capacity(steps + 1),
        r_out: Vec::with_capacity(steps + 1),
        kappa_mhz,
    };
    let mut push = |t: f64, f: C64, r: C64| {
        trace.times.push(t);
        trace.f_amp.push(f);
        trace.r_amp.push(r);
        trace.r_out.push(r * sqrt_kappa);
    };
    push(t_span.0, f, r);
    for k in 0..steps {
        let t = t_span.0 + k as f64 * h;
        let (g1, g2, g3) = (drive.value(t), drive.value(t + 0.5 * h), drive.value_left(t + h));
        let (a1, b1) = rhs(f, r, g1);
        let (a2, b2) = rhs(f + a1 * (0.5 * h), r + b1 * (0.5 * h), g2);
        let (a3, b3) = rhs(f + a2 * (0.5 * h), r + b2 * (0.5 * h), g2);
        let (a4, b4) = rhs(f + a3 * h, r + b3 * h, g3);
        f += (a1 + (a2 + a3) * 2.0 + a4) * (h / 6.0);
        r += (b1 + (b2 + b3) * 2.0 + b4) * (h / 6.0);
        let t_next = t_span.0 + (k + 1) as f64 * h;
        if !(f.re.is_finite() && f.im.is_finite() && r.re.is_finite() && r.im.is_finite()) {
            return Err(Error::Diverged {
                time: t_next,
                reason: "non-finite amplitude".into(),
            });
        }
        push(t_next, f, r);
    }
    Ok(trace)
}

/// Amplitudes at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub f: C64,
    pub r: C64,
    pub r_out: C64,
}

/// sinh(z)/z, with a series near zero.
fn shc(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        C64::new(1.0, 0.0) + z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sinh() / z
    }
}

/// Closed-form response to a constant real coupling, starting from (f0, 0) at t = 0.
///
/// With s = √(κ²/16 − g²) the modes evolve as e^{−κt/4} times combinations
/// of cosh(st) and sinh(st); s is imaginary in the oscillatory regime.
pub fn constant_g_analytical(g_mhz: f64, kappa_mhz: f64, f0: C64, t: f64) -> Result<FieldSample> {
    require_non_negative("g_mhz", g_mhz)?;
    require_non_negative("kappa_mhz", kappa_mhz)?;
    require_non_negative("t", t)?;
    let g = angular(g_mhz);
    let kappa = angular(kappa_mhz);
    let s = C64::new(kappa * kappa / 16.0 - g * g, 0.0).sqrt();
    let st = s * t;
    let damp = (-kappa * t / 4.0).exp();
    let sh = shc(st) * t;
    let f = f0 * damp * (st.cosh() + sh * (kappa / 4.0));
    let r = -C64::new(0.0, 1.0) * f0 * damp * g * sh;
    Ok(FieldSample {
        f,
        r,
        r_out: r * kappa.sqrt(),
    })
}

/// I(t) = Re(e^{−iφ} r_out(t)).
pub fn quadrature_trace(trace: &FieldTrace, lo_phase: f64) -> Vec<f64> {
    let lo = C64::from_polar(1.0, -lo_phase);
    trace.r_out.iter().map(|z| (lo * z).re).collect()
}
