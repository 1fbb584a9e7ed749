//! Couplings g(t) that make the released field follow a chosen envelope.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, require_positive, Error, Result};
use crate::pulse::{PulseEnvelope, TimeGrid};
use crate::units::{angular, ordinary};

/// Samples in the default emission window.
pub const DEFAULT_WINDOW_SAMPLES: usize = 2000;
/// Half-width of the default window, in units of 1/(γ_ph in MHz).
pub const DEFAULT_WINDOW_WIDTHS: f64 = 6.0;
/// Below this |f|²/|f0|² the source counts as empty.
pub const DEPLETION_FLOOR: f64 = 1e-9;
/// Once less than this much target energy (relative to |f0|²) is still to come,
/// the coupling is frozen. Past this point f is tiny and the division amplifies quadrature error.
pub const TAIL_ALLOWANCE: f64 = 1e-5;

/// Output field ¼√γ sech(γt/2) e^{iφ}, γ = 2π·`gamma_ph_mhz`. Carries 1/4 of a photon-energy unit.
pub fn sech_target(gamma_ph_mhz: f64, phase: f64, grid: TimeGrid) -> Result<PulseEnvelope> {
    require_positive("gamma_ph_mhz", gamma_ph_mhz)?;
    require_finite("phase", phase)?;
    let gamma = angular(gamma_ph_mhz);
    let amp = 0.25 * gamma.sqrt();
    let rot = C64::from_polar(1.0, phase);
    PulseEnvelope::from_fn(grid, |t| rot * amp / (0.5 * gamma * t).cosh())
}

/// Symmetric window of ±6/γ_ph (γ_ph in MHz) sampled at 2000 points.
pub fn default_sech_grid(gamma_ph_mhz: f64) -> Result<TimeGrid> {
    require_positive("gamma_ph_mhz", gamma_ph_mhz)?;
    let half = DEFAULT_WINDOW_WIDTHS / gamma_ph_mhz;
    TimeGrid::spanning(-half, half, DEFAULT_WINDOW_SAMPLES)
}

/// Closed-form coupling (MHz, real) producing the sech target from f0 = 1/2.
pub fn analytic_shaping_pulse(kappa_mhz: f64, gamma_ph_mhz: f64, grid: TimeGrid) -> Result<PulseEnvelope> {
    require_positive("kappa_mhz", kappa_mhz)?;
    require_positive("gamma_ph_mhz", gamma_ph_mhz)?;
    if gamma_ph_mhz >= kappa_mhz {
        return Err(Error::Bandwidth {
            gamma_ph: gamma_ph_mhz,
            kappa: kappa_mhz,
        });
    }
    let gamma = angular(gamma_ph_mhz);
    let k = kappa_mhz / gamma_ph_mhz;
    let mut samples = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        let t = grid.time(i);
        // Expand in whichever exponential is bounded.
        let (num, den, rad) = if t > 0.0 {
            let w = (-gamma * t).exp();
            ((1.0 + k) * w + (k - 1.0), 1.0 + w, k * w + k - 1.0)
        } else {
            let u = (gamma * t).exp();
            let rad = k + (k - 1.0) * u;
            (u.sqrt() * ((1.0 + k) + (k - 1.0) * u), 1.0 + u, rad)
        };
        if !(rad > 0.0) {
            return Err(Error::Domain { time: t });
        }
        let g = 0.5 * gamma * num / (den * rad.sqrt());
        samples.push(C64::new(ordinary(g), 0.0));
    }
    PulseEnvelope::new(grid.t0, grid.dt, samples)
}

/// How ∫g* r dt is accumulated during inversion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SumRule {
    /// Trapezoid with a predictor-corrector for the implicit endpoint.
    #[default]
    Trapezoid,
    LeftRiemann,
}

fn trapezoid_energy(env: &PulseEnvelope) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(env.len());
    for k in 0..env.len() {
        if k > 0 {
            acc += 0.5 * env.dt * (env.samples[k - 1].norm_sqr() + env.samples[k].norm_sqr());
        }
        out.push(acc);
    }
    out
}

fn derivative(r: &[C64], dt: f64) -> Vec<C64> {
    let n = r.len();
    let mut d = vec![C64::new(0.0, 0.0); n];
    if n < 3 {
        if n == 2 {
            d[0] = (r[1] - r[0]) / dt;
            d[1] = d[0];
        }
        return d;
    }
    for k in 1..n - 1 {
        d[k] = (r[k + 1] - r[k - 1]) / (2.0 * dt);
    }
    d[0] = (r[0] * -3.0 + r[1] * 4.0 - r[2]) / (2.0 * dt);
    d[n - 1] = (r[n - 1] * 3.0 - r[n - 2] * 4.0 + r[n - 3]) / (2.0 * dt);
    d
}

/// Inverts the amplitude equations sample by sample.
///
/// `target` is r_out(t) in µs^-1/2; the result is g(t) in MHz on the same grid.
/// The source holds f0 at the first sample.
pub fn numerical_shaping_pulse(target: &PulseEnvelope, kappa_mhz: f64, f0: C64, rule: SumRule) -> Result<PulseEnvelope> {
    require_positive("kappa_mhz", kappa_mhz)?;
    let e0 = f0.norm_sqr();
    if !(e0 > 0.0 && e0.is_finite()) {
        return Err(Error::param("f0", "must be non-zero and finite"));
    }
    let cumulative = trapezoid_energy(target);
    let total = cumulative.last().copied().unwrap_or(0.0);
    if total > e0 * (1.0 + 1e-3) {
        return Err(Error::param(
            "target",
            format!("asks for energy {total:.6} but the source holds {e0:.6}"),
        ));
    }

    let kappa = angular(kappa_mhz);
    let dt = target.dt;
    let r: Vec<C64> = target.samples.iter().map(|z| z / kappa.sqrt()).collect();
    let rdot = derivative(&r, dt);
    let i = C64::new(0.0, 1.0);
    // −i g f = ṙ + κr/2
    let solve = |k: usize, f: C64| i * (rdot[k] + r[k] * (0.5 * kappa)) / f;

    let n = r.len();
    let mut g = vec![C64::new(0.0, 0.0); n];
    let mut f = f0;
    for k in 0..n {
        if k > 0 {
            let left = g[k - 1].conj() * r[k - 1];
            let f_left = f - i * left * dt;
            f = match rule {
                SumRule::LeftRiemann => f_left,
                SumRule::Trapezoid => {
                    let mut fk = f_left;
                    for _ in 0..3 {
                        if fk.norm_sqr() < DEPLETION_FLOOR * e0 {
                            break;
                        }
                        let gk = solve(k, fk);
                        fk = f - i * (left + gk.conj() * r[k]) * (0.5 * dt);
                    }
                    fk
                }
            };
        }
        let remaining = total - cumulative[k];
        if k > 0 && remaining < TAIL_ALLOWANCE * e0 {
            g[k] = g[k - 1];
            continue;
        }
        // Either the amplitude is gone or the books say more left than was there.
        let overdrawn = cumulative[k] + r[k].norm_sqr() > e0 * (1.0 + 1e-6);
        if overdrawn || f.norm_sqr() < DEPLETION_FLOOR * e0 {
            return Err(Error::DepletedSource {
                step: k,
                time: target.t0 + k as f64 * dt,
                delivered_fraction: if total > 0.0 { cumulative[k] / total } else { 1.0 },
            });
        }
        g[k] = solve(k, f);
        if !(g[k].re.is_finite() && g[k].im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite coupling at step {k}")));
        }
    }
    PulseEnvelope::new(target.t0, dt, g.into_iter().map(|z| z / std::f64::consts::TAU).collect())
}

/// |f0 − i∫g* r dt| / |f0|: amplitude left in the source if the target were emitted exactly.
pub fn evacuation_residual(pulse: &PulseEnvelope, target: &PulseEnvelope, kappa_mhz: f64, f0: C64) -> Result<f64> {
    require_positive("kappa_mhz", kappa_mhz)?;
    if pulse.len() != target.len() || (pulse.dt - target.dt).abs() > 1e-12 * target.dt.abs() || (pulse.t0 - target.t0).abs() > 1e-9 {
        return Err(Error::param("pulse", "must share the target's time grid"));
    }
    if f0.norm() == 0.0 {
        return Err(Error::param("f0", "must be non-zero"));
    }
    let scale = std::f64::consts::TAU / angular(kappa_mhz).sqrt();
    let term = |k: usize| pulse.samples[k].conj() * target.samples[k] * scale;
    let mut acc = C64::new(0.0, 0.0);
    for k in 1..pulse.len() {
        acc += (term(k - 1) + term(k)) * (0.5 * pulse.dt);
    }
    Ok((f0 - C64::new(0.0, 1.0) * acc).norm() / f0.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emission::heisenberg::heisenberg_evolve;
    use crate::pulse::compare_pulses;
    use std::f64::consts::FRAC_PI_2;

    const KAPPA: f64 = 0.4;
    const GAMMA: f64 = 0.2;

    fn target() -> PulseEnvelope {
        sech_target(GAMMA, -FRAC_PI_2, default_sech_grid(GAMMA).unwrap()).unwrap()
    }

    #[test]
    fn sech_carries_a_quarter() {
        let e = trapezoid_energy(&target());
        assert!((e.last().unwrap() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn default_window() {
        let g = default_sech_grid(GAMMA).unwrap();
        assert_eq!(g.n, 2000);
        assert!((g.t0 + 30.0).abs() < 1e-12);
        assert!((g.end() - 30.0).abs() < 1e-9);
    }

    #[test]
    fn analytic_branches_agree_at_zero() {
        let grid = TimeGrid::spanning(-1e-9, 1e-9, 3).unwrap();
        let p = analytic_shaping_pulse(KAPPA, GAMMA, grid).unwrap();
        assert!((p.samples[0].re - p.samples[2].re).abs() < 1e-8);
    }

    #[test]
    fn analytic_limits() {
        let gamma = angular(GAMMA);
        let k = KAPPA / GAMMA;
        let grid = TimeGrid::spanning(-200.0, 200.0, 3).unwrap();
        let p = analytic_shaping_pulse(KAPPA, GAMMA, grid).unwrap();
        assert!(p.samples[0].norm() < 1e-20);
        let late = ordinary(0.5 * gamma * (k - 1.0).sqrt());
        assert!((p.samples[2].re - late).abs() < 1e-9);
    }

    #[test]
    fn bandwidth_guard() {
        let grid = default_sech_grid(0.5).unwrap();
        assert!(matches!(analytic_shaping_pulse(0.4, 0.5, grid), Err(Error::Bandwidth { .. })));
    }

    #[test]
    fn numerical_matches_analytic() {
        let t = target();
        let num = numerical_shaping_pulse(&t, KAPPA, C64::new(0.5, 0.0), SumRule::Trapezoid).unwrap();
        let ana = analytic_shaping_pulse(KAPPA, GAMMA, t.grid()).unwrap();
        let err = compare_pulses(&ana, &num, false).unwrap();
        assert!(err < 0.01, "{err}");
    }

    #[test]
    fn trapezoid_beats_left_riemann() {
        let t = target();
        let ana = analytic_shaping_pulse(KAPPA, GAMMA, t.grid()).unwrap();
        let f0 = C64::new(0.5, 0.0);
        let trap = compare_pulses(&ana, &numerical_shaping_pulse(&t, KAPPA, f0, SumRule::Trapezoid).unwrap(), false).unwrap();
        let left = compare_pulses(&ana, &numerical_shaping_pulse(&t, KAPPA, f0, SumRule::LeftRiemann).unwrap(), false).unwrap();
        assert!(trap < left, "{trap} vs {left}");
    }

    #[test]
    fn shaped_release_reproduces_target() {
        let t = target();
        let f0 = C64::new(0.5, 0.0);
        let g = numerical_shaping_pulse(&t, KAPPA, f0, SumRule::Trapezoid).unwrap();
        let tr = heisenberg_evolve(&g, KAPPA, f0, (t.t0, t.t_end()), t.dt / 2.0).unwrap();
        let peak = t.peak();
        let mut worst: f64 = 0.0;
        for (k, &z) in t.samples.iter().enumerate() {
            if z.norm() > 0.01 * peak {
                let out = tr.r_out[2 * k];
                worst = worst.max((out - z).norm() / z.norm());
            }
        }
        assert!(worst < 0.02, "{worst}");
        assert!(evacuation_residual(&g, &t, KAPPA, f0).unwrap() < 0.02);
    }

    #[test]
    fn overdemanding_target_rejected() {
        let t = target().map(|z| z * 1.5);
        let e = numerical_shaping_pulse(&t, KAPPA, C64::new(0.5, 0.0), SumRule::Trapezoid);
        assert!(matches!(e, Err(Error::InvalidParameter { name: "target", .. })));
    }

    #[test]
    fn depletion_reports_progress() {
        // Energy fits, but the source is asked for almost all of it early and then more.
        let grid = TimeGrid::spanning(0.0, 10.0, 1001).unwrap();
        let t = PulseEnvelope::from_fn(grid, |t| C64::new(if t < 5.0 { 0.44 } else { 0.001 }, 0.0)).unwrap();
        match numerical_shaping_pulse(&t, KAPPA, C64::new(1.0, 0.0), SumRule::LeftRiemann) {
            Err(Error::DepletedSource { delivered_fraction, .. }) => {
                assert!(delivered_fraction > 0.5 && delivered_fraction < 1.0)
            }
            other => panic!("{other:?}"),
        }
    }
}
