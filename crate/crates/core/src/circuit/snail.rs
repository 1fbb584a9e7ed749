//! SNAIL potential U(φ) = −α E_J cos φ − N E_J cos((φ_ext − φ)/N) and its
//! Taylor coefficients at the potential minimum.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::params::{DeviceParams, SnailParams};
use crate::error::{require_finite, require_positive, Error, Result};
use crate::units::ghz_to_mhz;

/// Expansion of the SNAIL potential around its minimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnailExpansion {
    /// Location of the minimum in the principal branch, rad.
    pub phi_min: f64,
    /// U''(φ_min), GHz.
    pub u2_ghz: f64,
    /// U'''(φ_min)/6, MHz.
    pub c3_mhz: f64,
}

struct Potential {
    alpha: f64,
    ej: f64,
    n: f64,
    phi_ext: f64,
}

impl Potential {
    fn value(&self, x: f64) -> f64 {
        -self.alpha * self.ej * x.cos() - self.n * self.ej * ((self.phi_ext - x) / self.n).cos()
    }
    fn d1(&self, x: f64) -> f64 {
        self.alpha * self.ej * x.sin() - self.ej * ((self.phi_ext - x) / self.n).sin()
    }
    fn d2(&self, x: f64) -> f64 {
        self.alpha * self.ej * x.cos() + self.ej / self.n * ((self.phi_ext - x) / self.n).cos()
    }
    fn d3(&self, x: f64) -> f64 {
        -self.alpha * self.ej * x.sin() + self.ej / (self.n * self.n) * ((self.phi_ext - x) / self.n).sin()
    }
}

/// Reduces a phase into (−π, π].
pub fn principal_phase(phi: f64) -> f64 {
    let r = (phi + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

const SCAN_POINTS: usize = 4001;
const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Locates the minimum of the SNAIL potential and returns its Taylor coefficients.
pub fn snail_expansion(alpha: f64, ej_ghz: f64, n_junctions: u32, phi_ext_s: f64) -> Result<SnailExpansion> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    require_positive("ej_ghz", ej_ghz)?;
    require_finite("phi_ext_s", phi_ext_s)?;
    if n_junctions == 0 {
        return Err(Error::param("n_junctions", "must be at least 1"));
    }
    let u = Potential {
        alpha,
        ej: ej_ghz,
        n: n_junctions as f64,
        phi_ext: principal_phase(phi_ext_s),
    };

    // coarse scan of the principal branch, then safeguarded Newton on U'
    let step = TAU / (SCAN_POINTS - 1) as f64;
    let mut best = (-PI, u.value(-PI));
    for k in 1..SCAN_POINTS {
        let x = -PI + k as f64 * step;
        let v = u.value(x);
        if v < best.1 {
            best = (x, v);
        }
    }
    let (mut lo, mut hi) = (best.0 - step, best.0 + step);
    if u.d1(lo) > 0.0 || u.d1(hi) < 0.0 {
        return Err(Error::Numeric(format!(
            "SNAIL potential minimum is not bracketed near {:.6} rad",
            best.0
        )));
    }
    let mut x = best.0;
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let g = u.d1(x);
        if g.abs() < NEWTON_TOL * ej_ghz {
            converged = true;
            break;
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let h = u.d2(x);
        let newton = x - g / h;
        x = if h > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Numeric("SNAIL minimum search did not converge".into()));
    }
    let u2 = u.d2(x);
    if u2 <= 0.0 {
        return Err(Error::Numeric(format!("SNAIL stationary point at {x:.6} rad is not a minimum")));
    }
    Ok(SnailExpansion {
        phi_min: x,
        u2_ghz: u2,
        c3_mhz: ghz_to_mhz(u.d3(x) / 6.0),
    })
}

/// Junction-level cubic coefficient U'''(φ_min)/6 in MHz.
pub fn snail_c3(alpha: f64, ej_ghz: f64, n_junctions: u32, phi_ext_s: f64) -> Result<f64> {
    Ok(snail_expansion(alpha, ej_ghz, n_junctions, phi_ext_s)?.c3_mhz)
}

/// Cubic coefficient referred to the phase of the SNAIL resonator mode.
///
/// The SNAIL carries the fraction p = E_L,s / U''(φ_min) of the mode phase,
/// so the mode coefficient is p³ times the junction-level value.
pub fn snail_mode_c3(snail: &SnailParams, phi_ext_s: f64) -> Result<f64> {
    let exp = snail_expansion(snail.alpha, snail.ej_ghz, snail.n_junctions, phi_ext_s)?;
    let participation = snail.el_ghz / exp.u2_ghz;
    Ok(exp.c3_mhz * participation.powi(3))
}

/// Where the system Hamiltonian takes its SNAIL cubic coefficient from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum C3Source {
    /// `snail.c3_mhz` as given (falls back to the junction value when absent).
    #[default]
    Table,
    /// Participation-scaled value from the junction parameters.
    Junction,
}

/// Resolves the mode-level c3 (MHz) used in the system Hamiltonian.
pub fn resolve_c3(params: &DeviceParams, source: C3Source) -> Result<f64> {
    match (source, params.snail.c3_mhz) {
        (C3Source::Table, Some(c3)) => Ok(c3),
        _ => snail_mode_c3(&params.snail, params.flux.phi_ext_s),
    }
}
