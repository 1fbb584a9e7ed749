//! Uniformly sampled complex envelopes and time-dependent coupling drives.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{require_finite, require_positive, Error, Result};

/// Uniform time grid t_k = t0 + k·dt, k < n. Times in µs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        require_finite("t0", t0)?;
        require_positive("dt", dt)?;
        if n == 0 {
            return Err(Error::param("n", "grid must hold at least one sample"));
        }
        Ok(Self { t0, dt, n })
    }

    /// `n` samples spanning [start, end] inclusive.
    pub fn spanning(start: f64, end: f64, n: usize) -> Result<Self> {
        if n < 2 || !(end > start) {
            return Err(Error::param("grid", format!("need n >= 2 and end > start, got n={n}, [{start}, {end}]")));
        }
        Self::new(start, (end - start) / (n - 1) as f64, n)
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.n - 1)
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.time(k)).collect()
    }
}

/// Complex samples on a uniform grid.
///
/// Coupling envelopes hold g/2π in MHz; emitted-field targets hold r_out in
/// µs^-1/2. Linear interpolation between samples, zero outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PulseEnvelope {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<C64>,
}

impl PulseEnvelope {
    pub fn new(t0: f64, dt: f64, samples: Vec<C64>) -> Result<Self> {
        TimeGrid::new(t0, dt, samples.len())?;
        if let Some(k) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::param("samples", format!("non-finite value at index {k}")));
        }
        Ok(Self { t0, dt, samples })
    }

    pub fn from_fn(grid: TimeGrid, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(grid.t0, grid.dt, grid.times().into_iter().map(f).collect())
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            t0: grid.t0,
            dt: grid.dt,
            samples: vec![C64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn grid(&self) -> TimeGrid {
        TimeGrid {
            t0: self.t0,
            dt: self.dt,
            n: self.samples.len(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid().times()
    }

    pub fn t_end(&self) -> f64 {
        self.grid().end()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Linear interpolation; zero outside [t0, t_end].
    pub fn value_at(&self, t: f64) -> C64 {
        let n = self.samples.len();
        let x = (t - self.t0) / self.dt;
        let tol = 1e-9;
        if x < -tol || x > (n - 1) as f64 + tol {
            return C64::new(0.0, 0.0);
        }
        let x = x.clamp(0.0, (n - 1) as f64);
        let k = (x.floor() as usize).min(n.saturating_sub(2));
        if n == 1 {
            return self.samples[0];
        }
        let w = x - k as f64;
        self.samples[k] * (1.0 - w) + self.samples[k + 1] * w
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt,
            samples: self.samples.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Two-column text: `t re,im` per line, `#` starts a comment.
    pub fn to_text(&self, header: &str) -> String {
        let mut out = String::new();
        for line in header.lines() {
            let _ = writeln!(out, "# {line}");
        }
        let _ = writeln!(out, "# t_us value_re,value_im");
        for (k, z) in self.samples.iter().enumerate() {
            let t = self.t0 + k as f64 * self.dt;
            let _ = writeln!(out, "{t:e} {:e},{:e}", z.re, z.im);
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::PulseFormat(format!("line {}: {what}: `{raw}`", lineno + 1));
            let mut cols = line.split_whitespace();
            let (Some(t), Some(v), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(bad("expected two columns"));
            };
            let (re, im) = v.split_once(',').ok_or_else(|| bad("value must be re,im"))?;
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
            times.push(num(t)?);
            samples.push(C64::new(num(re)?, num(im)?));
        }
        if samples.is_empty() {
            return Err(Error::PulseFormat("no samples".into()));
        }
        let t0 = times[0];
        let dt = if times.len() > 1 { times[1] - t0 } else { 1.0 };
        if !(dt > 0.0) {
            return Err(Error::PulseFormat("times must increase".into()));
        }
        for (k, &t) in times.iter().enumerate() {
            if (t - (t0 + k as f64 * dt)).abs() > 1e-6 * dt {
                return Err(Error::PulseFormat(format!("non-uniform time grid at sample {k}")));
            }
        }
        Self::new(t0, dt, samples).map_err(|e| Error::PulseFormat(e.to_string()))
    }

    fn same_grid(&self, other: &Self) -> bool {
        self.samples.len() == other.samples.len()
            && (self.dt - other.dt).abs() <= 1e-9 * self.dt
            && (self.t0 - other.t0).abs() <= 1e-9 * self.dt.max(self.t0.abs())
    }
}

/// RMS of |a − b| divided by the peak of |a|.
///
/// Equal grids compare sample by sample. Otherwise `interp` must be set and
/// both are resampled onto the union support at the finer spacing.
pub fn compare_pulses(a: &PulseEnvelope, b: &PulseEnvelope, interp: bool) -> Result<f64> {
    let peak = a.peak();
    if peak == 0.0 {
        return Err(Error::PulseFormat("reference pulse is identically zero".into()));
    }
    let diffs: Vec<f64> = if a.same_grid(b) {
        a.samples.iter().zip(&b.samples).map(|(x, y)| (x - y).norm_sqr()).collect()
    } else if interp {
        let start = a.t0.min(b.t0);
        let end = a.t_end().max(b.t_end());
        let dt = a.dt.min(b.dt);
        let n = ((end - start) / dt).round() as usize + 1;
        (0..n)
            .map(|k| {
                let t = start + k as f64 * dt;
                (a.value_at(t) - b.value_at(t)).norm_sqr()
            })
            .collect()
    } else {
        return Err(Error::PulseFormat(
            "time grids differ; enable interpolation to compare".into(),
        ));
    };
    let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
    Ok(mean.sqrt() / peak)
}

/// Time-dependent coupling g(t)/2π in MHz.
pub trait Drive: Sync {
    fn value(&self, t: f64) -> C64;
    /// Limit from the left; differs from `value` only at a switching edge.
    fn value_left(&self, t: f64) -> C64 {
        self.value(t)
    }
    /// Upper bound of |g| over the run, used for the step-size check.
    fn max_abs(&self) -> f64;
}

impl Drive for PulseEnvelope {
    fn value(&self, t: f64) -> C64 {
        self.value_at(t)
    }
    fn max_abs(&self) -> f64 {
        self.peak()
    }
}

/// Constant coupling on the half-open window [t_on, t_off).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SquarePulse {
    pub g_mhz: C64,
    pub t_on: f64,
    pub t_off: f64,
}

impl SquarePulse {
    pub fn new(g_mhz: f64, t_on: f64, t_off: f64) -> Self {
        Self {
            g_mhz: C64::new(g_mhz, 0.0),
            t_on,
            t_off,
        }
    }

    /// Always on.
    pub fn constant(g_mhz: f64) -> Self {
        Self::new(g_mhz, f64::NEG_INFINITY, f64::INFINITY)
    }
}

impl Drive for SquarePulse {
    fn value(&self, t: f64) -> C64 {
        // a hair of slack so grid points computed as t0 + k·dt land on the intended side
        let eps = 1e-12 * (1.0 + t.abs());
        if t >= self.t_on - eps && t < self.t_off - eps {
            self.g_mhz
        } else {
            C64::new(0.0, 0.0)
        }
    }
    fn value_left(&self, t: f64) -> C64 {
        let eps = 1e-12 * (1.0 + t.abs());
        if t > self.t_on + eps && t <= self.t_off + eps {
            self.g_mhz
        } else {
            C64::new(0.0, 0.0)
        }
    }
    fn max_abs(&self) -> f64 {
        self.g_mhz.norm()
    }
}
