use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why a dressed-state labeling attempt was rejected.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabelingError {
    #[error("bare label {label} claimed by dressed states {first} (overlap {first_overlap:.4}) and {second} (overlap {second_overlap:.4})")]
    Ambiguous {
        label: String,
        first: usize,
        first_overlap: f64,
        second: usize,
        second_overlap: f64,
    },
    #[error("dressed state {index} has best overlap {overlap:.4} with {label}, below threshold {threshold}")]
    WeakOverlap {
        index: usize,
        label: String,
        overlap: f64,
        threshold: f64,
    },
    #[error("no labeled dressed state carries bare label {0}")]
    Missing(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {dim}: {reason}")]
    InvalidDimension { dim: usize, reason: &'static str },

    #[error("operator is not Hermitian: max |A - A^dag| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("product dimension {dim} exceeds the configured cap {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("state labeling failed: {0}")]
    Labeling(#[from] LabelingError),

    #[error("displacement is singular: zero detuning with zero SNAIL linewidth")]
    Singularity,

    #[error("time step {dt} us exceeds the stability bound {bound} us")]
    StepSize { dt: f64, bound: f64 },

    #[error("integration diverged at t = {time} us: {reason}")]
    Diverged { time: f64, reason: String },

    #[error("photon bandwidth {gamma_ph} MHz must be smaller than kappa {kappa} MHz")]
    Bandwidth { gamma_ph: f64, kappa: f64 },

    #[error("shaping pulse radicand is negative at t = {time} us")]
    Domain { time: f64 },

    #[error("source depleted at step {step} (t = {time} us) after delivering {delivered_fraction:.4} of the target energy")]
    DepletedSource {
        step: usize,
        time: f64,
        delivered_fraction: f64,
    },

    #[error("flux point {phi_ext}: {source}")]
    AtFlux {
        phi_ext: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("grid point (detuning {detuning_mhz} MHz, duration {duration_us} us): {source}")]
    AtGridPoint {
        detuning_mhz: f64,
        duration_us: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("pulse file: {0}")]
    PulseFormat(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

/// Fails with [`Error::InvalidParameter`] unless `value` is finite and strictly positive.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn require_non_negative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite and >= 0, got {value}")))
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be finite, got {value}")))
    }
}
