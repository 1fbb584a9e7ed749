use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: String, reason: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Core {
        context: &'static str,
        #[source]
        source: fluxlink::Error,
    },
}

impl CliError {
    pub fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// 2 for anything the user can fix in the inputs, 3 when the numerics fail.
    pub fn exit_code(&self) -> i32 {
        use fluxlink::Error as E;
        match self {
            CliError::Config { .. } | CliError::Invalid { .. } | CliError::Read { .. } => 2,
            CliError::Write { .. } => 3,
            CliError::Core { source, .. } => match root(source) {
                E::InvalidParameter { .. }
                | E::InvalidDimension { .. }
                | E::DimensionOverflow { .. }
                | E::Bandwidth { .. }
                | E::StepSize { .. }
                | E::PulseFormat(_) => 2,
                _ => 3,
            },
        }
    }
}

fn root(e: &fluxlink::Error) -> &fluxlink::Error {
    match e {
        fluxlink::Error::AtFlux { source, .. } | fluxlink::Error::AtGridPoint { source, .. } => root(source),
        other => other,
    }
}

pub trait CoreContext<T> {
    fn ctx(self, context: &'static str) -> Result<T, CliError>;
}

impl<T> CoreContext<T> for fluxlink::Result<T> {
    fn ctx(self, context: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { context, source })
    }
}
