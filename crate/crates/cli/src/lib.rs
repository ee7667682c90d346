//! Command-line front end: merge FOON documents, plan requests, derive and
//! render progress lines, report correctness, and serve results to the
//! review UI.

pub mod commands;
pub mod config;
pub mod files;
pub mod serve;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] foonplan_core::Error),
    #[error("cli: {0}")]
    Usage(String),
}

macro_rules! from_core {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Core(e.into())
            }
        }
    )*};
}

from_core!(
    foonplan_core::error::DocumentError,
    foonplan_core::error::StoreError,
    foonplan_core::error::EmbeddingError,
    foonplan_core::error::ModifyError,
    foonplan_core::error::ProgressError
);

pub type Result<T, E = CliError> = std::result::Result<T, E>;
