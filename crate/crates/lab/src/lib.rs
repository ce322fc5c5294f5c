//! Configuration, experiment pipelines and file output for `dampwave-core`.
//!
//! Every subcommand of the `dampwave` binary maps to one function in
//! [`pipeline`]; [`output`] writes the run directory.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;
pub mod pipeline;
pub mod result;

pub use config::RunConfig;
pub use pipeline::{Options, Outcome};
pub use result::RunResult;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(dampwave_core::Error),
    #[error("certificate hypothesis violated: {0}")]
    Hypothesis(dampwave_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl LabError {
    /// 2 config, 3 solver, 4 certificate hypothesis.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Io(_) => 2,
            LabError::Solver(_) => 3,
            LabError::Hypothesis(_) => 4,
        }
    }
}
