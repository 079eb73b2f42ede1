use thiserror::Error;

use crate::exprlang::{EvalError, ParseError};

#[derive(Debug, Error)]
pub enum Error {
    #[error("the zero quaternion has no inverse")]
    ZeroQuaternion,
    #[error("quaternion norm {norm} deviates from 1 by more than 1e-9")]
    NotUnit { norm: f64 },
    #[error("{0}: point maps to infinity")]
    Pole(&'static str),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("degenerate {0}")]
    Degenerate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("field-line trace failed: {0}")]
    Trace(String),
    #[error("linking number requires closed curves")]
    OpenCurve,
    #[error("unknown check `{0}`")]
    UnknownCheck(String),
    #[error("every one of {attempts} candidate sample points was singular")]
    AllSingular { attempts: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
