//! Polynomial vector fields over the rationals, their brackets, the evaluation
//! b -> f_b(0) and a zoo of example systems.

mod field;
mod mpoly;
mod zoo;

use thiserror::Error;

pub use field::{eval_bracket, eval_lie, vf_bracket, Evaluator, ExpectedValue, PolyVectorField, SystemDef};
pub use mpoly::MPoly;
pub use zoo::{check_zoo, zoo, zoo_list, ZooMismatch, ZooReport, INSTANCES, REGRESSION_LEN};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VfError {
    #[error("dimension mismatch ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },
    #[error("f0(0) must vanish; component {0} does not")]
    DriftNotZero(usize),
    #[error("bad polynomial: {0}")]
    BadPolynomial(String),
    #[error("bad system file: {0}")]
    Json(String),
    #[error("unknown system '{name}'; available: {available}")]
    UnknownSystem { name: String, available: String },
    #[error("bad parameters for {name}: {msg}")]
    BadParameters { name: String, msg: String },
}
