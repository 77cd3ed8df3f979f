//! The Hall set B*: order, membership, enumeration and decomposition.

mod basis;
mod decompose;
mod order;

use thiserror::Error;

pub use basis::{basis_layer, basis_up_to_length, enumerate_basis, HallElement};
pub use decompose::{decompose, decompose_series, lie_bracket, LieElement, MAX_DECOMPOSE_LEN};
pub use order::{compare, is_hall};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HallError {
    #[error("{0} is not in G (X0 appears as a left factor)")]
    NotInG(String),
    #[error("{0} is not an element of B*")]
    NotHall(String),
    #[error("bracket length {len} exceeds the decomposition limit {max}")]
    TooLong { len: u32, max: u32 },
    #[error("internal: Hall expansions at bidegree ({n1},{n0}) are linearly dependent")]
    Dependent { n1: u32, n0: u32 },
    #[error("internal: nonzero residual at bidegree ({n1},{n0}) ({nonzero_words} words); not a Lie polynomial")]
    Residual { n1: u32, n0: u32, nonzero_words: usize },
    #[error(transparent)]
    Algebra(#[from] crate::algebra_core::AlgebraError),
}
