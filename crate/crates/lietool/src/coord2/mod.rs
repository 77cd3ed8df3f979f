//! Controls, iterated primitives, coordinates of the second kind and Chen coefficients.

mod closed_form;
mod inequalities;
mod poly;
mod signal;
mod xi;

use thiserror::Error;

pub use closed_form::{alpha, beta, gamma, xi_closed_form};
pub use inequalities::{check_inequalities, rough_constant, InequalityCheck, InequalityReport, Status};
pub use poly::{PiecewisePoly, Poly};
pub use signal::{primitive, random_piecewise_constant, random_piecewise_poly, ControlSignal, Sampled, Signal};
pub use xi::{ad_factorization, chen_coefficient, xi, xi_function, XiEvaluator, XiValue};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Coord2Error {
    #[error("{0} is not an element of B*")]
    NotHall(String),
    #[error("{0} is not in a family with a closed-form coordinate")]
    NoClosedForm(String),
    #[error("invalid control: {0}")]
    BadControl(String),
}
