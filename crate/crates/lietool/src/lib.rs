//! Hall basis B*, coordinates of the second kind, formal expansions, polynomial
//! vector fields and necessary conditions for small-time local controllability
//! of scalar-input control-affine systems.

pub mod algebra_core;
pub mod hall_bstar;
pub mod linalg;
pub mod coord2;
pub mod expansions;
pub mod vector_fields;
pub mod conditions;
pub mod simulate;
pub mod cli;
