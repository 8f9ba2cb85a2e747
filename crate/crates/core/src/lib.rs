//! Exact solvers for constraint satisfaction and valued constraint
//! satisfaction over piecewise linear homogeneous cost functions on the
//! rationals.

pub mod analysis;
pub mod csp;
pub mod error;
pub mod fm;
pub mod limits;
pub mod numbers;
pub mod qe;
pub mod sampler;
pub mod syntax;
pub mod vcsp;
mod tables;

pub use error::{Error, Result};
pub use limits::Limits;
