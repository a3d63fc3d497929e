//! Graph weights, 2D CW weights and KMS-weight functionals.

pub mod a2;
pub mod complex;
pub mod cw;
pub mod error;
pub mod fixtures;
pub mod field;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod path_algebra;
pub mod poly;
pub mod relation;
pub mod roots;
pub mod splice;
pub mod weight;

pub use error::{Error, Result};
