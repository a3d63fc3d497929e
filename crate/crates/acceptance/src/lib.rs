//! Random structures and independent exact oracles for the acceptance
//! suite, shared with the property tests of `kms-weights`.

#[path = "../../core/tests/common/mod.rs"]
mod common;

pub use common::*;
