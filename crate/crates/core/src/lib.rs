//! Semiclassical verification laboratory.
//!
//! Compares molecular-dynamics densities built on electronic eigenvalue
//! surfaces against projected densities of discrete Schrödinger eigenstates,
//! and measures how the observable error scales with the nuclear mass `M`.

// `!(x > 0.0)` guards reject NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod caustic;
pub mod dynamics;
mod error;
pub mod harness;
pub mod model;
pub mod numerics;
pub mod projection;
pub mod wkb;

pub use error::{Error, Result};
