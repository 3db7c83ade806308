//! A 2D incompressible Boussinesq solver in vorticity–streamfunction form on
//! horizontally periodic channels with curved walls and Navier-slip boundary
//! conditions, together with heat-transport diagnostics, identity checks and
//! a parameter-sweep harness.

pub mod elliptic;
pub mod error;
pub mod fields;
pub mod geometry;

pub use error::{Error, Result};
