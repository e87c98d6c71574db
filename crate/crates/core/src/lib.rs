//! Exact finite-depth experiments on rigidity of odometers, rank-one maps
//! and their finite-group extensions.
//!
//! All measures are rational and computed exactly at a working depth `N`;
//! whatever the depth cannot resolve shows up as interval width.

pub mod cocycles;
pub mod error;
pub mod exact;
pub mod koopman;
pub mod rigidity;
pub mod spectral;
pub mod systems;

pub use error::{Error, Result};
