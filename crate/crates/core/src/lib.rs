//! Nutrient-prey-predator chemostat analysis.
//!
//! The model is
//!
//! ```text
//! N' = (mu - N) D - P f1(N)
//! P' = gamma1 P f1(N) - D1 P - Z f2(P)
//! Z' = gamma2 Z f2(P) - D2 Z
//! ```
//!
//! with feed concentration `mu` as the bifurcation parameter. The crate
//! computes the equilibria and their stability, factors the characteristic
//! polynomial at the coexistence equilibrium, locates the Hopf point where
//! the complex eigenvalue pair crosses the imaginary axis, and integrates
//! trajectories to observe the resulting limit cycle.

// `!(x > 0.0)` guards are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod cubic;
pub mod dynamics;
pub mod equilibria;
pub mod error;
pub mod hopf;
pub mod integrate;
pub mod params;
pub mod quad;
pub mod response;
pub mod roots;
pub mod stability;
pub mod verify;

pub use error::{Error, Result};
pub use params::{presets, Parameters, State};
pub use response::Response;
