//! Simulation of momentum-conserving position measurements.
//!
//! Two measurement models are provided: a four-particle model whose pointer
//! commutes with total momentum ([`ozawa_model`]) and a two-particle dilation
//! model whose pointer does not ([`alt_model`]). For both, the crate computes
//! the outcome statistics by brute-force quadrature and by the closed-form
//! error density, the repeatability width of the joint object/outcome
//! distribution ([`repeatability`]), and the trade-off inequalities between
//! noise and apparatus momentum spread ([`way_bounds`]).
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`. Units have `hbar = 1`.

pub mod alt_model;
pub mod error;
pub mod grid_core;
pub mod ozawa_model;
pub mod policy;
mod quadrature;
pub mod repeatability;
pub mod scalar;
pub mod way_bounds;

pub use error::{Error, Result};
pub use grid_core::{Density, GridSpec, ProbeFamily, WaveFunction};
pub use policy::NumericPolicy;
pub use repeatability::{IntervalFamily, JointDensity};
pub use scalar::Real;

pub type Grid64 = GridSpec<f64>;
pub type Grid32 = GridSpec<f32>;
pub type Density64 = Density<f64>;
pub type Density32 = Density<f32>;
pub type WaveFunction64 = WaveFunction<f64>;
pub type WaveFunction32 = WaveFunction<f32>;
pub type ProbeFamily64 = ProbeFamily<f64>;
pub type JointDensity64 = JointDensity<f64>;

/// The two measurement models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    /// Four-particle model; the pointer commutes with total momentum.
    Ozawa,
    /// Two-particle dilation model; the pointer is the probe position.
    Alt,
}
