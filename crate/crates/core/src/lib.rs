//! Curvature energies `E^p = ¼∫(1+|A|²)^{p/2} dμ` and `W^p = ¼∫(1+|H|²)^{p/2} dμ`
//! on discretized immersed surfaces in `R^n`: pointwise geometry, quadrature,
//! exact discrete gradients, Euler–Lagrange coefficient fields, steepest
//! descent, and a battery of geometric diagnostics.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod cli;
pub mod diagnostics;
pub mod energy;
pub mod geometry;
pub mod optimize;
pub(crate) mod real;
pub mod rng;
pub mod sum;
pub mod surfaces;
pub mod variation;

pub use error::{PcurvError, Result};
pub use geometry::{curvature_data, christoffel, Christoffel, CurvatureData, Jet2};
pub use energy::{energy, energy_ep, energy_value, energy_wp, scaling_check, willmore, EnergyReport, Functional, WillmoreReport};
pub use surfaces::Surface;
