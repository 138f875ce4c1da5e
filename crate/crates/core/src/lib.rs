// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bath;
pub mod cli;
pub mod discrete_bath;
pub mod error;
pub mod fluctuations;
pub mod gaussian_state;
pub mod landauer;
pub mod numerics;
pub mod oscillator;
pub mod thermo;

pub use bath::{BathParams, DrudePoles};
pub use error::{Error, Result};
pub use fluctuations::EquilibriumMoments;
pub use gaussian_state::GaussianState;
pub use numerics::QuadratureSpec;
