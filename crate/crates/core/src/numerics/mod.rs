//! Numerical building blocks: adaptive quadrature, special functions,
//! polynomial roots and finite differences.

pub mod cubic;
pub mod diff;
pub mod gamma;
pub mod hermite;
pub mod legendre;
pub mod quadrature;
pub mod roots;

pub use cubic::cubic_roots;
pub use gamma::{e1_scaled, ei_scaled, hurwitz_zeta, ln_gamma, log_gamma_complex, trigamma};
pub use hermite::{hermite_wavefunction, hermite_wavefunctions, GaussHermite};
pub use legendre::legendre_p;
pub use quadrature::{
    integrate, integrate_semi_infinite, integrate_with_breakpoints, Estimate, QuadratureError, QuadratureSpec,
};
pub use roots::{brent, brent_expanding};
