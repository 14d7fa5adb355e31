//! Shared numerical building blocks.

pub mod interp;
pub mod poly;
pub mod quadrature;
pub mod special;
pub mod stencil;

pub use poly::{CompiledPoly, Poly};
pub use quadrature::{axisym_weights, gauss_legendre, gauss_legendre_on, BallRule, SphereRule};
pub use special::{ball_volume, binomial, rising_factorial, sphere_area};
