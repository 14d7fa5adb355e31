//! Numerical toolkit for prescribing `σ_k`-curvature on the sphere.
//!
//! Modules are layered bottom-up: [`symmetric`] (elementary symmetric
//! functions, Gårding cones, Newton tensors), [`conformal`] (Schouten tensors
//! of conformal metrics and the Möbius/Kelvin toolkit), [`identities`]
//! (divergence identities and integral diagnostics), [`radial`] (cylindrical
//! ODE analysis), [`degree`] (critical points and Brouwer degrees) and
//! [`reduction`] (projected Newton and the homotopy solver).

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conformal;
pub mod degree;
pub mod error;
pub mod identities;
pub mod numerics;
pub mod radial;
pub mod reduction;
pub mod symmetric;

pub use error::{Error, Result};
