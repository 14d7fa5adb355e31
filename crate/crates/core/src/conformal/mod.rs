//! Schouten tensors of conformal metrics on `R^n` and `S^n`, with the
//! stereographic, Kelvin and Möbius transformations between them.

pub mod euclidean;
pub mod io;
pub mod sphere;

pub use euclidean::{
    bubble, f_from_jet, f_of_psi, kelvin, kelvin_value, psi_from_u, schouten_euclidean, schouten_from_jet,
    EuclideanField, GridSpec,
};
pub use sphere::{
    axis_pullback, axisym_eigs, axisym_eigs_from, mobius_pullback, schouten_sphere_axisym, sigma_axisym,
    sphere_to_stereographic, stereographic_to_sphere, AxisMobius, MobiusMap, SphereAxisymField,
};
