//! Critical points of `K` on `S^n`, Morse-index degree counts, Brouwer
//! degrees of ball maps, and the finite-dimensional map `G`.

mod brouwer;
mod critical;
mod gmap;

use serde::{Deserialize, Serialize};

pub use brouwer::{
    brouwer_degree, degree_scan, find_zeros, jacobian, BallMapSample, BrouwerConfig, DegreeReport, VectorMap, Zero,
};
pub use critical::{
    deg_crit_minus, find_critical_points, morse_sum, sphere_gradient, sphere_hessian, sphere_laplacian, tangent_frame,
    CritClass, CriticalConfig, CriticalPointRecord,
};
pub use gmap::{g_of_xi, g_of_xi_compiled, GRule};

use crate::error::Result;
use crate::numerics::Poly;

/// Radii scanned for `deg(G, B_s, 0)`. Zeros of `G` can sit at `|ξ|`
/// beyond 0.9 for moderately varying `K`, so the scan stays near the boundary.
pub const DEFAULT_RADII: [f64; 3] = [0.98, 0.99, 0.995];

/// Everything the degree criterion needs for one `K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeAnalysis {
    pub n: usize,
    pub records: Vec<CriticalPointRecord>,
    pub deg_crit_minus: i64,
    pub morse_sum: i64,
    pub g_degrees: Vec<DegreeReport>,
    /// `−(−1)^n + deg_crit_minus`.
    pub predicted_g_degree: i64,
    /// `deg_crit_minus ≠ (−1)^n`.
    pub criterion_holds: bool,
}

/// Critical points, the signed count over `Crit₋`, and `deg(G, B_s, 0)` for
/// each radius.
pub fn analyze(k: &Poly, radii: &[f64], crit: &CriticalConfig, brouwer: &BrouwerConfig) -> Result<DegreeAnalysis> {
    let n = k.dim - 1;
    let records = find_critical_points(k, crit)?;
    let dm = deg_crit_minus(&records);
    let rule = GRule::for_poly(k);
    let kc = k.compile();
    let g = |xi: &[f64]| g_of_xi_compiled(&kc, k.dim, xi, &rule);
    let g_degrees = degree_scan(&g, n + 1, radii, brouwer)?;
    let parity = critical::sign_pow(n);
    Ok(DegreeAnalysis {
        n,
        morse_sum: morse_sum(&records),
        deg_crit_minus: dm,
        records,
        g_degrees,
        predicted_g_degree: -parity + dm,
        criterion_holds: dm != parity,
    })
}
