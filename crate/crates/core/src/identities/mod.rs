//! Numerical verification of the divergence identities for Newton tensors of
//! `F[ψ]`, plus integral diagnostics (Kazdan–Warner/Pohozaev, moments,
//! Cacciopoli integrals, small-energy profiles) and a convexity check.
//!
//! Functions take `ψ` (or `u`, `w`) as smooth closures and evaluate both
//! sides of each identity by fourth-order central differences at sample
//! points. Refining `h` exposes the observed order.

mod convexity;
mod divergence;
mod integrals;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use convexity::{check_convexity, ConvexityReport};
pub use divergence::{
    cacciopoli_sides, check_divergence, check_summed_identity, check_weighted_divergence, specialization_coefficients,
    CacciopoliConfig, CacciopoliReport, CacciopoliVariant, CoefficientReport,
};
pub use integrals::{
    delta_energy_profile, kazdan_warner, kazdan_warner_axisym, moment_limit, moments, pohozaev, DeltaEnergy, Domain,
    KwReport, MomentSet, TailPolicy,
};

/// A smooth real function on `R^n` usable across threads.
pub type ScalarFn<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Default refinement ladder for identity checks.
pub const DEFAULT_STEPS: [f64; 3] = [0.1, 0.05, 0.025];

/// Residuals below this are treated as exact and get no order estimate.
const RESIDUAL_FLOOR: f64 = 1e-13;

/// Residual at one grid spacing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Level {
    pub h: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentityReport {
    pub id: String,
    pub n: usize,
    pub points: usize,
    /// One entry per step, coarse to fine.
    pub levels: Vec<Level>,
    /// Observed order between consecutive levels.
    pub orders: Vec<f64>,
    /// Smallest observed order, present once two resolved levels exist.
    pub order: Option<f64>,
    /// Residual at the finest level.
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<CoefficientReport>,
}

impl IdentityReport {
    pub(crate) fn from_levels(id: impl Into<String>, n: usize, points: usize, levels: Vec<Level>) -> Self {
        let mut orders = Vec::new();
        for w in levels.windows(2) {
            if w[0].residual > RESIDUAL_FLOOR && w[1].residual > RESIDUAL_FLOOR {
                orders.push((w[0].residual / w[1].residual).ln() / (w[0].h / w[1].h).ln());
            }
        }
        let order = orders.iter().copied().reduce(f64::min);
        let residual = levels.last().map_or(0.0, |l| l.residual);
        Self { id: id.into(), n, points, levels, orders, order, residual, coefficients: None }
    }
}

/// `count` points uniform in the ball `B_radius(0) ⊂ R^n`, reproducible by seed.
pub fn sample_points(n: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            out.push(x.into_iter().map(|v| v * radius).collect());
        }
    }
    out
}

pub(crate) fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_needs_two_levels() {
        let one = IdentityReport::from_levels("x", 3, 1, vec![Level { h: 0.1, residual: 1e-5 }]);
        assert!(one.order.is_none());
        let two = IdentityReport::from_levels(
            "x",
            3,
            1,
            vec![Level { h: 0.1, residual: 1.6e-5 }, Level { h: 0.05, residual: 1e-6 }],
        );
        assert!((two.order.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn samples_lie_in_ball() {
        let p = sample_points(4, 50, 0.5, 1);
        assert_eq!(p.len(), 50);
        assert!(p.iter().all(|x| norm2(x) <= 0.25 + 1e-15));
        assert_eq!(p, sample_points(4, 50, 0.5, 1));
    }
}
