use serde::{Deserialize, Serialize};

use super::{norm2, ScalarFn};
use crate::conformal::SphereAxisymField;
use crate::error::{Error, Result};
use crate::numerics::{axisym_weights, gauss_legendre_on, SphereRule};

/// Truncation and resolution for integrals over `R^n`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailPolicy {
    pub radius: f64,
    /// Largest allowed `∫_{R/2<|y|<R} |integrand|` relative to the mass.
    pub tol: f64,
    pub radial: usize,
    pub angular: usize,
}

impl Default for TailPolicy {
    fn default() -> Self {
        Self { radius: 50.0, tol: 1e-3, radial: 96, angular: 8 }
    }
}

/// Polar nodes on `a < |y| < b` with `|y| = tan α / scale`, which resolves
/// algebraic decay at rate `scale`.
fn tan_rule(n: usize, a: f64, b: f64, scale: f64, radial: usize, angular: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let sphere = SphereRule::new(n - 1, angular);
    let (al, wl) = gauss_legendre_on(radial, (a * scale).atan(), (b * scale).atan());
    let mut pts = Vec::with_capacity(al.len() * sphere.len());
    let mut wts = Vec::with_capacity(al.len() * sphere.len());
    for (&alpha, &w) in al.iter().zip(&wl) {
        let r = alpha.tan() / scale;
        let jac = w * r.powi(n as i32 - 1) / (scale * alpha.cos().powi(2));
        for j in 0..sphere.len() {
            pts.push(sphere.point(j).iter().map(|o| r * o).collect());
            wts.push(jac * sphere.weights[j]);
        }
    }
    (pts, wts)
}

/// Polar nodes on the shell `inner < |y − center| < outer`, with panels
/// halving toward the center when `inner == 0`.
fn shell_rule(center: &[f64], inner: f64, outer: f64, radial: usize, angular: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = center.len();
    let sphere = SphereRule::new(n - 1, angular);
    let mut edges = Vec::new();
    if inner == 0.0 {
        edges.push(0.0);
        edges.extend((0..=40).rev().map(|i| outer * 0.5f64.powi(i)));
    } else {
        edges.extend((0..=8).map(|i| inner + (outer - inner) * i as f64 / 8.0));
    }
    let mut pts = Vec::new();
    let mut wts = Vec::new();
    for e in edges.windows(2) {
        let (rs, wr) = gauss_legendre_on(radial, e[0], e[1]);
        for (&r, &w) in rs.iter().zip(&wr) {
            let jac = w * r.powi(n as i32 - 1);
            for j in 0..sphere.len() {
                pts.push(center.iter().zip(sphere.point(j)).map(|(c, o)| c + r * o).collect());
                wts.push(jac * sphere.weights[j]);
            }
        }
    }
    (pts, wts)
}

/// Truncated integrals with the shell tail that was checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KwReport {
    pub values: Vec<f64>,
    /// `∫_{|y|<R} u^{2n/(n−2)}`.
    pub mass: f64,
    /// `∫_{R/2<|y|<R} |integrand|`, summed over components.
    pub tail: f64,
    pub radius: f64,
}

fn integrate_rn<G: Fn(&[f64]) -> Vec<f64>>(
    u: ScalarFn,
    n: usize,
    m: usize,
    g: G,
    policy: &TailPolicy,
) -> Result<KwReport> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 3")));
    }
    let p = 2.0 * n as f64 / (n as f64 - 2.0);
    let dens = |y: &[f64]| -> Result<f64> {
        let v = u(y);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("u = {v} is not positive at {y:?}")));
        }
        Ok(v.powf(p))
    };
    let (pts, wts) = tan_rule(n, 0.0, policy.radius, 1.0, policy.radial, policy.angular);
    let mut values = vec![0.0; m];
    let mut mass = 0.0;
    for (y, w) in pts.iter().zip(&wts) {
        let d = dens(y)?;
        mass += w * d;
        for (v, gi) in values.iter_mut().zip(g(y)) {
            *v += w * d * gi;
        }
    }
    let (pts, wts) = tan_rule(n, policy.radius / 2.0, policy.radius, 1.0, policy.radial / 2, policy.angular);
    let mut tail = 0.0;
    for (y, w) in pts.iter().zip(&wts) {
        let d = dens(y)?;
        tail += w * d * g(y).iter().map(|v| v.abs()).sum::<f64>();
    }
    if tail > policy.tol * mass {
        return Err(Error::Numeric(format!(
            "integrand tail {tail:.3e} on R/2 < |y| < R exceeds {:.1e} of the mass {mass:.3e}",
            policy.tol
        )));
    }
    Ok(KwReport { values, mass, tail, radius: policy.radius })
}

/// `∫ ∂_ℓK u^{2n/(n−2)} dy` for `ℓ = 1..n`, truncated at `policy.radius`.
pub fn kazdan_warner(
    u: ScalarFn,
    grad_k: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    n: usize,
    policy: &TailPolicy,
) -> Result<KwReport> {
    integrate_rn(u, n, n, grad_k, policy)
}

/// `∫ y·∇K u^{2n/(n−2)} dy`, truncated at `policy.radius`.
pub fn pohozaev(
    u: ScalarFn,
    grad_k: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    n: usize,
    policy: &TailPolicy,
) -> Result<KwReport> {
    integrate_rn(u, n, 1, |y| vec![y.iter().zip(grad_k(y)).map(|(a, b)| a * b).sum()], policy)
}

/// Axis component of `∫_{S^n} ⟨∇K, ∇x_{n+1}⟩ v^{2n/(n−2)}` for axisymmetric
/// `K(θ)` with derivative `dk(θ)`; the other components vanish by symmetry.
pub fn kazdan_warner_axisym<D: Fn(f64) -> f64>(v: &SphereAxisymField, dk: D) -> Result<f64> {
    let n = v.n;
    if n < 3 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 3")));
    }
    let p = 2.0 * n as f64 / (n as f64 - 2.0);
    let w = axisym_weights(n, v.intervals());
    let mut total = 0.0;
    for (i, wi) in w.iter().enumerate() {
        let th = v.theta(i);
        if !(v.values[i] > 0.0) {
            return Err(Error::Precondition(format!("v = {} is not positive at node {i}", v.values[i])));
        }
        total += wi * -dk(th) * th.sin() * v.values[i].powf(p);
    }
    Ok(total)
}

/// Mass and moments of `u^{2n/(n−2)}` on `|y| ≤ r0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentSet {
    pub mass: f64,
    pub mu_p: Vec<f64>,
    pub mu_lp: Vec<Vec<f64>>,
    pub r0: f64,
}

pub fn moments(u: ScalarFn, n: usize, r0: f64, radial: usize, angular: usize) -> Result<MomentSet> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 3")));
    }
    if !(r0 > 0.0) {
        return Err(Error::Domain(format!("radius r0 = {r0} must be positive")));
    }
    let p = 2.0 * n as f64 / (n as f64 - 2.0);
    let (pts, wts) = shell_rule(&vec![0.0; n], 0.0, r0, radial, angular.max(2));
    let mut mass = 0.0;
    let mut mu_p = vec![0.0; n];
    let mut mu_lp = vec![vec![0.0; n]; n];
    for (y, w) in pts.iter().zip(&wts) {
        let v = u(y);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("u = {v} is not positive at {y:?}")));
        }
        let d = w * v.powf(p);
        mass += d;
        for a in 0..n {
            mu_p[a] += d * y[a];
            for b in 0..n {
                mu_lp[a][b] += d * y[a] * y[b];
            }
        }
    }
    Ok(MomentSet { mass, mu_p, mu_lp, r0 })
}

/// `λ^d ∫_{|y|≤r0} q(y) (λ/(1+λ²|y|²))^n dy` for `q` homogeneous of degree
/// `d`. Tends to `∫ q(z)(1+|z|²)^{−n} dz` as `λ r0 → ∞`.
pub fn moment_limit(q: ScalarFn, d: f64, n: usize, lam: f64, r0: f64, angular: usize) -> Result<f64> {
    if !(0.0..n as f64).contains(&d) {
        return Err(Error::Domain(format!("homogeneity degree d = {d} must lie in [0, {n})")));
    }
    if n < 3 || !(lam > 0.0) || !(r0 > 0.0) {
        return Err(Error::Domain(format!("need n >= 3, lam > 0, r0 > 0 (n = {n}, lam = {lam}, r0 = {r0})")));
    }
    let (pts, wts) = tan_rule(n, 0.0, r0, lam, 64, angular);
    Ok(pts
        .iter()
        .zip(&wts)
        .map(|(y, w)| w * lam.powf(d) * q(y) * (lam / (1.0 + lam * lam * norm2(y))).powi(n as i32))
        .sum())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Ball { radius: f64 },
    Annulus { inner: f64, outer: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaEnergy {
    /// `sup dist(x, ∂Ω)^{(n−2)/2} u(x)` over the sample nodes.
    pub t_sup: f64,
    /// `∫_Ω u^{2n/(n−2)}`.
    pub energy: f64,
    pub nodes: usize,
}

/// Boundedness functional and energy of `u` on a domain centered at the
/// origin.
pub fn delta_energy_profile(
    u: ScalarFn,
    n: usize,
    domain: Domain,
    radial: usize,
    angular: usize,
) -> Result<DeltaEnergy> {
    if n < 3 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 3")));
    }
    let origin = vec![0.0; n];
    let (inner, outer) = match domain {
        Domain::Ball { radius } => (0.0, radius),
        Domain::Annulus { inner, outer } => (inner, outer),
    };
    if !(0.0 <= inner && inner < outer) {
        return Err(Error::Domain(format!("bad domain {domain:?}")));
    }
    let (mut pts, mut wts) = shell_rule(&origin, inner, outer, radial, angular.max(2));
    if inner == 0.0 {
        pts.push(origin.clone());
        wts.push(0.0);
    }
    let p = 2.0 * n as f64 / (n as f64 - 2.0);
    let e = (n as f64 - 2.0) / 2.0;
    let mut t_sup: f64 = 0.0;
    let mut energy = 0.0;
    for (y, w) in pts.iter().zip(&wts) {
        let v = u(y);
        if !(v > 0.0) {
            return Err(Error::Precondition(format!("u = {v} is not positive at {y:?}")));
        }
        let r = norm2(y).sqrt();
        let dist = if inner == 0.0 { outer - r } else { (r - inner).min(outer - r) };
        t_sup = t_sup.max(dist.max(0.0).powf(e) * v);
        energy += w * v.powf(p);
    }
    Ok(DeltaEnergy { t_sup, energy, nodes: pts.len() })
}
