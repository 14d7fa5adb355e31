use crate::conformal::{axis_pullback, AxisMobius, SphereAxisymField};
use crate::error::{Error, Result};
use crate::numerics::{axisym_weights, sphere_area};

/// `Πf = f − (n+1)|S^n|^{−1} x·∫ y f(y) dv` for an axisymmetric `f` on the
/// colatitude grid. Only the `x_{n+1} = cos θ` component survives the
/// integral by symmetry.
pub fn project_pi(f: &[f64], n: usize) -> Vec<f64> {
    let big = f.len() - 1;
    let w = axisym_weights(n, big);
    project_with(f, n, &w)
}

pub(crate) fn project_with(f: &[f64], n: usize, weights: &[f64]) -> Vec<f64> {
    let big = f.len() - 1;
    let c = first_moment(f, weights) * (n as f64 + 1.0) / sphere_area(n);
    f.iter().enumerate().map(|(i, v)| v - c * theta(i, big).cos()).collect()
}

/// `∫ x_{n+1} f dv`.
pub(crate) fn first_moment(f: &[f64], weights: &[f64]) -> f64 {
    let big = f.len() - 1;
    f.iter().zip(weights).enumerate().map(|(i, (v, w))| w * v * theta(i, big).cos()).sum()
}

fn theta(i: usize, big: usize) -> f64 {
    crate::conformal::sphere::theta_node(i, big)
}

/// `∫ x w^{2n/(n−2)} dv / ∫ w^{2n/(n−2)} dv` as a vector in `R^{n+1}`; the
/// first `n` components vanish by symmetry.
pub fn center_of_mass(w: &SphereAxisymField) -> Vec<f64> {
    let weights = axisym_weights(w.n, w.intervals());
    let mut out = vec![0.0; w.n + 1];
    out[w.n] = com_last(w, &weights);
    out
}

pub(crate) fn com_last(w: &SphereAxisymField, weights: &[f64]) -> f64 {
    let p = 2.0 * w.n as f64 / (w.n as f64 - 2.0);
    let dens: Vec<f64> = w.values.iter().map(|v| v.powf(p)).collect();
    let mass: f64 = dens.iter().zip(weights).map(|(d, q)| d * q).sum();
    first_moment(&dens, weights) / mass
}

/// Axial parameter of `ξ`: the map `φ_{P,t}` with `P = ξ/|ξ|`,
/// `t = 1/(1 − |ξ|)` acts on colatitudes as [`AxisMobius`] with this `τ`.
pub fn axis_tau(xi: &[f64]) -> Result<f64> {
    let (&s, rest) = xi.split_last().ok_or_else(|| Error::Domain("ξ is empty".into()))?;
    if rest.iter().any(|v| *v != 0.0) {
        return Err(Error::Domain("ξ must lie on the symmetry axis".into()));
    }
    if !(s.abs() < 1.0) {
        return Err(Error::Domain(format!("|ξ| = {} must be below 1", s.abs())));
    }
    Ok(-s.signum() * (1.0 - s.abs()).ln())
}

/// Axis point `ξ = s e_{n+1}`.
pub fn axis_xi(n: usize, s: f64) -> Vec<f64> {
    let mut xi = vec![0.0; n + 1];
    xi[n] = s;
    xi
}

/// `π(w, ξ) = T_{φ^{-1}}(w)` with `φ = φ_{P,t}`; `π(w, 0) = w`.
///
/// `w` must lie in `S_0` (vanishing center of mass, to `1e-6`).
pub fn pi_parametrize(w: &SphereAxisymField, xi: &[f64]) -> Result<SphereAxisymField> {
    if xi.len() != w.n + 1 {
        return Err(Error::Domain(format!("ξ must lie in R^{}", w.n + 1)));
    }
    let tau = axis_tau(xi)?;
    let com = center_of_mass(w)[w.n];
    if com.abs() > 1e-6 {
        return Err(Error::Precondition(format!("w is not in S_0: center of mass {com:.3e}")));
    }
    if tau == 0.0 {
        return Ok(w.clone());
    }
    axis_pullback(w, AxisMobius::new(tau).inverse())
}
