//! Axisymmetric conformal factors on `S^n`, stereographic projection and
//! Möbius maps.
//!
//! Axisymmetric fields are functions of the colatitude `θ ∈ [0, π]` measured
//! from the north pole `e_{n+1}`, sampled at `θ_i = iπ/N`. Derivatives at and
//! near the poles use the even reflections `v(−θ) = v(θ)` and
//! `v(2π − θ) = v(θ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::binomial;
use crate::numerics::interp::cubic_1d;
use crate::numerics::stencil::{D1, D2, OFFSETS};
use crate::symmetric::Spectrum;

/// Positive function of the colatitude on a uniform grid with `N` intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereAxisymField {
    pub n: usize,
    pub values: Vec<f64>,
}

/// Reflected grid index for the even extension across both poles.
pub fn reflect_index(j: i64, intervals: usize) -> usize {
    let big = intervals as i64;
    let period = 2 * big;
    let mut j = j.rem_euclid(period);
    if j > big {
        j = period - j;
    }
    j as usize
}

impl SphereAxisymField {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("dimension n = {n} must be at least 3")));
        }
        if values.len() < 5 {
            return Err(Error::Domain("need at least 4 colatitude intervals".into()));
        }
        if let Some(i) = values.iter().position(|&v| !(v > 0.0) || !v.is_finite()) {
            return Err(Error::Domain(format!("conformal factor not positive at node {i}")));
        }
        Ok(Self { n, values })
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, intervals: usize, f: F) -> Result<Self> {
        Self::new(n, (0..=intervals).map(|i| f(theta_node(i, intervals))).collect())
    }

    pub fn constant(n: usize, intervals: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c; intervals + 1])
    }

    pub fn intervals(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        PI / self.intervals() as f64
    }

    pub fn theta(&self, i: usize) -> f64 {
        theta_node(i, self.intervals())
    }

    fn fetch(&self, j: i64) -> f64 {
        self.values[reflect_index(j, self.intervals())]
    }

    /// `(v, v', v'')` at node `i` by fourth-order differences.
    pub fn derivatives(&self, i: usize) -> (f64, f64, f64) {
        let h = self.h();
        let mut d1 = 0.0;
        let mut d2 = 0.0;
        for (k, &o) in OFFSETS.iter().enumerate() {
            let v = self.fetch(i as i64 + o);
            d1 += D1[k] * v;
            d2 += D2[k] * v;
        }
        (self.values[i], d1 / h, d2 / (h * h))
    }

    /// Cubic interpolation at any colatitude.
    pub fn interpolate(&self, theta: f64) -> Result<f64> {
        if !(-1e-12..=PI + 1e-12).contains(&theta) {
            return Err(Error::Numeric(format!("colatitude {theta} outside [0, π]")));
        }
        Ok(cubic_1d(|j| self.fetch(j), 0.0, self.h(), theta.clamp(0.0, PI)))
    }

    /// Reflection `θ ↦ π − θ`.
    pub fn reflected(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self { n: self.n, values }
    }
}

pub fn theta_node(i: usize, intervals: usize) -> f64 {
    if i == intervals {
        PI
    } else {
        i as f64 * PI / intervals as f64
    }
}

/// The two distinct eigenvalues `(λ_θ, λ_τ)` of `A_{g_v}` relative to
/// `g_v = v^{4/(n−2)} g_0`, from `v` and its first two `θ`-derivatives.
///
/// `λ_τ` has multiplicity `n − 1`. At the poles `cot θ · v'` is replaced by its
/// limit `v''`.
pub fn axisym_eigs_from(n: usize, theta: f64, v: f64, dv: f64, d2v: f64) -> (f64, f64) {
    let c = n as f64 - 2.0;
    let s = theta.sin();
    let cot_dv = if s.abs() < 1e-12 { d2v } else { theta.cos() / s * dv };
    let r1 = dv / v;
    let a_theta = 0.5 - 2.0 / c * d2v / v + 2.0 * (n as f64 - 1.0) / (c * c) * r1 * r1;
    let a_tau = 0.5 - 2.0 / c * cot_dv / v - 2.0 / (c * c) * r1 * r1;
    let scale = v.powf(-4.0 / c);
    (scale * a_theta, scale * a_tau)
}

/// `(λ_θ, λ_τ)` at node `i`.
pub fn axisym_eigs(v: &SphereAxisymField, i: usize) -> (f64, f64) {
    let (f, d1, d2) = v.derivatives(i);
    axisym_eigs_from(v.n, v.theta(i), f, d1, d2)
}

/// Spectrum of `A_{g_v}` at node `i`.
pub fn schouten_sphere_axisym(v: &SphereAxisymField, i: usize) -> Result<Spectrum> {
    if i > v.intervals() {
        return Err(Error::Stencil(format!("node {i} beyond grid")));
    }
    let (lt, ls) = axisym_eigs(v, i);
    Spectrum::two_valued(lt, 1, ls, v.n - 1)
}

/// `σ_k` of the spectrum `(λ_θ, λ_τ, …, λ_τ)` and its partial derivatives in
/// `λ_θ` and `λ_τ`.
pub fn sigma_axisym(n: usize, k: usize, l_theta: f64, l_tau: f64) -> (f64, f64, f64) {
    let m = n - 1;
    let a = binomial(m, k);
    let b = binomial(m, k - 1);
    let pk = l_tau.powi(k as i32);
    let pk1 = l_tau.powi(k as i32 - 1);
    let value = a * pk + b * l_theta * pk1;
    let d_theta = b * pk1;
    let d_tau = a * k as f64 * pk1 + if k >= 2 { b * (k - 1) as f64 * l_theta * l_tau.powi(k as i32 - 2) } else { 0.0 };
    (value, d_theta, d_tau)
}

/// Inverse stereographic projection from the north pole.
pub fn stereographic_to_sphere(y: &[f64]) -> Vec<f64> {
    let r2: f64 = y.iter().map(|v| v * v).sum();
    let d = 1.0 + r2;
    let mut x: Vec<f64> = y.iter().map(|v| 2.0 * v / d).collect();
    x.push((r2 - 1.0) / d);
    x
}

/// Stereographic projection from the north pole.
pub fn sphere_to_stereographic(x: &[f64]) -> Result<Vec<f64>> {
    let n = x.len() - 1;
    let d = 1.0 - x[n];
    if d.abs() < 1e-14 {
        return Err(Error::Domain("stereographic projection of the north pole".into()));
    }
    Ok(x[..n].iter().map(|v| v / d).collect())
}

/// `φ_{P,t}`: stereographic coordinates from `P`, dilated by `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    pub p: Vec<f64>,
    pub t: f64,
}

impl MobiusMap {
    pub fn new(p: Vec<f64>, t: f64) -> Result<Self> {
        let norm: f64 = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("pole has norm {norm}")));
        }
        if !(t >= 1.0) || !t.is_finite() {
            return Err(Error::Domain(format!("dilation t = {t} must be at least 1")));
        }
        Ok(Self { p, t })
    }

    pub fn identity(n: usize) -> Self {
        let mut p = vec![0.0; n + 1];
        p[n] = 1.0;
        Self { p, t: 1.0 }
    }

    fn split(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let c: f64 = x.iter().zip(&self.p).map(|(a, b)| a * b).sum();
        (c, x.iter().zip(&self.p).map(|(a, b)| a - c * b).collect())
    }

    /// Image `φ_{P,t}(x)`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_with_scale(x, self.t)
    }

    /// Image under `φ_{P,t}^{-1} = φ_{P,1/t}`.
    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        self.apply_with_scale(x, 1.0 / self.t)
    }

    fn apply_with_scale(&self, x: &[f64], t: f64) -> Vec<f64> {
        let (c, perp) = self.split(x);
        // y = perp / (1 - c), |y|^2 = (1 + c)/(1 - c)
        let d = 1.0 - c;
        if d < 1e-300 {
            return self.p.clone();
        }
        let y2 = (1.0 + c) / d;
        let ty2 = t * t * y2;
        let denom = 1.0 + ty2;
        perp.iter().zip(&self.p).map(|(q, p)| 2.0 * t * q / d / denom + (ty2 - 1.0) / denom * p).collect()
    }

    /// Linear conformal factor `|dφ|` at `x`, so `φ* g_0 = factor² g_0`.
    pub fn factor(&self, x: &[f64]) -> f64 {
        let (c, _) = self.split(x);
        let t = self.t;
        // t(1+|y|^2)/(1+t^2|y|^2) written in c to stay finite at x = P
        t * 2.0 / ((1.0 - c) + t * t * (1.0 + c))
    }

    /// Colatitude-axis parameter `τ` when `P = ±e_{n+1}`.
    pub fn axis_tau(&self) -> Option<f64> {
        let n = self.p.len() - 1;
        let off: f64 = self.p[..n].iter().map(|v| v * v).sum();
        if off > 1e-24 {
            return None;
        }
        Some(if self.p[n] > 0.0 { self.t.ln() } else { -self.t.ln() })
    }
}

/// Möbius map along the symmetry axis, `tan(θ'/2) = e^{−τ} tan(θ/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisMobius {
    pub tau: f64,
}

impl AxisMobius {
    pub fn new(tau: f64) -> Self {
        Self { tau }
    }

    pub fn inverse(self) -> Self {
        Self { tau: -self.tau }
    }

    pub fn map_theta(self, theta: f64) -> f64 {
        let e = (-self.tau).exp();
        2.0 * (e * (0.5 * theta).sin()).atan2((0.5 * theta).cos())
    }

    pub fn factor(self, theta: f64) -> f64 {
        let e = (-self.tau).exp();
        let c = (0.5 * theta).cos();
        let s = (0.5 * theta).sin();
        e / (c * c + e * e * s * s)
    }

    /// `T_φ v(θ) = v(φ(θ)) · factor(θ)^{(n−2)/2}` for a pointwise function.
    pub fn pullback_value<F: Fn(f64) -> f64>(self, n: usize, v: F, theta: f64) -> f64 {
        v(self.map_theta(theta)) * self.factor(theta).powf((n as f64 - 2.0) / 2.0)
    }
}

/// `T_φ v = v∘φ · |det dφ|^{(n−2)/(2n)}` for maps with pole on the symmetry axis.
pub fn mobius_pullback(v: &SphereAxisymField, map: &MobiusMap) -> Result<SphereAxisymField> {
    if map.p.len() != v.n + 1 {
        return Err(Error::Domain("pole dimension does not match field".into()));
    }
    let tau = map
        .axis_tau()
        .ok_or_else(|| Error::Domain("pullback of an axisymmetric field needs a pole on the symmetry axis".into()))?;
    axis_pullback(v, AxisMobius::new(tau))
}

pub fn axis_pullback(v: &SphereAxisymField, phi: AxisMobius) -> Result<SphereAxisymField> {
    let p = (v.n as f64 - 2.0) / 2.0;
    let values = (0..=v.intervals())
        .map(|i| {
            let th = v.theta(i);
            Ok(v.interpolate(phi.map_theta(th))? * phi.factor(th).powf(p))
        })
        .collect::<Result<Vec<_>>>()?;
    SphereAxisymField::new(v.n, values)
}

/// Sphere factor `v` equivalent to a Euclidean factor `u` under
/// stereographic projection: `v(x) = u(y) ((1 + |y|²)/2)^{(n−2)/2}`.
pub fn sphere_factor_from_euclidean(n: usize, u_at_y: f64, y2: f64) -> f64 {
    u_at_y * (0.5 * (1.0 + y2)).powf((n as f64 - 2.0) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::euclidean::schouten_from_jet;
    use crate::numerics::stencil::jet2;

    #[test]
    fn round_metric() {
        for n in 3..7 {
            let v = SphereAxisymField::constant(n, 16, 1.0).unwrap();
            for i in [0, 5, 16] {
                let s = schouten_sphere_axisym(&v, i).unwrap();
                assert!(s.values().iter().all(|x| (x - 0.5).abs() < 1e-14));
            }
            let c: f64 = 1.7;
            let v = SphereAxisymField::constant(n, 16, c).unwrap();
            let s = schouten_sphere_axisym(&v, 3).unwrap();
            let want = c.powf(-4.0 / (n as f64 - 2.0)) / 2.0;
            assert!(s.values().iter().all(|x| (x - want).abs() < 1e-14));
        }
    }

    #[test]
    fn stereographic_examples() {
        assert_eq!(stereographic_to_sphere(&[0.0; 3]), vec![0.0, 0.0, 0.0, -1.0]);
        let x = stereographic_to_sphere(&[0.6, 0.8, 0.0]);
        assert!(x[3].abs() < 1e-16);
        assert!(sphere_to_stereographic(&[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn euclidean_route_agrees() {
        let n = 4;
        let c = (n as f64 - 2.0) / 2.0;
        let prof = |cos_t: f64| 0.5f64.powf(c) * (1.0 + 0.3 * cos_t + 0.1 * cos_t * cos_t);
        let u = |y: &[f64]| {
            let r2: f64 = y.iter().map(|a| a * a).sum();
            prof((r2 - 1.0) / (r2 + 1.0)) * (2.0 / (1.0 + r2)).powf(c)
        };
        let v = SphereAxisymField::from_fn(n, 256, |t| prof(t.cos())).unwrap();
        for i in [40, 128, 200, 250] {
            let th = v.theta(i);
            let r = (0.5 * th).cos() / (0.5 * th).sin();
            let y = [r * 0.6, r * 0.8, 0.0, 0.0];
            let x = stereographic_to_sphere(&y);
            assert!((x[4] - th.cos()).abs() < 1e-13);
            let j = jet2(&|z: &[f64]| u(z), &y, 1e-3 * (1.0 + r));
            let a = schouten_from_jet(j.value, &j.gradient, &j.hessian);
            let lam = crate::symmetric::eigenvalues(&a).unwrap();
            let (lt, ls) = axisym_eigs(&v, i);
            let mut ours = vec![lt, ls, ls, ls];
            ours.sort_by(f64::total_cmp);
            for (p, q) in ours.iter().zip(lam.values()) {
                assert!((p - q).abs() < 1e-6 * (1.0 + q.abs()), "i={i}: {ours:?} vs {:?}", lam.values());
            }
        }
        // pole nodes against the analytic limit
        let (lt, ls) = axisym_eigs(&v, 0);
        assert!((lt - ls).abs() < 1e-6);
    }

    #[test]
    fn pullback_identity_and_round() {
        let v = SphereAxisymField::from_fn(4, 64, |t| 1.0 + 0.2 * t.cos()).unwrap();
        let id = MobiusMap::identity(4);
        let w = mobius_pullback(&v, &id).unwrap();
        for (a, b) in v.values.iter().zip(&w.values) {
            assert!((a - b).abs() < 1e-14);
        }
        let one = SphereAxisymField::constant(4, 256, 1.0).unwrap();
        let mut p = vec![0.0; 5];
        p[4] = -1.0;
        let w = mobius_pullback(&one, &MobiusMap::new(p, 2.0).unwrap()).unwrap();
        for i in 0..=256 {
            let s = schouten_sphere_axisym(&w, i).unwrap();
            for x in s.values() {
                assert!((x - 0.5).abs() < 1e-6, "{x}");
            }
        }
    }

    #[test]
    fn general_map_matches_axis_map() {
        let mut p = vec![0.0; 4];
        p[3] = 1.0;
        let map = MobiusMap::new(p, 3.0).unwrap();
        let ax = AxisMobius::new(3f64.ln());
        for &th in &[0.0, 0.4, 1.5, 2.9, PI] {
            let x = [th.sin(), 0.0, 0.0, th.cos()];
            let y = map.apply(&x);
            let th2 = ax.map_theta(th);
            assert!((y[3] - th2.cos()).abs() < 1e-13 && (y[0] - th2.sin()).abs() < 1e-13);
            assert!((map.factor(&x) - ax.factor(th)).abs() < 1e-13);
            let back = map.apply_inverse(&y);
            for (a, b) in back.iter().zip(&x) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn axis_sigma_matches_spectrum() {
        let (lt, ls) = (0.7, -0.2);
        for k in 1..=5 {
            let s = crate::symmetric::sigma(&Spectrum::two_valued(lt, 1, ls, 4).unwrap(), k).unwrap();
            let (v, dt, ds) = sigma_axisym(5, k, lt, ls);
            assert!((s - v).abs() < 1e-14);
            let h = 1e-6;
            let fd_t = (sigma_axisym(5, k, lt + h, ls).0 - sigma_axisym(5, k, lt - h, ls).0) / (2.0 * h);
            let fd_s = (sigma_axisym(5, k, lt, ls + h).0 - sigma_axisym(5, k, lt, ls - h).0) / (2.0 * h);
            assert!((dt - fd_t).abs() < 1e-8 && (ds - fd_s).abs() < 1e-8);
        }
    }
}
