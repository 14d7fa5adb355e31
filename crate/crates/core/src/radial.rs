//! Rotationally symmetric conformal factors in cylindrical variables.
//!
//! For `u(r)` on `R^n \ {0}` write `t = ln r` and
//! `ξ(t) = −(2/(n−2)) ln u(r) − ln r`. Profiles are integrated in the
//! rapidity `η` with `ξ' = tanh η`, so that `1 − ξ'² = sech² η` stays
//! representable even when `ξ'` is within rounding of 1.

use serde::{Deserialize, Serialize};

use crate::conformal::euclidean::EuclideanField;
use crate::error::{Error, Result};
use crate::numerics::special::{ln_cosh, sech2};
use crate::numerics::{binomial, SphereRule};

/// Default RK4 step.
pub const RK4_STEP: f64 = 1e-3;

/// Sampled trajectory `(t, ξ, ξ')` of a radial factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub n: usize,
    /// Initial value `ξ(0)`; equals the `V_a` parameter for [`integrate_va`].
    pub a: f64,
    pub t: Vec<f64>,
    pub xi: Vec<f64>,
    pub xip: Vec<f64>,
    /// `1 − ξ'²`, kept separately for accuracy.
    pub one_minus_xip2: Vec<f64>,
    /// Rapidity `η = artanh ξ'`.
    pub eta: Vec<f64>,
}

impl RadialProfile {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `u(r)` at node `i`.
    pub fn u(&self, i: usize) -> f64 {
        (-(self.n as f64 - 2.0) / 2.0 * (self.xi[i] + self.t[i])).exp()
    }

    /// Index of the node closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let h = (self.t[self.len() - 1] - self.t[0]) / (self.len() - 1) as f64;
        (((t - self.t[0]) / h).round().max(0.0) as usize).min(self.len() - 1)
    }
}

/// `σ_ℓ` of the radial metric from `(ξ, ξ', ξ'')`.
pub fn sigma_cylindrical(xi: f64, xip: f64, xipp: f64, ell: usize, n: usize) -> Result<f64> {
    if xip.abs() >= 1.0 {
        return Err(Error::Precondition(format!("|ξ'| = {} is not below 1", xip.abs())));
    }
    sigma_cylindrical_om(xi, 1.0 - xip * xip, xipp, ell, n)
}

/// As [`sigma_cylindrical`], taking `1 − ξ'²` directly.
pub fn sigma_cylindrical_om(xi: f64, om: f64, xipp: f64, ell: usize, n: usize) -> Result<f64> {
    if ell == 0 || ell > n {
        return Err(Error::Domain(format!("ell = {ell} outside 1..={n}")));
    }
    if !(om > 0.0) {
        return Err(Error::Precondition("1 − ξ'² is not positive".into()));
    }
    let l = ell as f64;
    let c = 2f64.powf(1.0 - l) * binomial(n - 1, ell - 1);
    Ok(c * (2.0 * l * xi).exp() * om.powf(l - 1.0) * (xipp + (n as f64 - 2.0 * l) / (2.0 * l) * om))
}

/// `h(a) = 1 − e^{−na}`.
pub fn h_of_a(a: f64, n: usize) -> f64 {
    -(-(n as f64) * a).exp_m1()
}

/// `γ(a) = (n−2)/2 · (1 + (1 − h(a)^{2/n})^{1/2})`.
pub fn gamma_of_a(a: f64, n: usize) -> f64 {
    let h = h_of_a(a, n);
    (n as f64 - 2.0) / 2.0 * (1.0 + (1.0 - h.powf(2.0 / n as f64)).max(0.0).sqrt())
}

fn rk4<F: Fn(f64, [f64; 2]) -> [f64; 2]>(f: &F, t: f64, y: [f64; 2], h: f64) -> [f64; 2] {
    let k1 = f(t, y);
    let k2 = f(t + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
    let k3 = f(t + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
    let k4 = f(t + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
    [
        y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

fn integrate<F: Fn(f64, [f64; 2]) -> [f64; 2]>(
    n: usize,
    t0: f64,
    y0: [f64; 2],
    t_max: f64,
    step: f64,
    rhs: F,
) -> Result<RadialProfile> {
    if !(step > 0.0) || !(t_max > t0) {
        return Err(Error::Domain("need step > 0 and t_max > t0".into()));
    }
    let steps = ((t_max - t0) / step).round() as usize;
    let h = (t_max - t0) / steps as f64;
    let mut prof = RadialProfile {
        n,
        a: y0[0],
        t: Vec::with_capacity(steps + 1),
        xi: Vec::with_capacity(steps + 1),
        xip: Vec::with_capacity(steps + 1),
        one_minus_xip2: Vec::with_capacity(steps + 1),
        eta: Vec::with_capacity(steps + 1),
    };
    let mut y = y0;
    for i in 0..=steps {
        let t = t0 + i as f64 * h;
        if !y[0].is_finite() || !y[1].is_finite() {
            return Err(Error::Numeric(format!("profile blew up at t = {t}")));
        }
        prof.t.push(t);
        prof.xi.push(y[0]);
        prof.xip.push(y[1].tanh());
        prof.one_minus_xip2.push(sech2(y[1]));
        prof.eta.push(y[1]);
        if i < steps {
            y = rk4(&rhs, t, y, h);
        }
    }
    Ok(prof)
}

/// Integrates `ξ'' = e^{−nξ}(1 − ξ'²)^{1−n/2}` from `ξ(0) = a`, `ξ'(0) = 0`.
///
/// This is `σ_{n/2} = 2^{−n/2} C(n, n/2)` written in cylindrical variables.
pub fn integrate_va(a: f64, n: usize, t_max: f64, step: f64) -> Result<RadialProfile> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!("n = {n} must be even and at least 4")));
    }
    if !(a >= 0.0) {
        return Err(Error::Domain(format!("a = {a} must be non-negative")));
    }
    let nf = n as f64;
    integrate(n, 0.0, [a, 0.0], t_max, step, |_, y| [y[1].tanh(), (nf * (ln_cosh(y[1]) - y[0])).exp()])
}

/// `E = (1 − ξ'²)^{n/2} − e^{−nξ}` at every node.
pub fn conserved_energy(p: &RadialProfile) -> Vec<f64> {
    let nf = p.n as f64;
    p.one_minus_xip2.iter().zip(&p.xi).map(|(om, xi)| om.powf(nf / 2.0) - (-nf * xi).exp()).collect()
}

/// Largest `|E(t) − h(a)|` over the profile.
pub fn energy_drift(p: &RadialProfile) -> f64 {
    let h = h_of_a(p.a, p.n);
    conserved_energy(p).iter().map(|e| (e - h).abs()).fold(0.0, f64::max)
}

/// Least-squares slope of `−ln u` against `ln r` on `[t_max − 5, t_max]`.
pub fn tail_exponent(p: &RadialProfile) -> Result<f64> {
    let t_end = p.t[p.len() - 1];
    if t_end - p.t[0] < 15.0 {
        return Err(Error::Precondition(format!("profile reaches only t = {t_end}; need 15")));
    }
    let c = (p.n as f64 - 2.0) / 2.0;
    let pts: Vec<(f64, f64)> =
        (0..p.len()).filter(|&i| p.t[i] >= t_end - 5.0).map(|i| (p.t[i], c * (p.xi[i] + p.t[i]))).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    Ok(sxy / sxx)
}

/// Integrates a profile with `σ_k ≥ 0`: `ξ' = tanh η`, `η' = (2k−n)/(2k) + s(t)`
/// with a non-negative forcing `s`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_admissible<S: Fn(f64) -> f64>(
    n: usize,
    k: usize,
    xi0: f64,
    eta0: f64,
    forcing: S,
    t0: f64,
    t1: f64,
    step: f64,
) -> Result<RadialProfile> {
    let base = (2.0 * k as f64 - n as f64) / (2.0 * k as f64);
    integrate(n, t0, [xi0, eta0], t1, step, |t, y| [y[1].tanh(), base + forcing(t).max(0.0)])
}

/// `σ_k` along a profile, with `ξ''` recovered from the rapidity equation.
pub fn sigma_along<S: Fn(f64) -> f64>(p: &RadialProfile, k: usize, forcing: S) -> Result<Vec<f64>> {
    let base = (2.0 * k as f64 - p.n as f64) / (2.0 * k as f64);
    (0..p.len())
        .map(|i| {
            let om = p.one_minus_xip2[i];
            let xipp = (base + forcing(p.t[i]).max(0.0)) * om;
            sigma_cylindrical_om(p.xi[i], om, xipp, k, p.n)
        })
        .collect()
}

/// `ln H = (2k − n)ξ + k ln(1 − ξ'²)`.
pub fn ln_h(p: &RadialProfile, i: usize, k: usize) -> f64 {
    (2.0 * k as f64 - p.n as f64) * p.xi[i] + k as f64 * p.one_minus_xip2[i].ln()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub k: usize,
    pub steps_checked: usize,
    /// Largest `H(t_{i+1}) − H(t_i)` over checked steps.
    pub max_increase: f64,
    /// Largest `H(t_i) − H(t_{i+1})`.
    pub max_decrease: f64,
    pub non_increasing: bool,
}

/// Checks that `H = e^{(2k−n)ξ}(1 − ξ'²)^k` does not increase on steps with
/// `ξ' ≥ 0` at both ends.
pub fn check_h_monotone(p: &RadialProfile, k: usize) -> MonotoneReport {
    let mut inc: f64 = f64::NEG_INFINITY;
    let mut dec: f64 = f64::NEG_INFINITY;
    let mut steps = 0;
    for i in 0..p.len().saturating_sub(1) {
        if p.xip[i] >= 0.0 && p.xip[i + 1] >= 0.0 {
            let d = ln_h(p, i + 1, k).exp() - ln_h(p, i, k).exp();
            inc = inc.max(d);
            dec = dec.max(-d);
            steps += 1;
        }
    }
    let inc = if steps == 0 { 0.0 } else { inc };
    let dec = if steps == 0 { 0.0 } else { dec };
    MonotoneReport { k, steps_checked: steps, max_increase: inc, max_decrease: dec, non_increasing: inc <= 1e-10 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub t1: f64,
    pub t2: f64,
    pub ratio: f64,
    pub upper: f64,
    pub holds: bool,
}

/// `2^{(n−2)k/(2k−n)}`.
pub fn two_sided_upper(n: usize, k: usize) -> Result<f64> {
    if 2 * k <= n {
        return Err(Error::Domain(format!("need 2k > n, got n = {n}, k = {k}")));
    }
    Ok(2f64.powf((n as f64 - 2.0) * k as f64 / (2.0 * k as f64 - n as f64)))
}

/// Checks `1 ≤ r₂^{n−2}u(r₂) / (r₁^{n−2}u(r₁)) ≤ 2^{(n−2)k/(2k−n)}` with
/// `r_i = e^{t_i}`. Requires `r^{(n−2)/2}u` non-increasing, that is `ξ' ≥ 0`,
/// on `[t₁, t₂]`.
pub fn check_two_sided_bound(p: &RadialProfile, t1: f64, t2: f64, k: usize) -> Result<BoundReport> {
    let upper = two_sided_upper(p.n, k)?;
    if !(t2 >= t1) {
        return Err(Error::Domain("need t1 <= t2".into()));
    }
    let (i1, i2) = (p.nearest(t1), p.nearest(t2));
    if let Some(bad) = (i1..=i2).find(|&i| p.xip[i] < 0.0) {
        return Err(Error::Precondition(format!(
            "r^((n-2)/2) u increases near t = {} (ξ' = {:.3e})",
            p.t[bad], p.xip[bad]
        )));
    }
    let c = (p.n as f64 - 2.0) / 2.0;
    let ratio = (c * ((p.t[i2] - p.t[i1]) - (p.xi[i2] - p.xi[i1]))).exp();
    let tol = 1e-8;
    Ok(BoundReport { t1: p.t[i1], t2: p.t[i2], ratio, upper, holds: ratio >= 1.0 - tol && ratio <= upper + tol })
}

/// `û(r) = (|∂B_r|^{−1} ∫_{∂B_r(c)} u^{−2/(n−2)})^{−(n−2)/2}` for a pointwise `u`.
pub fn spherical_average_fn<F: Fn(&[f64]) -> Result<f64>>(
    u: F,
    center: &[f64],
    radius: f64,
    angular: usize,
) -> Result<f64> {
    let n = center.len();
    let rule = SphereRule::new(n - 1, angular);
    let e = -2.0 / (n as f64 - 2.0);
    let mut total = 0.0;
    let mut area = 0.0;
    let mut x = vec![0.0; n];
    for i in 0..rule.len() {
        let w = rule.point(i);
        for d in 0..n {
            x[d] = center[d] + radius * w[d];
        }
        let v = u(&x)?;
        if !(v > 0.0) {
            return Err(Error::Precondition("u not positive on the averaging sphere".into()));
        }
        total += rule.weights[i] * v.powf(e);
        area += rule.weights[i];
    }
    Ok((total / area).powf(-(n as f64 - 2.0) / 2.0))
}

/// [`spherical_average_fn`] for a grid field, interpolated with cubics.
pub fn spherical_average(u: &EuclideanField, center: &[f64], radius: f64, angular: usize) -> Result<f64> {
    spherical_average_fn(
        |x| u.interpolate(x).map_err(|_| Error::Domain(format!("sphere of radius {radius} leaves the grid"))),
        center,
        radius,
        angular,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_values() {
        let n = 4;
        let a = std::f64::consts::LN_2 / n as f64;
        assert!((h_of_a(a, n) - 0.5).abs() < 1e-15);
        assert!((gamma_of_a(a, n) - (1.0 + (1.0 - 0.5f64.sqrt()).sqrt())).abs() < 1e-15);
        assert!((gamma_of_a(a, n) - 1.5412).abs() < 1e-4);
        assert_eq!(gamma_of_a(0.0, 6), 4.0);
    }

    #[test]
    fn bubble_in_cylinder() {
        for n in 3..8 {
            for &t in &[-1.3, 0.0, 0.7, 4.0] {
                let xi = (2.0 * f64::cosh(t)).ln();
                let xip = t.tanh();
                let xipp = 1.0 / t.cosh().powi(2);
                for l in 1..=n {
                    let s = sigma_cylindrical(xi, xip, xipp, l, n).unwrap();
                    let want = 2f64.powi(l as i32) * binomial(n, l);
                    assert!((s - want).abs() < 1e-11 * want, "n={n} l={l}");
                }
            }
        }
        assert!(sigma_cylindrical(0.0, 1.0, 0.0, 1, 4).is_err());
    }

    #[test]
    fn constant_xi() {
        let (a, n) = (0.3, 5);
        for l in 1..=n {
            let s = sigma_cylindrical(a, 0.0, 0.0, l, n).unwrap();
            let lf = l as f64;
            let want = 2f64.powf(1.0 - lf) * binomial(n - 1, l - 1) * (2.0 * lf * a).exp() * (n as f64 - 2.0 * lf)
                / (2.0 * lf);
            assert!((s - want).abs() < 1e-13);
        }
    }

    #[test]
    fn va_zero_is_scaled_bubble() {
        // the a = 0 orbit is a separatrix, so pointwise agreement is only
        // checked while perturbations are still small
        let p = integrate_va(0.0, 4, 3.0, RK4_STEP).unwrap();
        for i in (0..p.len()).step_by(97) {
            assert!((p.xi[i] - ln_cosh(p.t[i])).abs() < 1e-10);
        }
        assert!(energy_drift(&p) < 1e-12);
    }

    #[test]
    fn va_solves_its_equation() {
        let n = 6;
        let p = integrate_va(0.2, n, 5.0, RK4_STEP).unwrap();
        let k = n / 2;
        let target = 2f64.powi(-(k as i32)) * binomial(n, k);
        for i in [0, 1000, 4000] {
            let xipp = (n as f64 * (ln_cosh(p.eta[i]) - p.xi[i])).exp() * p.one_minus_xip2[i];
            let s = sigma_cylindrical_om(p.xi[i], p.one_minus_xip2[i], xipp, k, n).unwrap();
            assert!((s - target).abs() < 1e-12 * target);
        }
    }

    #[test]
    fn bounds_constants() {
        assert_eq!(two_sided_upper(4, 3).unwrap(), 8.0);
        assert_eq!(two_sided_upper(4, 4).unwrap(), 4.0);
        assert!(two_sided_upper(4, 2).is_err());
    }

    #[test]
    fn sigma_zero_profile_keeps_h() {
        let p = integrate_admissible(4, 3, 0.0, 0.1, |_| 0.0, 0.0, 8.0, RK4_STEP).unwrap();
        let r = check_h_monotone(&p, 3);
        assert!(r.max_increase.abs() < 1e-10 && r.max_decrease < 1e-10);
        let s = sigma_along(&p, 3, |_| 0.0).unwrap();
        assert!(s.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn radial_average_is_identity() {
        let u = |x: &[f64]| Ok((1.0 + x.iter().map(|a| a * a).sum::<f64>()).powf(-1.0));
        let v = spherical_average_fn(u, &[0.0; 4], 0.8, 6).unwrap();
        assert!((v - 1.0 / 1.64).abs() < 1e-13);
    }
}
