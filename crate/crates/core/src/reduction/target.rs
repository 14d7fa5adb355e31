use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Poly;

/// An axisymmetric function on `S^n` as a cosine series in the colatitude,
/// `K(θ) = Σ_m a_m cos(mθ)`.
///
/// A polynomial in `x_{n+1} = cos θ` of degree `d` is a cosine series of the
/// same degree, so both input forms share this representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisymK {
    pub coeffs: Vec<f64>,
}

impl AxisymK {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("cosine coefficients must be finite and non-empty".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: f64) -> Self {
        Self { coeffs: vec![c] }
    }

    /// Interpolating cosine series through samples on the uniform grid
    /// `θ_j = jπ/M`, `j = 0..=M` (both poles included).
    pub fn from_profile(values: &[f64]) -> Result<Self> {
        let m = values
            .len()
            .checked_sub(1)
            .filter(|&m| m >= 1)
            .ok_or_else(|| Error::Domain("a colatitude profile needs at least two samples".into()))?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("profile contains non-finite samples".into()));
        }
        let half = |j: usize| if j == 0 || j == m { 0.5 } else { 1.0 };
        let coeffs = (0..=m)
            .map(|q| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, f)| half(j) * f * (std::f64::consts::PI * (q * j) as f64 / m as f64).cos())
                    .sum();
                half(q) * 2.0 / m as f64 * s
            })
            .collect();
        Self::new(coeffs)
    }

    /// `K` from a polynomial in `R^{n+1}` that depends on the last coordinate only.
    pub fn from_poly(k: &Poly) -> Result<Self> {
        if !k.depends_only_on_last() {
            return Err(Error::Domain("K must depend on x_{n+1} only to be axisymmetric".into()));
        }
        let d = k.degree().max(1) as usize;
        let mut x = vec![0.0; k.dim];
        let values: Vec<f64> = (0..=d)
            .map(|j| {
                x[k.dim - 1] = (std::f64::consts::PI * j as f64 / d as f64).cos();
                k.eval(&x)
            })
            .collect();
        Self::from_profile(&values)
    }

    pub fn value(&self, theta: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(m, a)| a * (m as f64 * theta).cos()).sum()
    }

    /// `dK/dθ`.
    pub fn dtheta(&self, theta: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(m, a)| -(m as f64) * a * (m as f64 * theta).sin()).sum()
    }

    /// `d²K/dθ²`.
    pub fn d2theta(&self, theta: f64) -> f64 {
        self.coeffs.iter().enumerate().map(|(m, a)| -((m * m) as f64) * a * (m as f64 * theta).cos()).sum()
    }

    /// `K(π − θ)`.
    pub fn reflected(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().map(|(m, a)| if m % 2 == 0 { *a } else { -a }).collect();
        Self { coeffs }
    }

    /// `μK + (1 − μ)c`.
    pub fn blend(&self, mu: f64, c: f64) -> Self {
        let mut coeffs: Vec<f64> = self.coeffs.iter().map(|a| mu * a).collect();
        coeffs[0] += (1.0 - mu) * c;
        Self { coeffs }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|a| *a == 0.0)
    }

    /// Smallest value over a fine colatitude sample.
    pub fn min_value(&self) -> f64 {
        let m = 8 * self.coeffs.len() + 64;
        (0..=m).map(|j| self.value(std::f64::consts::PI * j as f64 / m as f64)).fold(f64::INFINITY, f64::min)
    }
}

/// A critical point or critical latitude of an axisymmetric `K`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisCritical {
    pub theta: f64,
    pub value: f64,
    /// `d²K/dθ²`, the Hessian in the normal direction.
    pub normal_hessian: f64,
    /// Round-sphere Laplacian.
    pub laplacian: f64,
    /// `true` at the poles, `false` for an `(n−1)`-sphere of latitude.
    pub isolated: bool,
    /// Signed contribution to the count over `Crit₋`.
    pub contribution: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AxisCriterion {
    pub n: usize,
    pub critical: Vec<AxisCritical>,
    pub deg_crit_minus: i64,
    pub holds: bool,
}

/// The degree criterion `deg(∇K, Crit₋) ≠ (−1)^n` for axisymmetric `K`.
///
/// The poles are isolated critical points with Hessian `K''·I`. Interior
/// zeros of `K'` are critical spheres `S^{n−1}`, which enter with their
/// normal index times `χ(S^{n−1}) = 1 + (−1)^{n−1}` (the count for a small
/// Morse perturbation).
pub fn axis_criterion(k: &AxisymK, n: usize, tol: f64) -> Result<AxisCriterion> {
    use std::f64::consts::PI;
    if n < 2 {
        return Err(Error::Domain(format!("dimension n = {n} must be at least 2")));
    }
    let parity = |i: usize| if i.is_multiple_of(2) { 1i64 } else { -1 };
    let mut critical = Vec::new();
    for theta in [0.0, PI] {
        let h = k.d2theta(theta);
        let lap = n as f64 * h;
        if lap.abs() <= tol {
            return Err(Error::NondegeneracyViolation { x: pole(n, theta), value: lap.abs() });
        }
        let index = if h < 0.0 { n } else { 0 };
        critical.push(AxisCritical {
            theta,
            value: k.value(theta),
            normal_hessian: h,
            laplacian: lap,
            isolated: true,
            contribution: if lap < 0.0 { parity(index) } else { 0 },
        });
    }
    let samples = 64 * k.coeffs.len() + 256;
    let at = |j: usize| PI * j as f64 / samples as f64;
    for j in 0..samples {
        let (a, b) = (at(j), at(j + 1));
        let (fa, fb) = (k.dtheta(a), k.dtheta(b));
        let root = if j > 0 && fa == 0.0 {
            a
        } else if fa * fb < 0.0 {
            bisect(|t| k.dtheta(t), a, b)
        } else {
            continue;
        };
        let h = k.d2theta(root);
        // K' = 0 there, so the Laplacian reduces to K''
        if h.abs() <= tol {
            let mut x = pole(n, root);
            x[0] = root.sin();
            return Err(Error::NondegeneracyViolation { x, value: h.abs() });
        }
        let chi = 1 + parity(n - 1);
        critical.push(AxisCritical {
            theta: root,
            value: k.value(root),
            normal_hessian: h,
            laplacian: h,
            isolated: false,
            contribution: if h < 0.0 { -chi } else { 0 },
        });
    }
    critical.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let deg_crit_minus = critical.iter().map(|c| c.contribution).sum();
    Ok(AxisCriterion { n, critical, deg_crit_minus, holds: deg_crit_minus != parity(n) })
}

fn pole(n: usize, theta: f64) -> Vec<f64> {
    let mut x = vec![0.0; n + 1];
    x[n] = theta.cos();
    x
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
