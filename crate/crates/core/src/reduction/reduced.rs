use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::conformal::{AxisMobius, SphereAxisymField};
use crate::error::{Error, Result};
use crate::numerics::{axisym_weights, sphere_area};

use super::operator::{k_mu, linearize, sigma_field};
use super::projection::{axis_tau, com_last, first_moment, project_with};
use super::AxisymK;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReducedConfig {
    pub intervals: usize,
    /// Sup norm of the projected residual at convergence.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ReducedConfig {
    fn default() -> Self {
        Self { intervals: 256, tol: 1e-9, max_iter: 40 }
    }
}

/// `w_{ξ,μ}` and `Λ_{ξ,μ}` on the axisymmetric slice.
///
/// The equation is solved in the frame of `w`:
/// `σ_k(λ(A_{g_w})) = K_μ∘φ_{P,t} − Λ·x` with `w ∈ S_0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReducedSolution {
    pub n: usize,
    pub k: usize,
    pub mu: f64,
    pub xi: Vec<f64>,
    pub w: SphereAxisymField,
    /// `−(n+1)|S^n|^{−1} ∫ F x dv`; the first `n` components vanish by symmetry.
    pub lambda: Vec<f64>,
    /// Sup norm of `Π F`.
    pub projected_residual: f64,
    pub center_of_mass: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

impl ReducedSolution {
    /// `sup |w − 1|`.
    pub fn deviation(&self) -> f64 {
        self.w.values.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// `K_μ∘φ` at the grid nodes of an `intervals` grid.
fn pulled_target(k_fn: &AxisymK, n: usize, k: usize, mu: f64, tau: f64, intervals: usize) -> Vec<f64> {
    let km = k_mu(k_fn, n, k, mu);
    let phi = AxisMobius::new(tau);
    (0..=intervals).map(|i| km.value(phi.map_theta(crate::conformal::sphere::theta_node(i, intervals)))).collect()
}

struct Bordered {
    target: Vec<f64>,
    weights: Vec<f64>,
    n: usize,
    k: usize,
}

impl Bordered {
    /// `(σ_k(w) − K_μ∘φ + ℓ cos θ, ∫ x_{n+1} w^p / ∫ w^p)`.
    fn eval(&self, w: &SphereAxisymField, ell: f64) -> Result<Vec<f64>> {
        let s = sigma_field(w, self.k)?;
        let mut out: Vec<f64> =
            s.iter().zip(&self.target).enumerate().map(|(i, (s, t))| s - t + ell * w.theta(i).cos()).collect();
        out.push(com_last(w, &self.weights));
        Ok(out)
    }

    fn jacobian(&self, w: &SphereAxisymField) -> Result<DMatrix<f64>> {
        let big = w.intervals();
        let lin = linearize(w, self.k)?;
        let mut jac = DMatrix::zeros(big + 2, big + 2);
        jac.view_mut((0, 0), (big + 1, big + 1)).copy_from(&lin);
        let p = 2.0 * self.n as f64 / (self.n as f64 - 2.0);
        let dens: Vec<f64> = w.values.iter().map(|v| v.powf(p)).collect();
        let mass: f64 = dens.iter().zip(&self.weights).map(|(d, q)| d * q).sum();
        let moment = first_moment(&dens, &self.weights);
        for i in 0..=big {
            let c = w.theta(i).cos();
            jac[(i, big + 1)] = c;
            let dd = self.weights[i] * p * w.values[i].powf(p - 1.0);
            jac[(big + 1, i)] = (dd * c * mass - moment * dd) / (mass * mass);
        }
        Ok(jac)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

/// Solve `Π(F_μ[π(w, ξ)]) = 0` for `w ∈ S_0` near `1` by bordered Newton:
/// the multiplier of `cos θ` absorbs the first-harmonic part of the residual
/// and the mass-center row fixes the kernel direction.
pub fn solve_reduced(
    k_fn: &AxisymK,
    n: usize,
    k: usize,
    xi: &[f64],
    mu: f64,
    cfg: &ReducedConfig,
) -> Result<ReducedSolution> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("mu = {mu} outside [0, 1]")));
    }
    if xi.len() != n + 1 {
        return Err(Error::Domain(format!("ξ must lie in R^{}", n + 1)));
    }
    let tau = axis_tau(xi)?;
    let big = cfg.intervals;
    let sys = Bordered { target: pulled_target(k_fn, n, k, mu, tau, big), weights: axisym_weights(n, big), n, k };
    let mut w = SphereAxisymField::constant(n, big, 1.0)?;
    let mut ell = 0.0;
    let mut f = sys.eval(&w, ell)?;
    let mut trace = vec![norm(&f)];
    let mut iterations = 0;
    loop {
        let proj = project_with(&f[..=big], n, &sys.weights);
        if sup(&proj) <= cfg.tol && f[big + 1].abs() <= cfg.tol {
            break;
        }
        if iterations >= cfg.max_iter {
            return Err(Error::NoConvergence { iterations, trace });
        }
        iterations += 1;
        let jac = sys.jacobian(&w)?;
        let step = jac
            .lu()
            .solve(&-DVector::from_column_slice(&f))
            .ok_or_else(|| Error::Numeric("singular bordered Jacobian".into()))?;
        let f0 = norm(&f);
        let mut lam = 1.0;
        loop {
            let vals: Vec<f64> = w.values.iter().zip(step.iter()).map(|(a, s)| a + lam * s).collect();
            let trial_ell = ell + lam * step[big + 1];
            let accepted = SphereAxisymField::new(n, vals).ok().and_then(|tw| match sys.eval(&tw, trial_ell) {
                Ok(tf) if norm(&tf) < (1.0 - 1e-4 * lam) * f0 => Some((tw, tf)),
                _ => None,
            });
            if let Some((tw, tf)) = accepted {
                w = tw;
                ell = trial_ell;
                f = tf;
                break;
            }
            lam *= 0.5;
            if lam < 1e-4 {
                return Err(Error::NoConvergence { iterations, trace });
            }
        }
        trace.push(norm(&f));
    }
    let s = sigma_field(&w, k)?;
    let resid: Vec<f64> = s.iter().zip(&sys.target).map(|(a, b)| a - b).collect();
    let mut lambda = vec![0.0; n + 1];
    lambda[n] = -(n as f64 + 1.0) / sphere_area(n) * first_moment(&resid, &sys.weights);
    let proj = project_with(&resid, n, &sys.weights);
    Ok(ReducedSolution {
        n,
        k,
        mu,
        xi: xi.to_vec(),
        projected_residual: sup(&proj),
        center_of_mass: com_last(&w, &sys.weights),
        w,
        lambda,
        iterations,
        trace,
    })
}

/// `Λ_{n+1}/μ` from the Kazdan–Warner form of the reduced equation:
/// `∫ −sin θ (K∘φ)' w^p dv / ∫ sin²θ w^p dv`, using `K` directly.
pub fn lambda_from_kw(k_fn: &AxisymK, w: &SphereAxisymField, xi: &[f64]) -> Result<f64> {
    let tau = axis_tau(xi)?;
    let phi = AxisMobius::new(tau);
    let n = w.n;
    let p = 2.0 * n as f64 / (n as f64 - 2.0);
    let weights = axisym_weights(n, w.intervals());
    let (mut num, mut den) = (0.0, 0.0);
    for (i, q) in weights.iter().enumerate() {
        let th = w.theta(i);
        let dens = q * w.values[i].powf(p);
        let dk = k_fn.dtheta(phi.map_theta(th)) * phi.factor(th);
        num += -th.sin() * dk * dens;
        den += th.sin().powi(2) * dens;
    }
    Ok(num / den)
}
