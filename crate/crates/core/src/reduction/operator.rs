use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::conformal::sphere::reflect_index;
use crate::conformal::{axisym_eigs, sigma_axisym, SphereAxisymField};
use crate::error::{Error, Result};
use crate::numerics::binomial;
use crate::numerics::stencil::{D1, D2, OFFSETS};
use crate::symmetric::cone_margin;

use super::AxisymK;

/// `σ_k` of the round metric, `2^{−k} C(n, k)`.
pub fn round_sigma(n: usize, k: usize) -> f64 {
    binomial(n, k) * 0.5f64.powi(k as i32)
}

/// `K_μ = μK + (1 − μ) 2^{−k} C(n, k)`.
pub fn k_mu(k_fn: &AxisymK, n: usize, k: usize, mu: f64) -> AxisymK {
    k_fn.blend(mu, round_sigma(n, k))
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    Ok(())
}

/// Smallest cone margin over the grid and the nodes where `λ(A_{g_v}) ∉ Γ_k`.
pub fn cone_scan(v: &SphereAxisymField, k: usize) -> (f64, Vec<usize>) {
    let margins: Vec<f64> = (0..=v.intervals())
        .into_par_iter()
        .map(|i| {
            let (lt, ls) = axisym_eigs(v, i);
            let mut vals = vec![ls; v.n];
            vals[0] = lt;
            cone_margin(&vals, k)
        })
        .collect();
    let bad = margins.iter().enumerate().filter(|(_, m)| !(**m > 0.0)).map(|(i, _)| i).collect();
    (margins.iter().copied().fold(f64::INFINITY, f64::min), bad)
}

/// `σ_k(λ(A_{g_v}))` at every node, after the cone check.
pub fn sigma_field(v: &SphereAxisymField, k: usize) -> Result<Vec<f64>> {
    check_k(v.n, k)?;
    let (_, bad) = cone_scan(v, k);
    if !bad.is_empty() {
        return Err(Error::ConeExit { nodes: bad });
    }
    Ok((0..=v.intervals())
        .into_par_iter()
        .map(|i| {
            let (lt, ls) = axisym_eigs(v, i);
            sigma_axisym(v.n, k, lt, ls).0
        })
        .collect())
}

/// `F_μ[v] = σ_k(λ(A_{g_v})) − K_μ` at the grid nodes.
pub fn residual(v: &SphereAxisymField, k_fn: &AxisymK, k: usize, mu: f64) -> Result<Vec<f64>> {
    let target = k_mu(k_fn, v.n, k, mu);
    let s = sigma_field(v, k)?;
    Ok(s.iter().enumerate().map(|(i, s)| s - target.value(v.theta(i))).collect())
}

/// Partials of `(λ_θ, λ_τ)` in `(v, v', v'')` at colatitude `θ`.
fn eig_partials(n: usize, theta: f64, f: f64, d1: f64, d2: f64) -> [[f64; 3]; 2] {
    let c = n as f64 - 2.0;
    let q = 4.0 / c;
    let m = 2.0 / c;
    let nm = n as f64 - 1.0;
    let s = theta.sin();
    let pole = s.abs() < 1e-12;
    let cot = if pole { 0.0 } else { theta.cos() / s };
    let x = if pole { d2 } else { cot * d1 };
    let a_t = 0.5 - m * d2 / f + 0.5 * nm * m * m * (d1 / f).powi(2);
    let a_s = 0.5 - m * x / f - 0.5 * m * m * (d1 / f).powi(2);
    let da_t = [m * d2 / (f * f) - nm * m * m * d1 * d1 / f.powi(3), nm * m * m * d1 / (f * f), -m / f];
    let da_s = [
        m * x / (f * f) + m * m * d1 * d1 / f.powi(3),
        -m * cot / f - m * m * d1 / (f * f),
        if pole { -m / f } else { 0.0 },
    ];
    let sc = f.powf(-q);
    let dsc = -q * f.powf(-q - 1.0);
    [[dsc * a_t + sc * da_t[0], sc * da_t[1], sc * da_t[2]], [dsc * a_s + sc * da_s[0], sc * da_s[1], sc * da_s[2]]]
}

/// Jacobian of `v ↦ σ_k(λ(A_{g_v}))` on the grid (the linearization of
/// `F_μ`, which does not depend on `μ` or `K`).
///
/// Assembled from `∂σ_k/∂λ` and the analytic derivatives of the two
/// eigenvalues through the difference stencils, with pole reflection.
pub fn linearize(v: &SphereAxisymField, k: usize) -> Result<DMatrix<f64>> {
    check_k(v.n, k)?;
    let (_, bad) = cone_scan(v, k);
    if !bad.is_empty() {
        return Err(Error::ConeExit { nodes: bad });
    }
    let big = v.intervals();
    let h = v.h();
    let rows: Vec<Vec<(usize, f64)>> = (0..=big)
        .into_par_iter()
        .map(|i| {
            let (f, d1, d2) = v.derivatives(i);
            let th = v.theta(i);
            let (lt, ls) = axisym_eigs(v, i);
            let (_, s_t, s_s) = sigma_axisym(v.n, k, lt, ls);
            let p = eig_partials(v.n, th, f, d1, d2);
            let g = [s_t * p[0][0] + s_s * p[1][0], s_t * p[0][1] + s_s * p[1][1], s_t * p[0][2] + s_s * p[1][2]];
            let mut row = vec![(i, g[0])];
            for (o, &off) in OFFSETS.iter().enumerate() {
                let j = reflect_index(i as i64 + off, big);
                row.push((j, g[1] * D1[o] / h + g[2] * D2[o] / (h * h)));
            }
            row
        })
        .collect();
    let mut jac = DMatrix::zeros(big + 1, big + 1);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, a) in row {
            jac[(i, j)] += a;
        }
    }
    Ok(jac)
}

/// `d_{n,k}` in the linearization `−d_{n,k}(Δ + n)` of `σ_k` at the round
/// metric: `2^{2−k} C(n−1, k−1) / (n−2)`.
pub fn linearization_constant(n: usize, k: usize) -> f64 {
    4.0 * 0.5f64.powi(k as i32) * binomial(n - 1, k - 1) / (n as f64 - 2.0)
}
