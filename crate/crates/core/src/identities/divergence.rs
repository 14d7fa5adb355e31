use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{norm2, IdentityReport, Level, ScalarFn};
use crate::conformal::f_from_jet;
use crate::error::{Error, Result};
use crate::numerics::stencil::{divergence, jet2, matrix_divergence};
use crate::numerics::{rising_factorial, BallRule};
use crate::symmetric::CONE_TOL;

/// `ψ`, `∇ψ`, Newton tensors `T_0..T_m` and `σ_0..σ_{m+1}` of `F[ψ]` at `x`.
struct Local {
    psi: f64,
    g: Vec<f64>,
    t: Vec<DMatrix<f64>>,
    sigma: Vec<f64>,
}

fn local(psi: ScalarFn, x: &[f64], h: f64, m: usize) -> Local {
    let j = jet2(&psi, x, h);
    let f = f_from_jet(&j.gradient, &j.hessian);
    let n = x.len();
    let id = DMatrix::<f64>::identity(n, n);
    let mut t = vec![id.clone()];
    let mut sigma = vec![1.0];
    for i in 0..=m {
        let tf = &t[i] * &f;
        let s = tf.trace() / (i + 1) as f64;
        sigma.push(s);
        if i < m {
            let next = -tf + &id * s;
            t.push(0.5 * (&next + next.transpose()));
        }
    }
    Local { psi: j.value, g: j.gradient, t, sigma }
}

fn quad(t: &DMatrix<f64>, g: &[f64]) -> f64 {
    let n = g.len();
    let mut s = 0.0;
    for a in 0..n {
        for b in 0..n {
            s += g[a] * t[(a, b)] * g[b];
        }
    }
    s
}

fn apply(t: &DMatrix<f64>, g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n).map(|a| (0..n).map(|b| t[(a, b)] * g[b]).sum()).collect()
}

fn max_over_points<F: Fn(&[f64]) -> f64 + Sync>(points: &[Vec<f64>], f: F) -> f64 {
    points.par_iter().map(|x| f(x)).reduce(|| 0.0, f64::max)
}

fn validate(points: &[Vec<f64>], hs: &[f64]) -> Result<usize> {
    let n = points.first().map(|p| p.len()).ok_or_else(|| Error::Domain("no sample points".into()))?;
    if n < 2 || points.iter().any(|p| p.len() != n) {
        return Err(Error::Domain("sample points must share a dimension n >= 2".into()));
    }
    if hs.is_empty() || hs.iter().any(|&h| !(h > 0.0)) {
        return Err(Error::Stencil("steps must be positive".into()));
    }
    Ok(n)
}

/// `∇_a T_ℓ^a_b = (n−2ℓ) T_ℓ^a_b ∇_aψ − (n−ℓ) σ_ℓ ∇_bψ`, both sides at each
/// point and step; the residual is the max over points and `b`.
pub fn check_divergence(psi: ScalarFn, ell: usize, points: &[Vec<f64>], hs: &[f64]) -> Result<IdentityReport> {
    let n = validate(points, hs)?;
    if ell > n {
        return Err(Error::Domain(format!("ell = {ell} outside 0..={n}")));
    }
    let levels = hs
        .iter()
        .map(|&h| {
            let residual = max_over_points(points, |x| {
                let lhs = matrix_divergence(&|y: &[f64]| local(psi, y, h, ell).t.pop_last(), x, h);
                let l = local(psi, x, h, ell);
                let tg = apply(&l.t[ell].transpose(), &l.g);
                (0..n)
                    .map(|b| {
                        let rhs = (n as f64 - 2.0 * ell as f64) * tg[b] - (n - ell) as f64 * l.sigma[ell] * l.g[b];
                        (lhs[b] - rhs).abs()
                    })
                    .fold(0.0, f64::max)
            });
            Level { h, residual }
        })
        .collect();
    Ok(IdentityReport::from_levels(format!("divergence[l={ell}]"), n, points.len(), levels))
}

trait PopLast {
    fn pop_last(self) -> DMatrix<f64>;
}

impl PopLast for Vec<DMatrix<f64>> {
    fn pop_last(mut self) -> DMatrix<f64> {
        self.pop().expect("T_0 present")
    }
}

/// The `e^{−qψ}|∇ψ|^p` weighted identity for `T_ℓ ∇ψ`.
pub fn check_weighted_divergence(
    psi: ScalarFn,
    ell: usize,
    p: f64,
    q: f64,
    points: &[Vec<f64>],
    hs: &[f64],
) -> Result<IdentityReport> {
    let n = validate(points, hs)?;
    if ell + 1 > n {
        return Err(Error::Domain(format!("ell = {ell} needs ell + 1 <= n = {n}")));
    }
    if p != 0.0 && p < 2.0 {
        return Err(Error::Domain(format!("weight exponent p = {p} must be 0 or at least 2")));
    }
    let nf = n as f64;
    let lf = ell as f64;
    let levels = hs
        .iter()
        .map(|&h| {
            let field = |y: &[f64]| {
                let l = local(psi, y, h, ell);
                let w = (-q * l.psi).exp() * norm2(&l.g).powf(p / 2.0);
                apply(&l.t[ell], &l.g).into_iter().map(|v| w * v).collect::<Vec<_>>()
            };
            let residual = max_over_points(points, |x| {
                let lhs = divergence(&field, x, h);
                let l = local(psi, x, h, ell + 1);
                let e = (-q * l.psi).exp();
                let g2 = norm2(&l.g);
                let gp = g2.powf(p / 2.0);
                let mut rhs = (p + lf + 1.0) * e * l.sigma[ell + 1] * gp
                    + (nf - 2.0 * lf - q - p / 2.0 - 1.0) * e * gp * quad(&l.t[ell], &l.g)
                    - (nf - lf) / 2.0 * e * l.sigma[ell] * gp * g2;
                if p != 0.0 {
                    rhs -= p * e * g2.powf(p / 2.0 - 1.0) * quad(&l.t[ell + 1], &l.g);
                }
                (lhs - rhs).abs()
            });
            Level { h, residual }
        })
        .collect();
    Ok(IdentityReport::from_levels(format!("weighted[l={ell},p={p},q={q}]"), n, points.len(), levels))
}

/// Coefficients of the summed identity with `t = n−k+1`, `s = k+1+δ`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientReport {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    /// `t^{(j)} / (2^j s^{(j)})`, `j = 0..k−1`.
    pub weights: Vec<f64>,
    /// `(k(n−2k) + δ(n−2k+1+j)) / (k+1+δ+j)`, before subtracting `q`.
    pub gradient_terms: Vec<f64>,
    /// `(n−k+1)^{(j+1)} / (2^{j+1}(k+1+δ)^{(j+1)})`, the factors multiplying `δ`.
    pub delta_terms: Vec<f64>,
    pub all_positive: bool,
}

pub fn specialization_coefficients(n: usize, k: usize, delta: f64) -> Result<CoefficientReport> {
    if k == 0 || 2 * k > n {
        return Err(Error::Domain(format!("need 1 <= k <= n/2, got n = {n}, k = {k}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let t = nf - kf + 1.0;
    let s = kf + 1.0 + delta;
    let weights: Vec<f64> =
        (0..k).map(|j| rising_factorial(t, j) / (2f64.powi(j as i32) * rising_factorial(s, j))).collect();
    let gradient_terms: Vec<f64> = (0..k)
        .map(|j| {
            let jf = j as f64;
            (kf * (nf - 2.0 * kf) + delta * (nf - 2.0 * kf + 1.0 + jf)) / (s + jf)
        })
        .collect();
    let delta_terms: Vec<f64> =
        (0..k).map(|j| rising_factorial(t, j + 1) / (2f64.powi(j as i32 + 1) * rising_factorial(s, j + 1))).collect();
    let all_positive = delta > 0.0 && weights.iter().chain(&gradient_terms).chain(&delta_terms).all(|&c| c > 0.0);
    Ok(CoefficientReport { n, k, delta, weights, gradient_terms, delta_terms, all_positive })
}

/// The summed vector field `e^{−qψ} Σ_j t^{(j)}/(2^j s^{(j)}) |∇ψ|^{2j} T_{k−1−j} ∇ψ`.
fn summed_field(psi: ScalarFn, y: &[f64], h: f64, k: usize, q: f64, t: f64, s: f64) -> Vec<f64> {
    let l = local(psi, y, h, k - 1);
    let e = (-q * l.psi).exp();
    let g2 = norm2(&l.g);
    let mut out = vec![0.0; y.len()];
    for j in 0..k {
        let w = e * rising_factorial(t, j) / (2f64.powi(j as i32) * rising_factorial(s, j)) * g2.powi(j as i32);
        for (o, v) in out.iter_mut().zip(apply(&l.t[k - 1 - j], &l.g)) {
            *o += w * v;
        }
    }
    out
}

/// Divergence of [`summed_field`] split as `(kσ_k term, gradient sum, σ sum)`.
fn summed_rhs(psi: ScalarFn, x: &[f64], h: f64, k: usize, q: f64, t: f64, s: f64) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let kf = k as f64;
    let l = local(psi, x, h, k - 1);
    let e = (-q * l.psi).exp();
    let g2 = norm2(&l.g);
    let sigma_term = kf * e * l.sigma[k];
    let mut grad_sum = 0.0;
    let mut sigma_sum = 0.0;
    for j in 0..k {
        let jf = j as f64;
        let w = rising_factorial(t, j) / (2f64.powi(j as i32) * rising_factorial(s, j));
        let c1 = n - 2.0 * kf + (jf + 1.0) * (s - t) / (s + jf) - q;
        grad_sum += e * w * c1 * g2.powi(j as i32) * quad(&l.t[k - 1 - j], &l.g);
        let w2 = rising_factorial(t, j) / (2f64.powi(j as i32 + 1) * rising_factorial(s, j + 1));
        let c2 = (n - kf + 1.0) * s - (kf + 1.0) * t + (n - 2.0 * kf + s - t) * jf;
        sigma_sum += e * w2 * c2 * g2.powi(j as i32 + 1) * l.sigma[k - 1 - j];
    }
    (sigma_term, grad_sum, sigma_sum)
}

/// The rising-factorial summed identity of order `k` with parameters
/// `(q, t, s)`. When `s − t − k` is in `(0, 0.1]` the report also carries the
/// specialization coefficients for `δ = s − (k+1)`.
#[allow(clippy::too_many_arguments)]
pub fn check_summed_identity(
    psi: ScalarFn,
    k: usize,
    q: f64,
    t: f64,
    s: f64,
    points: &[Vec<f64>],
    hs: &[f64],
) -> Result<IdentityReport> {
    let n = validate(points, hs)?;
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    if !(t > 0.0 && s > 0.0) {
        return Err(Error::Domain(format!("need t, s > 0, got t = {t}, s = {s}")));
    }
    let levels = hs
        .iter()
        .map(|&h| {
            let residual = max_over_points(points, |x| {
                let lhs = divergence(&|y: &[f64]| summed_field(psi, y, h, k, q, t, s), x, h);
                let (a, b, c) = summed_rhs(psi, x, h, k, q, t, s);
                (lhs - (a + b - c)).abs()
            });
            Level { h, residual }
        })
        .collect();
    let mut report = IdentityReport::from_levels(format!("summed[k={k},q={q},t={t},s={s}]"), n, points.len(), levels);
    let delta = s - (k as f64 + 1.0);
    if (t - (n as f64 - k as f64 + 1.0)).abs() < 1e-12 && delta > 0.0 && 2 * k <= n {
        report.coefficients = Some(specialization_coefficients(n, k, delta)?);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CacciopoliVariant {
    /// Weight `e^{−qψ}` with `s = k+1+δ`; the pointwise inequality is `≤`.
    Positive { q: f64 },
    /// Weight `e^{sψ}` with `s = k+1−δ` in the sum; the inequality is `≥`.
    Negative { s: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacciopoliReport {
    pub n: usize,
    pub k: usize,
    pub variant: CacciopoliVariant,
    pub delta: f64,
    pub r: f64,
    pub big_r: f64,
    /// `∫_{B_r} w |∇ψ|^{2k}` with `w` the exponential weight.
    pub lhs: f64,
    /// `∫_{B_R} w σ_k(F[ψ])`.
    pub sigma_integral: f64,
    /// `∫_{B_R} w`.
    pub mass_integral: f64,
    /// Worst signed slack of the pointwise inequality over sample points;
    /// non-positive when the inequality holds.
    pub pointwise_excess: f64,
    pub pointwise_points: usize,
    pub holds: bool,
}

/// Settings for [`cacciopoli_sides`].
#[derive(Debug, Clone)]
pub struct CacciopoliConfig {
    pub h: f64,
    pub radial: usize,
    pub angular: usize,
    pub tol: f64,
}

impl Default for CacciopoliConfig {
    fn default() -> Self {
        Self { h: 0.05, radial: 16, angular: 8, tol: 1e-8 }
    }
}

/// Both integral sides of the Cacciopoli estimate on `B_r ⊂ B_R` (centered
/// at the origin) and the pointwise inequality with explicit `δ` at
/// `points`.
///
/// The weight is `e^{−qψ}` for [`CacciopoliVariant::Positive`] and
/// `e^{sψ}` for [`CacciopoliVariant::Negative`]. `F[ψ]` must lie in the
/// closed `Γ_k` at every sample point and quadrature node; offenders are
/// reported by index (sample points first, then quadrature nodes).
#[allow(clippy::too_many_arguments)]
pub fn cacciopoli_sides(
    psi: ScalarFn,
    n: usize,
    k: usize,
    variant: CacciopoliVariant,
    delta: f64,
    r: f64,
    big_r: f64,
    points: &[Vec<f64>],
    cfg: &CacciopoliConfig,
) -> Result<CacciopoliReport> {
    if k == 0 || k > n || n < 2 {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    if !(0.0 < r && r < big_r) {
        return Err(Error::Domain(format!("need 0 < r < R, got r = {r}, R = {big_r}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} outside (0, 1)")));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::Domain("sample points must lie in R^n".into()));
    }
    let kf = k as f64;
    let t = n as f64 - kf + 1.0;
    let (q, s, sign) = match variant {
        CacciopoliVariant::Positive { q } => (q, kf + 1.0 + delta, 1.0),
        CacciopoliVariant::Negative { s } => (-s, kf + 1.0 - delta, -1.0),
    };

    let rule = BallRule::new(n, &vec![0.0; n], big_r, cfg.radial, cfg.angular);
    let quad_h = 1e-2;
    let all: Vec<(Vec<f64>, f64)> = points
        .iter()
        .map(|p| (p.clone(), cfg.h))
        .chain((0..rule.len()).map(|i| (rule.point(i).to_vec(), quad_h)))
        .collect();
    let offenders: Vec<usize> = all
        .par_iter()
        .enumerate()
        .filter_map(|(i, (x, h))| {
            let l = local(psi, x, *h, k - 1);
            let scale = 1.0 + l.sigma[1].abs();
            let bad = (1..=k).any(|j| l.sigma[j] < -CONE_TOL * scale.powi(j as i32));
            bad.then_some(i)
        })
        .collect();
    if !offenders.is_empty() {
        return Err(Error::ConeExit { nodes: offenders });
    }

    // pointwise: div V − kσ_k w + sign·δ Σ c_j |∇ψ|^{2j+2} σ_{k−1−j} w
    let excess = points
        .par_iter()
        .map(|x| {
            let div = divergence(&|y: &[f64]| summed_field(psi, y, cfg.h, k, q, t, s), x, cfg.h);
            let l = local(psi, x, cfg.h, k - 1);
            let e = (-q * l.psi).exp();
            let g2 = norm2(&l.g);
            let tail: f64 = (0..k)
                .map(|j| {
                    rising_factorial(t, j + 1) / (2f64.powi(j as i32 + 1) * rising_factorial(s, j + 1))
                        * g2.powi(j as i32 + 1)
                        * l.sigma[k - 1 - j]
                })
                .sum();
            let slack = div - kf * e * l.sigma[k] + sign * delta * e * tail;
            sign * slack
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let excess = if points.is_empty() { 0.0 } else { excess };

    let mut lhs = 0.0;
    let mut sigma_integral = 0.0;
    let mut mass_integral = 0.0;
    let inner = BallRule::new(n, &vec![0.0; n], r, cfg.radial, cfg.angular);
    for i in 0..inner.len() {
        let j = jet2(&psi, inner.point(i), quad_h);
        lhs += inner.weights[i] * (-q * j.value).exp() * norm2(&j.gradient).powi(k as i32);
    }
    for i in 0..rule.len() {
        let l = local(psi, rule.point(i), quad_h, k - 1);
        let e = (-q * l.psi).exp();
        sigma_integral += rule.weights[i] * e * l.sigma[k];
        mass_integral += rule.weights[i] * e;
    }
    Ok(CacciopoliReport {
        n,
        k,
        variant,
        delta,
        r,
        big_r,
        lhs,
        sigma_integral,
        mass_integral,
        pointwise_excess: excess,
        pointwise_points: points.len(),
        holds: excess <= cfg.tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::{sample_points, DEFAULT_STEPS};

    fn bubble_log(x: &[f64]) -> f64 {
        (1.0 + norm2(x)).ln()
    }

    #[test]
    fn constant_psi_is_exact() {
        let pts = sample_points(3, 5, 0.5, 2);
        let r = check_divergence(&|_: &[f64]| 0.7, 2, &pts, &DEFAULT_STEPS).unwrap();
        assert!(r.residual < 1e-12 && r.order.is_none());
    }

    #[test]
    fn bubble_log_divergence_is_fourth_order() {
        let pts = sample_points(4, 6, 0.6, 3);
        let r = check_divergence(&bubble_log, 1, &pts, &DEFAULT_STEPS).unwrap();
        assert!(r.order.unwrap() >= 3.5, "{r:?}");
    }

    #[test]
    fn weighted_reduces_to_plain_at_p0_q0() {
        let pts = sample_points(3, 4, 0.5, 4);
        let psi = |x: &[f64]| (0.7 * x[0] - 0.4 * x[1]).sin() + 0.3 * (x[2] * x[0]).cos();
        let r = check_weighted_divergence(&psi, 0, 0.0, 0.0, &pts, &DEFAULT_STEPS).unwrap();
        assert!(r.order.unwrap() >= 3.5, "{r:?}");
        let r =
            check_weighted_divergence(&bubble_log, 1, 2.0, 1.0, &sample_points(4, 4, 0.5, 5), &DEFAULT_STEPS).unwrap();
        assert!(r.order.unwrap() >= 3.5, "{r:?}");
    }

    #[test]
    fn specialization_coefficients_positive() {
        let c = specialization_coefficients(4, 2, 0.05).unwrap();
        assert!(c.all_positive);
        assert_eq!(c.weights[0], 1.0);
        assert!((c.delta_terms[0] - 3.0 / (2.0 * 3.05)).abs() < 1e-15);
    }

    #[test]
    fn bubble_log_cacciopoli_pointwise() {
        let n = 4;
        let k = 2;
        let q = 1.0 + (k * (n - 2 * k)) as f64 / (k as f64 + 1.0);
        let pts = sample_points(n, 20, 1.5, 6);
        let rep = cacciopoli_sides(
            &bubble_log,
            n,
            k,
            CacciopoliVariant::Positive { q },
            0.05,
            1.0,
            2.0,
            &pts,
            &CacciopoliConfig::default(),
        )
        .unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!(rep.lhs > 0.0 && rep.sigma_integral > 0.0 && rep.mass_integral > 0.0);
    }

    #[test]
    fn cone_exit_is_reported() {
        // F = -2 I for psi = -|x|^2 at the origin, outside every cone
        let psi = |x: &[f64]| -norm2(x);
        let pts = vec![vec![0.0; 3]];
        let err = cacciopoli_sides(
            &psi,
            3,
            1,
            CacciopoliVariant::Positive { q: 1.0 },
            0.05,
            0.5,
            1.0,
            &pts,
            &CacciopoliConfig::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::ConeExit { ref nodes } if nodes.contains(&0)));
    }
}
