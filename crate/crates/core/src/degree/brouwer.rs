use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::SphereRule;

/// A vector field on a ball in `R^d`.
pub type VectorMap<'a> = &'a (dyn Fn(&[f64]) -> Result<Vec<f64>> + Sync);

#[derive(Debug, Clone)]
pub struct BrouwerConfig {
    /// Degree of the sphere rule used for boundary samples.
    pub sphere_q: usize,
    /// Newton seeds: the origin plus this many points uniform in the ball.
    pub seeds: usize,
    pub rng_seed: u64,
    pub zero_tol: f64,
    pub boundary_tol: f64,
    pub det_tol: f64,
    pub fd_step: f64,
    pub max_iter: usize,
    pub dedup: f64,
}

impl Default for BrouwerConfig {
    fn default() -> Self {
        Self {
            sphere_q: 2,
            seeds: 96,
            rng_seed: 7,
            zero_tol: 1e-10,
            boundary_tol: 1e-8,
            det_tol: 1e-8,
            fd_step: 1e-6,
            max_iter: 40,
            dedup: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallMapSample {
    pub xi: Vec<f64>,
    pub value: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Zero {
    pub xi: Vec<f64>,
    pub det: f64,
    pub sign: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeReport {
    pub s: f64,
    pub degree: i64,
    pub zeros: Vec<Zero>,
    pub boundary_min: f64,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Central-difference Jacobian.
pub fn jacobian(map: VectorMap, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let d = x.len();
    let mut j = DMatrix::zeros(d, d);
    let mut y = x.to_vec();
    for c in 0..d {
        y[c] = x[c] + h;
        let fp = map(&y)?;
        y[c] = x[c] - h;
        let fm = map(&y)?;
        y[c] = x[c];
        for r in 0..d {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// Forward-difference Jacobian reusing `f = map(x)`.
fn jacobian_forward(map: VectorMap, x: &[f64], f: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let d = x.len();
    let mut j = DMatrix::zeros(d, d);
    let mut y = x.to_vec();
    for c in 0..d {
        y[c] = x[c] + h;
        let fp = map(&y)?;
        y[c] = x[c];
        for r in 0..d {
            j[(r, c)] = (fp[r] - f[r]) / h;
        }
    }
    Ok(j)
}

/// Damped Newton; gives up when the iterate leaves `|ξ| < limit`.
fn newton(map: VectorMap, x0: &[f64], limit: f64, cfg: &BrouwerConfig) -> Result<Option<Vec<f64>>> {
    let mut x = x0.to_vec();
    let mut f = map(&x)?;
    for _ in 0..cfg.max_iter {
        let fnorm = norm(&f);
        if fnorm < cfg.zero_tol {
            return Ok(Some(x));
        }
        let j = jacobian_forward(map, &x, &f, cfg.fd_step)?;
        let Some(step) = j.lu().solve(&-DVector::from_column_slice(&f)) else {
            return Ok(None);
        };
        let mut lam = 1.0;
        loop {
            let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lam * s).collect();
            if norm(&trial) < limit {
                let ft = map(&trial)?;
                if norm(&ft) < (1.0 - 1e-4 * lam) * fnorm {
                    x = trial;
                    f = ft;
                    break;
                }
            }
            lam *= 0.5;
            if lam < 1e-3 {
                return Ok(None);
            }
        }
    }
    Ok((norm(&f) < cfg.zero_tol).then_some(x))
}

/// Nondegenerate zeros of `map` in `B_s(0)` from multistart Newton.
pub fn find_zeros(map: VectorMap, d: usize, s: f64, cfg: &BrouwerConfig) -> Result<Vec<Zero>> {
    let mut seeds = vec![vec![0.0; d]];
    seeds.extend(crate::identities::sample_points(d, cfg.seeds, s, cfg.rng_seed));
    let limit = if s < 1.0 { (s * 1.05).min(0.5 * (1.0 + s)) } else { s * 1.05 };
    let found: Vec<Option<Vec<f64>>> = seeds.par_iter().map(|x0| newton(map, x0, limit, cfg)).collect::<Result<_>>()?;
    let mut zeros: Vec<Zero> = Vec::new();
    for x in found.into_iter().flatten() {
        if norm(&x) >= s || zeros.iter().any(|z| norm(&sub(&z.xi, &x)) < cfg.dedup) {
            continue;
        }
        let det = jacobian(map, &x, cfg.fd_step)?.determinant();
        if det.abs() <= cfg.det_tol {
            return Err(Error::DegenerateZero { x, det });
        }
        zeros.push(Zero { xi: x, det, sign: if det > 0.0 { 1 } else { -1 } });
    }
    zeros.sort_by(|a, b| a.xi.partial_cmp(&b.xi).expect("finite"));
    Ok(zeros)
}

/// Smallest `|map|` over boundary samples of `B_s`; errors when it is not
/// clear of zero.
fn boundary_min(map: VectorMap, d: usize, s: f64, cfg: &BrouwerConfig) -> Result<f64> {
    let dirs: Vec<Vec<f64>> = if d == 1 {
        vec![vec![1.0], vec![-1.0]]
    } else {
        let rule = SphereRule::new(d - 1, cfg.sphere_q);
        (0..rule.len()).map(|i| rule.point(i).to_vec()).collect()
    };
    let values: Vec<f64> = dirs
        .par_iter()
        .map(|u| {
            let xi: Vec<f64> = u.iter().map(|a| a * s).collect();
            map(&xi).map(|v| norm(&v))
        })
        .collect::<Result<_>>()?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= cfg.boundary_tol {
        return Err(Error::BoundaryZero { radius: s, min_norm: min });
    }
    Ok(min)
}

fn check_args(d: usize, s: f64) -> Result<()> {
    if d < 1 || !(s > 0.0) {
        return Err(Error::Domain(format!("need d >= 1 and s > 0, got d = {d}, s = {s}")));
    }
    Ok(())
}

/// Brouwer degree of `map` on the ball `B_s(0) ⊂ R^d` as the signed count
/// of zeros found by multistart Newton.
pub fn brouwer_degree(map: VectorMap, d: usize, s: f64, cfg: &BrouwerConfig) -> Result<DegreeReport> {
    check_args(d, s)?;
    let bmin = boundary_min(map, d, s, cfg)?;
    let zeros = find_zeros(map, d, s, cfg)?;
    let degree = zeros.iter().map(|z| z.sign).sum();
    Ok(DegreeReport { s, degree, zeros, boundary_min: bmin })
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Degrees on `B_s` for each radius, from one zero search on the largest
/// ball; the degrees must agree.
pub fn degree_scan(map: VectorMap, d: usize, radii: &[f64], cfg: &BrouwerConfig) -> Result<Vec<DegreeReport>> {
    let s_max = radii.iter().copied().fold(f64::NAN, f64::max);
    check_args(d, s_max)?;
    let mut bmins = Vec::with_capacity(radii.len());
    for &s in radii {
        check_args(d, s)?;
        bmins.push(boundary_min(map, d, s, cfg)?);
    }
    let all = find_zeros(map, d, s_max, cfg)?;
    let reports: Vec<DegreeReport> = radii
        .iter()
        .zip(bmins)
        .map(|(&s, boundary_min)| {
            let zeros: Vec<Zero> = all.iter().filter(|z| norm(&z.xi) < s).cloned().collect();
            DegreeReport { s, degree: zeros.iter().map(|z| z.sign).sum(), zeros, boundary_min }
        })
        .collect();
    if reports.windows(2).any(|w| w[0].degree != w[1].degree) {
        return Err(Error::DegreeScanMismatch(reports.iter().map(|r| (r.s, r.degree)).collect()));
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_antipodal() {
        let cfg = BrouwerConfig::default();
        let id = |x: &[f64]| Ok(x.to_vec());
        for s in [0.3, 1.0, 4.0] {
            assert_eq!(brouwer_degree(&id, 3, s, &cfg).unwrap().degree, 1);
        }
        let anti = |x: &[f64]| Ok(x.iter().map(|a| -a).collect());
        assert_eq!(brouwer_degree(&anti, 5, 0.7, &cfg).unwrap().degree, -1);
    }

    #[test]
    fn counts_several_zeros() {
        // z -> z^2 + 1/4 has two positive zeros at ±i/2, on a boundary node when s = 1/2
        let sq = |x: &[f64]| Ok(vec![x[0] * x[0] - x[1] * x[1] + 0.25, 2.0 * x[0] * x[1]]);
        let cfg = BrouwerConfig { sphere_q: 3, ..Default::default() };
        assert_eq!(brouwer_degree(&sq, 2, 1.0, &cfg).unwrap().degree, 2);
        assert!(matches!(brouwer_degree(&sq, 2, 0.5, &cfg), Err(Error::BoundaryZero { .. })));
        let fold = |x: &[f64]| Ok(vec![x[0] * x[0], x[1]]);
        assert!(matches!(brouwer_degree(&fold, 2, 1.0, &cfg), Err(Error::DegenerateZero { .. })));
    }
}
