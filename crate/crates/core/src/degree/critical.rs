use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{Poly, SphereRule};
use crate::symmetric::jacobi_eigen;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CritClass {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalPointRecord {
    /// Unit vector in `R^{n+1}`.
    pub x: Vec<f64>,
    pub value: f64,
    pub grad_norm: f64,
    /// Round-sphere Laplacian of `K` at `x`.
    pub laplacian: f64,
    /// Intrinsic Hessian eigenvalues, ascending.
    pub hessian: Vec<f64>,
    pub morse_index: usize,
    pub class: CritClass,
}

/// Settings for [`find_critical_points`].
#[derive(Debug, Clone)]
pub struct CriticalConfig {
    /// Degree of the seed rule on `S^n`.
    pub seed_q: usize,
    pub grad_tol: f64,
    /// Threshold for `|∇K| + |ΔK|` at critical points.
    pub nondegeneracy_tol: f64,
    /// Smallest allowed `|eigenvalue|` of the intrinsic Hessian.
    pub hessian_tol: f64,
    pub dedup: f64,
    pub max_iter: usize,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        Self { seed_q: 5, grad_tol: 1e-10, nondegeneracy_tol: 1e-8, hessian_tol: 1e-7, dedup: 1e-6, max_iter: 80 }
    }
}

/// Orthonormal basis of `x^⊥ ⊂ R^{n+1}` as the columns of an `(n+1)×n` matrix.
pub fn tangent_frame(x: &[f64]) -> DMatrix<f64> {
    let d = x.len();
    // Householder reflection swapping e_last and x
    let mut v: Vec<f64> = x.iter().map(|a| -a).collect();
    v[d - 1] += 1.0;
    let vv: f64 = v.iter().map(|a| a * a).sum();
    let h = if vv < 1e-30 {
        DMatrix::identity(d, d)
    } else {
        DMatrix::from_fn(d, d, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / vv)
    };
    h.columns(0, d - 1).into_owned()
}

/// Tangential gradient `∇K − (x·∇K) x`.
pub fn sphere_gradient(k: &Poly, x: &[f64]) -> Vec<f64> {
    let g = k.gradient(x);
    let r: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    g.iter().zip(x).map(|(a, b)| a - r * b).collect()
}

/// Round-sphere Laplacian `ΔK − xᵀ∇²K x − n x·∇K` at a unit vector `x`.
pub fn sphere_laplacian(k: &Poly, x: &[f64]) -> f64 {
    let d = x.len();
    let n = (d - 1) as f64;
    let g = k.gradient(x);
    let h = k.hessian(x);
    let xv = DVector::from_column_slice(x);
    let r: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    h.trace() - (xv.transpose() * &h * &xv)[(0, 0)] - n * r
}

/// Intrinsic Hessian `Eᵀ(∇²K − (x·∇K) I)E` in the frame of [`tangent_frame`].
pub fn sphere_hessian(k: &Poly, x: &[f64]) -> DMatrix<f64> {
    let d = x.len();
    let g = k.gradient(x);
    let r: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    let h = k.hessian(x) - DMatrix::<f64>::identity(d, d) * r;
    let e = tangent_frame(x);
    let m = e.transpose() * h * &e;
    0.5 * (&m + m.transpose())
}

fn normalize(x: &mut [f64]) {
    let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    x.iter_mut().for_each(|a| *a /= r);
}

/// Riemannian Newton from `x0`: tangent step from the intrinsic Hessian,
/// then projection back to the sphere.
fn newton(k: &Poly, x0: &[f64], cfg: &CriticalConfig) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    normalize(&mut x);
    for _ in 0..cfg.max_iter {
        let g = sphere_gradient(k, &x);
        let gn = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        if gn < cfg.grad_tol {
            return Some(x);
        }
        let e = tangent_frame(&x);
        let rhs = -(e.transpose() * DVector::from_vec(g));
        let step = sphere_hessian(k, &x).lu().solve(&rhs)?;
        let mut len = step.norm();
        let scale = if len > 0.3 { 0.3 / len } else { 1.0 };
        len *= scale;
        let amb = e * step * scale;
        for (a, s) in x.iter_mut().zip(amb.iter()) {
            *a += s;
        }
        normalize(&mut x);
        if !len.is_finite() {
            return None;
        }
    }
    let gn = sphere_gradient(k, &x).iter().map(|a| a * a).sum::<f64>().sqrt();
    (gn < cfg.grad_tol).then_some(x)
}

/// All critical points of `K|_{S^n}` reachable from a quasi-uniform seed
/// grid, deduplicated and sorted lexicographically.
///
/// `K` is a polynomial in the ambient coordinates of `R^{n+1}`.
pub fn find_critical_points(k: &Poly, cfg: &CriticalConfig) -> Result<Vec<CriticalPointRecord>> {
    let d = k.dim;
    if d < 2 {
        return Err(Error::Domain("K must live on S^n with n >= 1".into()));
    }
    let seeds = SphereRule::new(d - 1, cfg.seed_q);
    let found: Vec<Vec<f64>> =
        (0..seeds.len()).into_par_iter().filter_map(|i| newton(k, seeds.point(i), cfg)).collect();
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for x in found {
        let dup = unique.iter().any(|u| {
            let c: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
            c.clamp(-1.0, 1.0).acos() < cfg.dedup
        });
        if !dup {
            unique.push(x);
        }
    }
    unique.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));

    let mut out = Vec::with_capacity(unique.len());
    for x in unique {
        let g = sphere_gradient(k, &x);
        let grad_norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
        let laplacian = sphere_laplacian(k, &x);
        if grad_norm + laplacian.abs() <= cfg.nondegeneracy_tol {
            return Err(Error::NondegeneracyViolation { x, value: grad_norm + laplacian.abs() });
        }
        let (hessian, _) = jacobi_eigen(&sphere_hessian(k, &x))?;
        let smallest = hessian.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
        if smallest < cfg.hessian_tol {
            return Err(Error::DegenerateCritical { x, value: smallest });
        }
        let morse_index = hessian.iter().filter(|&&v| v < 0.0).count();
        out.push(CriticalPointRecord {
            value: k.eval(&x),
            x,
            grad_norm,
            laplacian,
            hessian,
            morse_index,
            class: if laplacian < 0.0 { CritClass::Minus } else { CritClass::Plus },
        });
    }
    Ok(out)
}

/// `Σ_{x ∈ Crit₋} (−1)^{i(x)}`.
pub fn deg_crit_minus(records: &[CriticalPointRecord]) -> i64 {
    records.iter().filter(|r| r.class == CritClass::Minus).map(|r| sign_pow(r.morse_index)).sum()
}

/// `Σ (−1)^{i(x)}` over every critical point.
pub fn morse_sum(records: &[CriticalPointRecord]) -> i64 {
    records.iter().map(|r| sign_pow(r.morse_index)).sum()
}

pub(crate) fn sign_pow(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn height_function() {
        for n in 2..=5 {
            let k = Poly::parse(&format!("2 + x{}", n + 1), n + 1).unwrap();
            let r = find_critical_points(&k, &CriticalConfig::default()).unwrap();
            assert_eq!(r.len(), 2);
            let north = r.iter().find(|c| c.x[n] > 0.0).unwrap();
            assert_eq!(north.class, CritClass::Minus);
            assert_eq!(north.morse_index, n);
            assert!((north.laplacian + n as f64).abs() < 1e-12);
            assert_eq!(deg_crit_minus(&r), sign_pow(n));
            assert_eq!(morse_sum(&r), 1 + sign_pow(n));
        }
    }

    #[test]
    fn quadratic_axes() {
        let k = Poly::parse("2 + 0.1x1^2 + 0.25x2^2 + 0.45x3^2 + 0.7x4^2", 4).unwrap();
        let r = find_critical_points(&k, &CriticalConfig::default()).unwrap();
        assert_eq!(r.len(), 8);
        for c in &r {
            let big = c.x.iter().filter(|v| v.abs() > 1.0 - 1e-12).count();
            assert_eq!(big, 1, "{c:?}");
        }
        assert_eq!(morse_sum(&r), 0);
    }

    #[test]
    fn constant_is_degenerate() {
        let k = Poly::constant(4, 1.5);
        assert!(matches!(
            find_critical_points(&k, &CriticalConfig::default()),
            Err(Error::NondegeneracyViolation { .. })
        ));
    }

    #[test]
    fn frame_is_orthonormal() {
        for x in [vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0], vec![0.6, 0.0, 0.8]] {
            let e = tangent_frame(&x);
            let g = e.transpose() * &e;
            assert!((g - DMatrix::<f64>::identity(2, 2)).norm() < 1e-14);
            let xv = DVector::from_vec(x);
            assert!((e.transpose() * xv).norm() < 1e-14);
        }
    }
}
