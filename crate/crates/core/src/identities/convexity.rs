use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{norm2, ScalarFn};
use crate::error::{Error, Result};
use crate::numerics::stencil::jet2;
use crate::symmetric::jacobi_eigen;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvexityReport {
    /// Smallest eigenvalue of `A_{(w1+w2)/2} − ½(A_{w1} + A_{w2})` over the points.
    pub min_eigenvalue: f64,
    /// Largest `|entry|` of the defect, which vanishes in the equality case `w2 = c·w1`.
    pub max_abs: f64,
    pub worst_point: Vec<f64>,
    pub points: usize,
}

/// `A_w = ∇²w − |∇w|²/(2w) I`.
fn a_w(value: f64, grad: &[f64], hess: &DMatrix<f64>) -> DMatrix<f64> {
    let n = grad.len();
    hess - DMatrix::<f64>::identity(n, n) * (norm2(grad) / (2.0 * value))
}

/// Midpoint concavity defect of `w ↦ A_w` for positive `w1`, `w2`.
pub fn check_convexity(w1: ScalarFn, w2: ScalarFn, points: &[Vec<f64>], h: f64) -> Result<ConvexityReport> {
    if points.is_empty() {
        return Err(Error::Domain("no sample points".into()));
    }
    let per_point: Vec<Result<(f64, f64, usize)>> = points
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let j1 = jet2(&w1, x, h);
            let j2 = jet2(&w2, x, h);
            if !(j1.value > 0.0 && j2.value > 0.0) {
                return Err(Error::Precondition(format!(
                    "fields must be positive, got w1 = {}, w2 = {} at {x:?}",
                    j1.value, j2.value
                )));
            }
            let gm: Vec<f64> = j1.gradient.iter().zip(&j2.gradient).map(|(a, b)| 0.5 * (a + b)).collect();
            let hm = 0.5 * (&j1.hessian + &j2.hessian);
            let mid = a_w(0.5 * (j1.value + j2.value), &gm, &hm);
            let avg = 0.5 * (a_w(j1.value, &j1.gradient, &j1.hessian) + a_w(j2.value, &j2.gradient, &j2.hessian));
            let d = mid - avg;
            let (vals, _) = jacobi_eigen(&(0.5 * (&d + d.transpose())))?;
            Ok((vals[0], d.amax(), i))
        })
        .collect();
    let mut best = (f64::INFINITY, 0);
    let mut max_abs = 0.0f64;
    for r in per_point {
        let (min, amax, i) = r?;
        max_abs = max_abs.max(amax);
        if min < best.0 {
            best = (min, i);
        }
    }
    Ok(ConvexityReport { min_eigenvalue: best.0, max_abs, worst_point: points[best.1].clone(), points: points.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::identities::sample_points;

    #[test]
    fn equality_cases() {
        let w = |x: &[f64]| (0.3 * x[0] - 0.2 * x[1] * x[1]).exp();
        let w2 = |x: &[f64]| 3.0 * (0.3 * x[0] - 0.2 * x[1] * x[1]).exp();
        let pts = sample_points(3, 10, 1.0, 9);
        let r = check_convexity(&w, &w, &pts, 0.05).unwrap();
        assert!(r.min_eigenvalue.abs() < 1e-12);
        let r = check_convexity(&w, &w2, &pts, 0.05).unwrap();
        assert!(r.max_abs < 1e-10, "{r:?}");
        let neg = |x: &[f64]| x[0];
        assert!(check_convexity(&w, &neg, &pts, 0.05).unwrap_err().is_precondition());
    }
}
