//! Elementary symmetric functions, the Gårding cones `Γ_k`, and Newton
//! tensors of symmetric matrices.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for open-cone membership.
pub const CONE_TOL: f64 = 1e-10;

/// Off-diagonal Frobenius threshold for the Jacobi eigensolver.
pub const JACOBI_TOL: f64 = 1e-13;

/// Eigenvalue vector of a Schouten-type tensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("empty spectrum".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite eigenvalue".into()));
        }
        Ok(Self { values })
    }

    /// `a` with multiplicity `ma` followed by `b` with multiplicity `mb`.
    pub fn two_valued(a: f64, ma: usize, b: f64, mb: usize) -> Result<Self> {
        let mut v = vec![a; ma];
        v.extend(std::iter::repeat_n(b, mb));
        Self::new(v)
    }

    pub fn constant(value: f64, n: usize) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// All elementary symmetric functions `σ_0 = 1, σ_1, …, σ_n` of `values`.
///
/// These are the coefficients of `Π (1 + λ_i s)`, built one factor at a time.
pub fn sigma_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &l) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

/// `σ_k(λ)`.
pub fn sigma(lambda: &Spectrum, k: usize) -> Result<f64> {
    let n = lambda.n();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    Ok(sigma_all(lambda.values())[k])
}

/// `true` iff `σ_j(λ) > tol` for every `j = 1..=k`.
pub fn in_gamma_k(lambda: &Spectrum, k: usize, tol: f64) -> bool {
    let e = sigma_all(lambda.values());
    let k = k.min(lambda.n());
    (1..=k).all(|j| e[j] > tol)
}

/// `min_j sign(σ_j)|σ_j|^{1/j}` over `j = 1..=k`; positive iff `λ ∈ Γ_k`.
pub fn cone_margin(values: &[f64], k: usize) -> f64 {
    let e = sigma_all(values);
    (1..=k.min(values.len())).map(|j| e[j].signum() * e[j].abs().powf(1.0 / j as f64)).fold(f64::INFINITY, f64::min)
}

fn check_symmetric(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Domain(format!("matrix is {}x{}", a.nrows(), a.ncols())));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite matrix entry".into()));
    }
    let scale = a.amax().max(1.0);
    let n = a.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Domain(format!("matrix not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(())
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_symmetric(a)?;
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let off = |m: &DMatrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[(i, j)] * m[(i, j)];
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) > JACOBI_TOL * scale {
        sweeps += 1;
        if sweeps > 100 {
            return Err(Error::Numeric(format!("Jacobi sweeps did not converge (off-diagonal {:.3e})", off(&m))));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..n {
                    let mrp = m[(r, p)];
                    let mrq = m[(r, q)];
                    m[(r, p)] = c * mrp - s * mrq;
                    m[(r, q)] = s * mrp + c * mrq;
                }
                for r in 0..n {
                    let mpr = m[(p, r)];
                    let mqr = m[(q, r)];
                    m[(p, r)] = c * mpr - s * mqr;
                    m[(q, r)] = s * mpr + c * mqr;
                }
                for r in 0..n {
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = c * vrp - s * vrq;
                    v[(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eigenvalues(a: &DMatrix<f64>) -> Result<Spectrum> {
    let (values, _) = jacobi_eigen(a)?;
    Spectrum::new(values)
}

/// `σ_k(λ(A))`.
pub fn sigma_of_matrix(a: &DMatrix<f64>, k: usize) -> Result<f64> {
    sigma(&eigenvalues(a)?, k)
}

/// Newton tensors `T_0, …, T_ell` of `F`, using
/// `T_{j+1} = −T_j F + σ_{j+1}(F) I` with `σ_{j+1} = tr(T_j F)/(j+1)`.
pub fn newton_tensors(f: &DMatrix<f64>, ell: usize) -> Result<Vec<DMatrix<f64>>> {
    check_symmetric(f)?;
    let n = f.nrows();
    if ell > n {
        return Err(Error::Domain(format!("ell = {ell} outside 0..={n}")));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(ell + 1);
    out.push(id.clone());
    for j in 0..ell {
        let tf = &out[j] * f;
        let s = tf.trace() / (j + 1) as f64;
        let next = -tf + &id * s;
        out.push(0.5 * (&next + next.transpose()));
    }
    Ok(out)
}

/// The Newton tensor `T_ell(F)`.
pub fn newton_tensor(f: &DMatrix<f64>, ell: usize) -> Result<DMatrix<f64>> {
    Ok(newton_tensors(f, ell)?.pop().expect("at least T_0"))
}

/// `∂σ_k/∂A = T_{k−1}(A)`.
pub fn dsigma_da(a: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("k = {k} outside 1..={n}")));
    }
    newton_tensor(a, k - 1)
}
