//! Conformal factors on boxes in `R^n`: Schouten tensors, the `F[ψ]` form,
//! Kelvin transforms and bubbles.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::interp::cubic_weights;
use crate::numerics::stencil::{D1, D2, OFFSETS};

/// Axis-aligned uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub shape: Vec<usize>,
}

impl GridSpec {
    pub fn new(origin: Vec<f64>, spacing: Vec<f64>, shape: Vec<usize>) -> Result<Self> {
        let n = origin.len();
        if n == 0 || spacing.len() != n || shape.len() != n {
            return Err(Error::Domain("grid arrays must share one nonzero length".into()));
        }
        if spacing.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::Domain("grid spacing must be positive".into()));
        }
        if shape.iter().any(|&s| s < 5) {
            return Err(Error::Domain("grid needs at least 5 nodes per axis".into()));
        }
        Ok(Self { origin, spacing, shape })
    }

    /// Cube `[-half, half]^n` with `nodes` points per axis.
    pub fn cube(n: usize, half: f64, nodes: usize) -> Result<Self> {
        let h = 2.0 * half / (nodes - 1) as f64;
        Self::new(vec![-half; n], vec![h; n], vec![nodes; n])
    }

    /// Uniform grid of spacing `h` centered at `center` with `2m+1` nodes per axis.
    pub fn centered(center: &[f64], h: f64, m: usize) -> Result<Self> {
        let origin = center.iter().map(|c| c - m as f64 * h).collect();
        Self::new(origin, vec![h; center.len()], vec![2 * m + 1; center.len()])
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut node: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = node % self.shape[a];
            node /= self.shape[a];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &s)| acc * s + i)
    }

    pub fn coords(&self, node: usize) -> Vec<f64> {
        self.multi_index(node).iter().enumerate().map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a]).collect()
    }

    /// Whether the full 5-point stencil around `node` lies in the grid.
    pub fn is_interior(&self, node: usize) -> bool {
        self.multi_index(node).iter().zip(&self.shape).all(|(&i, &s)| i >= 2 && i + 2 < s)
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_interior(i)).collect()
    }

    fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim() - 1).rev() {
            s[a] = s[a + 1] * self.shape[a + 1];
        }
        s
    }
}

/// Scalar values at the nodes of a [`GridSpec`].
///
/// Conformal factors `u` must be positive; use [`EuclideanField::new`]. Log
/// factors `ψ` and other signed data use [`EuclideanField::signed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EuclideanField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

/// Value, gradient and Hessian at one grid node.
#[derive(Debug, Clone)]
pub struct NodeJet {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

impl EuclideanField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let f = Self::signed(grid, values)?;
        if let Some(i) = f.values.iter().position(|&v| !(v > 0.0)) {
            return Err(Error::Domain(format!("conformal factor not positive at node {i}")));
        }
        Ok(f)
    }

    pub fn signed(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!("{} values for {} nodes", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite field value".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(&[f64]) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self::new(grid, values)
    }

    pub fn signed_from_fn<F: Fn(&[f64]) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.coords(i))).collect();
        Self::signed(grid, values)
    }

    pub fn n(&self) -> usize {
        self.grid.dim()
    }

    /// Fourth-order central derivatives at an interior node.
    pub fn jet(&self, node: usize) -> Result<NodeJet> {
        let g = &self.grid;
        if node >= g.len() || !g.is_interior(node) {
            return Err(Error::Stencil(format!("node {node} is within two nodes of the boundary")));
        }
        let n = g.dim();
        let strides = g.strides();
        let at = |off: &[(usize, i64)]| {
            let mut idx = node as i64;
            for &(a, o) in off {
                idx += o * strides[a] as i64;
            }
            self.values[idx as usize]
        };
        let value = self.values[node];
        let mut gradient = vec![0.0; n];
        let mut hessian = DMatrix::zeros(n, n);
        for a in 0..n {
            let h = g.spacing[a];
            let mut d1 = 0.0;
            let mut d2 = 0.0;
            for (i, &o) in OFFSETS.iter().enumerate() {
                let v = at(&[(a, o)]);
                d1 += D1[i] * v;
                d2 += D2[i] * v;
            }
            gradient[a] = d1 / h;
            hessian[(a, a)] = d2 / (h * h);
            for b in (a + 1)..n {
                let mut s = 0.0;
                for (i, &oa) in OFFSETS.iter().enumerate() {
                    for (j, &ob) in OFFSETS.iter().enumerate() {
                        if D1[i] != 0.0 && D1[j] != 0.0 {
                            s += D1[i] * D1[j] * at(&[(a, oa), (b, ob)]);
                        }
                    }
                }
                let v = s / (h * g.spacing[b]);
                hessian[(a, b)] = v;
                hessian[(b, a)] = v;
            }
        }
        Ok(NodeJet { value, gradient, hessian })
    }

    /// Tensor-product cubic interpolation; fails outside the grid.
    pub fn interpolate(&self, x: &[f64]) -> Result<f64> {
        let g = &self.grid;
        let n = g.dim();
        if x.len() != n {
            return Err(Error::Domain("point dimension mismatch".into()));
        }
        let mut base = vec![0i64; n];
        let mut weights = Vec::with_capacity(n);
        for a in 0..n {
            let u = (x[a] - g.origin[a]) / g.spacing[a];
            let last = (g.shape[a] - 1) as f64;
            if !(u >= -1e-12 && u <= last + 1e-12) {
                return Err(Error::Numeric(format!("interpolation point outside grid on axis {a}")));
            }
            // keep the 4-point window inside the grid
            let i = (u.floor() as i64).clamp(1, g.shape[a] as i64 - 3);
            weights.push(cubic_weights(u - i as f64));
            base[a] = i - 1;
        }
        let strides = g.strides();
        let mut total = 0.0;
        for corner in 0..4usize.pow(n as u32) {
            let mut c = corner;
            let mut w = 1.0;
            let mut idx = 0usize;
            for a in (0..n).rev() {
                let j = c % 4;
                c /= 4;
                w *= weights[a][j];
                idx += (base[a] + j as i64) as usize * strides[a];
            }
            total += w * self.values[idx];
        }
        Ok(total)
    }
}

/// `A^u` from the value, gradient and Hessian of a positive factor `u`.
pub fn schouten_from_jet(u: f64, du: &[f64], d2u: &DMatrix<f64>) -> DMatrix<f64> {
    let n = du.len();
    let nf = n as f64;
    let c = nf - 2.0;
    let g2: f64 = du.iter().map(|x| x * x).sum();
    let p1 = u.powf(-(nf + 2.0) / c);
    let p2 = u.powf(-2.0 * nf / c);
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = -2.0 / c * p1 * d2u[(i, j)] + 2.0 * nf / (c * c) * p2 * du[i] * du[j];
        if i == j {
            v -= 2.0 / (c * c) * p2 * g2;
        }
        v
    })
}

/// `F[ψ] = ∇²ψ + ∇ψ⊗∇ψ − ½|∇ψ|² I` from derivatives of `ψ`.
pub fn f_from_jet(dpsi: &[f64], d2psi: &DMatrix<f64>) -> DMatrix<f64> {
    let n = dpsi.len();
    let g2: f64 = dpsi.iter().map(|x| x * x).sum();
    DMatrix::from_fn(n, n, |i, j| {
        let mut v = d2psi[(i, j)] + dpsi[i] * dpsi[j];
        if i == j {
            v -= 0.5 * g2;
        }
        v
    })
}

/// `A^u` at an interior node by fourth-order differences.
pub fn schouten_euclidean(u: &EuclideanField, node: usize) -> Result<DMatrix<f64>> {
    let j = u.jet(node)?;
    if !(j.value > 0.0) {
        return Err(Error::Domain(format!("u not positive at node {node}")));
    }
    Ok(schouten_from_jet(j.value, &j.gradient, &j.hessian))
}

/// `F[ψ]` at an interior node by fourth-order differences.
pub fn f_of_psi(psi: &EuclideanField, node: usize) -> Result<DMatrix<f64>> {
    let j = psi.jet(node)?;
    Ok(f_from_jet(&j.gradient, &j.hessian))
}

/// `ψ = −(2/(n−2)) ln u`.
pub fn psi_from_u(u: &EuclideanField) -> Result<EuclideanField> {
    let c = -2.0 / (u.n() as f64 - 2.0);
    EuclideanField::signed(u.grid.clone(), u.values.iter().map(|v| c * v.ln()).collect())
}

/// `(lam / (1 + lam²|z − y0|²))^{(n−2)/2}`.
pub fn bubble(z: &[f64], y0: &[f64], lam: f64) -> f64 {
    let n = z.len() as f64;
    let r2: f64 = z.iter().zip(y0).map(|(a, b)| (a - b) * (a - b)).sum();
    (lam / (1.0 + lam * lam * r2)).powf((n - 2.0) / 2.0)
}

/// Kelvin transform `R^{n−2}|x|^{2−n} u(R²x/|x|²)` of a pointwise function.
pub fn kelvin_value<F: Fn(&[f64]) -> Result<f64>>(u: F, radius: f64, x: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Domain("Kelvin transform evaluated at the origin".into()));
    }
    let s = radius * radius / r2;
    let y: Vec<f64> = x.iter().map(|v| v * s).collect();
    Ok(radius.powf(n - 2.0) * r2.powf((2.0 - n) / 2.0) * u(&y)?)
}

/// Kelvin transform of a grid field, sampled on `target`. The source is
/// interpolated with tensor cubics, so the inverted target must map into it.
pub fn kelvin(u: &EuclideanField, radius: f64, target: GridSpec) -> Result<EuclideanField> {
    if !(radius > 0.0) {
        return Err(Error::Domain("Kelvin radius must be positive".into()));
    }
    let values = (0..target.len())
        .map(|i| kelvin_value(|y| u.interpolate(y), radius, &target.coords(i)))
        .collect::<Result<Vec<_>>>()?;
    EuclideanField::new(target, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::binomial;
    use crate::symmetric::{eigenvalues, sigma_of_matrix};

    #[test]
    fn flat_and_bubble() {
        let grid = GridSpec::cube(3, 1.0, 11).unwrap();
        let one = EuclideanField::from_fn(grid.clone(), |_| 1.0).unwrap();
        let node = grid.flat_index(&[5, 5, 5]);
        assert!(schouten_euclidean(&one, node).unwrap().amax() < 1e-13);
        let grid = GridSpec::cube(4, 1.0, 41).unwrap();
        let b = EuclideanField::from_fn(grid.clone(), |z| bubble(z, &[0.0; 4], 1.0)).unwrap();
        for idx in [[20, 20, 20, 20], [5, 30, 12, 22]] {
            let node = grid.flat_index(&idx);
            let a = schouten_euclidean(&b, node).unwrap();
            let lam = eigenvalues(&a).unwrap();
            for v in lam.values() {
                assert!((v - 2.0).abs() < 2e-4, "{v}");
            }
            let s2 = sigma_of_matrix(&a, 2).unwrap();
            assert!((s2 - 4.0 * binomial(4, 2)).abs() < 5e-3);
        }
    }

    #[test]
    fn stencil_refuses_boundary() {
        let grid = GridSpec::cube(2, 1.0, 9).unwrap();
        let one = EuclideanField::from_fn(grid.clone(), |_| 1.0).unwrap();
        assert!(matches!(schouten_euclidean(&one, 1), Err(Error::Stencil(_))));
    }

    #[test]
    fn f_of_log_bubble() {
        let grid = GridSpec::cube(3, 1.0, 21).unwrap();
        let psi = EuclideanField::signed_from_fn(grid.clone(), |z| (1.0 + z.iter().map(|v| v * v).sum::<f64>()).ln())
            .unwrap();
        let node = grid.flat_index(&[12, 8, 10]);
        let z = grid.coords(node);
        let r2: f64 = z.iter().map(|v| v * v).sum();
        let f = f_of_psi(&psi, node).unwrap();
        let want = 2.0 / (1.0 + r2).powi(2);
        for i in 0..3 {
            for j in 0..3 {
                let w = if i == j { want } else { 0.0 };
                assert!((f[(i, j)] - w).abs() < 2e-4);
            }
        }
    }

    #[test]
    fn interpolation_reproduces_cubics() {
        let grid = GridSpec::cube(2, 1.0, 9).unwrap();
        let f = EuclideanField::signed_from_fn(grid, |x| x[0].powi(3) - x[0] * x[1] + 2.0).unwrap();
        let v = f.interpolate(&[0.33, -0.91]).unwrap();
        assert!((v - (0.33f64.powi(3) + 0.33 * 0.91 + 2.0)).abs() < 1e-13);
        assert!(f.interpolate(&[1.2, 0.0]).is_err());
    }

    #[test]
    fn kelvin_of_constant() {
        let x = [0.3, -0.4, 1.2];
        let v = kelvin_value(|_| Ok(1.0), 1.0, &x).unwrap();
        let r: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
        assert!((v - r.powi(-1)).abs() < 1e-15);
        let back = kelvin_value(|y| Ok(y.iter().map(|a| a * a).sum::<f64>().powf(-0.5)), 1.0, &x).unwrap();
        assert!((back - 1.0).abs() < 1e-14);
        assert!(kelvin_value(|_| Ok(1.0), 1.0, &[0.0; 3]).is_err());
    }
}
