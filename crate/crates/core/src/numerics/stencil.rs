//! Fourth-order central difference stencils.
//!
//! All stencils use offsets `-2..=2`. Point-wise routines take any scalar
//! function of position and a step `h`; grid fields reuse the coefficient
//! tables directly.

use nalgebra::DMatrix;

pub const OFFSETS: [i64; 5] = [-2, -1, 0, 1, 2];
/// First derivative, to be divided by `h`.
pub const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
/// Second derivative, to be divided by `h^2`.
pub const D2: [f64; 5] = [-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0, -1.0 / 12.0];

/// Value, gradient and Hessian of a scalar function at one point.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

fn shifted(x: &[f64], axis: usize, delta: f64, buf: &mut [f64]) {
    buf.copy_from_slice(x);
    buf[axis] += delta;
}

pub fn derivative_1d<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    OFFSETS.iter().zip(D1.iter()).map(|(&o, &c)| c * f(x + o as f64 * h)).sum::<f64>() / h
}

pub fn second_derivative_1d<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    OFFSETS.iter().zip(D2.iter()).map(|(&o, &c)| c * f(x + o as f64 * h)).sum::<f64>() / (h * h)
}

pub fn gradient<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut buf = x.to_vec();
    (0..n)
        .map(|a| {
            let mut s = 0.0;
            for (&o, &c) in OFFSETS.iter().zip(D1.iter()) {
                if c != 0.0 {
                    shifted(x, a, o as f64 * h, &mut buf);
                    s += c * f(&buf);
                }
            }
            s / h
        })
        .collect()
}

/// Value, gradient and Hessian by fourth-order central differences.
pub fn jet2<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], h: f64) -> Jet2 {
    let n = x.len();
    let value = f(x);
    let mut buf = x.to_vec();
    let mut gradient = vec![0.0; n];
    let mut hessian = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut g = 0.0;
        let mut d2 = 0.0;
        for (i, &o) in OFFSETS.iter().enumerate() {
            let fv = if o == 0 {
                value
            } else {
                shifted(x, a, o as f64 * h, &mut buf);
                f(&buf)
            };
            g += D1[i] * fv;
            d2 += D2[i] * fv;
        }
        gradient[a] = g / h;
        hessian[(a, a)] = d2 / (h * h);
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let mut s = 0.0;
            for (i, &oa) in OFFSETS.iter().enumerate() {
                if D1[i] == 0.0 {
                    continue;
                }
                for (j, &ob) in OFFSETS.iter().enumerate() {
                    if D1[j] == 0.0 {
                        continue;
                    }
                    buf.copy_from_slice(x);
                    buf[a] += oa as f64 * h;
                    buf[b] += ob as f64 * h;
                    s += D1[i] * D1[j] * f(&buf);
                }
            }
            let v = s / (h * h);
            hessian[(a, b)] = v;
            hessian[(b, a)] = v;
        }
    }
    Jet2 { value, gradient, hessian }
}

/// Divergence of a vector field `V: R^n -> R^n`.
pub fn divergence<V: Fn(&[f64]) -> Vec<f64>>(field: &V, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let mut buf = x.to_vec();
    let mut total = 0.0;
    for a in 0..n {
        let mut s = 0.0;
        for (&o, &c) in OFFSETS.iter().zip(D1.iter()) {
            if c != 0.0 {
                shifted(x, a, o as f64 * h, &mut buf);
                s += c * field(&buf)[a];
            }
        }
        total += s / h;
    }
    total
}

/// Row divergence `∂_a M^a_b` of a matrix field, returned as a vector in `b`.
pub fn matrix_divergence<M: Fn(&[f64]) -> DMatrix<f64>>(field: &M, x: &[f64], h: f64) -> Vec<f64> {
    let n = x.len();
    let mut buf = x.to_vec();
    let mut out = vec![0.0; n];
    for a in 0..n {
        for (&o, &c) in OFFSETS.iter().zip(D1.iter()) {
            if c == 0.0 {
                continue;
            }
            shifted(x, a, o as f64 * h, &mut buf);
            let m = field(&buf);
            for (b, slot) in out.iter_mut().enumerate() {
                *slot += c * m[(a, b)] / h;
            }
        }
    }
    out
}
