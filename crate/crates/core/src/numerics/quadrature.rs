//! Quadrature rules: Gauss–Legendre on intervals, product rules on spheres,
//! polar rules on balls, and spectrally accurate colatitude weights for
//! axisymmetric functions on `S^n`.

use std::f64::consts::PI;

use super::special::sphere_area;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=m {
        let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
        p0 = p1;
        p1 = p2;
    }
    let p = if m == 0 { 1.0 } else { p1 };
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss–Legendre rule mapped onto `[a, b]`.
pub fn gauss_legendre_on(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(m);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (x.iter().map(|&t| mid + half * t).collect(), w.iter().map(|&v| v * half).collect())
}

/// Product quadrature on the unit sphere `S^m ⊂ R^{m+1}`.
///
/// Built recursively in hyperspherical coordinates. The first polar level of
/// `S^2` uses Gauss–Legendre in `cos a`, `S^3` uses Gauss–Chebyshev of the
/// second kind, higher levels Gauss–Legendre in the angle itself, and `S^1`
/// the uniform rule. For `m <= 3` the rule is exact on polynomials of degree
/// below `2q`.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    /// Flattened points, `dim + 1` coordinates each.
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    pub fn new(m: usize, q: usize) -> Self {
        assert!(m >= 1 && q >= 1);
        if m == 1 {
            let count = 2 * q;
            let mut points = Vec::with_capacity(2 * count);
            for i in 0..count {
                let a = 2.0 * PI * (i as f64 + 0.5) / count as f64;
                points.push(a.cos());
                points.push(a.sin());
            }
            return Self { dim: 1, points, weights: vec![2.0 * PI / count as f64; count] };
        }
        let lower = SphereRule::new(m - 1, q);
        // polar coordinate c = cos a with weight (1 - c^2)^{(m-2)/2}
        let (cs, ws): (Vec<f64>, Vec<f64>) = match m {
            2 => gauss_legendre(q),
            3 => {
                let mut c = Vec::with_capacity(q);
                let mut w = Vec::with_capacity(q);
                for i in 1..=q {
                    let a = i as f64 * PI / (q + 1) as f64;
                    c.push(a.cos());
                    w.push(PI / (q + 1) as f64 * a.sin().powi(2));
                }
                (c, w)
            }
            _ => {
                let (a, w) = gauss_legendre_on(2 * q + 2 * m + 4, 0.0, PI);
                let c = a.iter().map(|t| t.cos()).collect();
                let w = a.iter().zip(&w).map(|(t, wi)| wi * t.sin().powi(m as i32 - 1)).collect();
                (c, w)
            }
        };
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (&c, &wc) in cs.iter().zip(&ws) {
            let s = (1.0 - c * c).max(0.0).sqrt();
            for (j, &wl) in lower.weights.iter().enumerate() {
                points.push(c);
                for d in 0..m {
                    points.push(s * lower.points[j * m + d]);
                }
                weights.push(wc * wl);
            }
        }
        Self { dim: m, points, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim + 1;
        &self.points[i * d..(i + 1) * d]
    }

    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        (0..self.len()).map(|i| self.weights[i] * f(self.point(i))).sum()
    }
}

/// Polar quadrature on the ball `B_r(center) ⊂ R^n`: Gauss–Legendre in the
/// radius times a [`SphereRule`] on `S^{n-1}`.
#[derive(Debug, Clone)]
pub struct BallRule {
    pub n: usize,
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BallRule {
    pub fn new(n: usize, center: &[f64], radius: f64, radial: usize, angular: usize) -> Self {
        Self::annulus(n, center, 0.0, radius, radial, angular)
    }

    pub fn annulus(n: usize, center: &[f64], inner: f64, outer: f64, radial: usize, angular: usize) -> Self {
        assert!(n >= 2 && center.len() == n);
        let sphere = SphereRule::new(n - 1, angular);
        let (rs, wr) = gauss_legendre_on(radial, inner, outer);
        let mut points = Vec::with_capacity(rs.len() * sphere.len() * n);
        let mut weights = Vec::with_capacity(rs.len() * sphere.len());
        for (&r, &w) in rs.iter().zip(&wr) {
            let jac = w * r.powi(n as i32 - 1);
            for j in 0..sphere.len() {
                let omega = sphere.point(j);
                for d in 0..n {
                    points.push(center[d] + r * omega[d]);
                }
                weights.push(jac * sphere.weights[j]);
            }
        }
        Self { n, points, weights }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }
}

/// Quadrature weights for `∫_{S^n} f(θ) dv` over the colatitude grid
/// `θ_i = iπ/N`, `i = 0..=N`.
///
/// The samples are interpolated by a cosine series (the even periodic
/// extension of a smooth axisymmetric function) and the series is integrated
/// against `|S^{n-1}| sin^{n-1}θ` exactly, which gives spectral accuracy.
pub fn axisym_weights(n: usize, intervals: usize) -> Vec<f64> {
    assert!(n >= 2 && intervals >= 2);
    let big_n = intervals;
    let h = PI / big_n as f64;
    let moments = cosine_moments(n, big_n);
    let area = sphere_area(n - 1);
    (0..=big_n)
        .map(|i| {
            let ci = if i == 0 || i == big_n { 0.5 } else { 1.0 };
            let theta = i as f64 * h;
            let s: f64 = (0..=big_n)
                .map(|m| {
                    let cm = if m == 0 || m == big_n { 0.5 } else { 1.0 };
                    cm * (m as f64 * theta).cos() * moments[m]
                })
                .sum();
            area * ci * 2.0 / big_n as f64 * s
        })
        .collect()
}

/// `∫_0^π cos(mθ) sin^{n-1}θ dθ` for `m = 0..=N`.
fn cosine_moments(n: usize, big_n: usize) -> Vec<f64> {
    let (t, w) = gauss_legendre_on(2 * big_n + 64, 0.0, PI);
    let base: Vec<f64> = t.iter().zip(&w).map(|(x, wi)| wi * x.sin().powi(n as i32 - 1)).collect();
    (0..=big_n).map(|m| t.iter().zip(&base).map(|(x, b)| b * (m as f64 * x).cos()).sum()).collect()
}
