use crate::error::{Error, Result};
use crate::numerics::{CompiledPoly, Poly, SphereRule};

/// Quadrature for `ξ ↦ ∫_{S^n} K∘φ_{P,t} x dv` in coordinates adapted to
/// `P = ξ/|ξ|`.
///
/// With `β` the angle from `P`, the map acts by `tan(β'/2) = tan(β/2)/t`.
/// Integrating in the image angle `β'` moves all concentration into a layer
/// of width `~1/t` at `β' = 0`, which geometric panels resolve uniformly in
/// `t`. The angular factor is a polynomial in `ω ∈ S^{n−1}`, so a fixed
/// product rule of sufficient degree is exact there.
#[derive(Debug, Clone)]
pub struct GRule {
    pub n: usize,
    degree: u32,
    panels: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    omega: SphereRule,
}

impl GRule {
    /// `panels` geometric panels toward `β' = 0` with `nodes` Gauss points
    /// each; `degree` bounds the polynomial degree of `K`.
    pub fn new(n: usize, degree: u32, panels: usize, nodes: usize) -> Self {
        let (g, w) = crate::numerics::gauss_legendre(nodes);
        let omega = SphereRule::new(n - 1, degree as usize / 2 + 2);
        Self { n, degree, panels, nodes: g, weights: w, omega }
    }

    pub fn for_poly(k: &Poly) -> Self {
        Self::new(k.dim - 1, k.degree(), 14, 12)
    }

    /// Image-angle nodes for dilation `t`: enough halving panels to reach
    /// well below the layer width `1/t`.
    fn beta_nodes(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let panels = ((t.log2().ceil() as usize) + 5).min(self.panels).max(2);
        let mut edges = vec![0.0];
        edges.extend((0..panels).rev().map(|i| std::f64::consts::PI * 0.5f64.powi(i as i32)));
        let mut beta = Vec::with_capacity(panels * self.nodes.len());
        let mut wts = Vec::with_capacity(panels * self.nodes.len());
        for e in edges.windows(2) {
            let (mid, half) = (0.5 * (e[0] + e[1]), 0.5 * (e[1] - e[0]));
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                beta.push(mid + half * x);
                wts.push(half * w);
            }
        }
        (beta, wts)
    }
}

/// `G(ξ) = ∫_{S^n} K(φ_{P,t}(x)) x dv(x)` with `P = ξ/|ξ|`, `t = 1/(1−|ξ|)`,
/// and `φ = id` at `ξ = 0`.
pub fn g_of_xi(k: &Poly, xi: &[f64], rule: &GRule) -> Result<Vec<f64>> {
    g_of_xi_compiled(&k.compile(), k.dim, xi, rule)
}

/// [`g_of_xi`] for a precompiled `K` in `d = n + 1` variables.
pub fn g_of_xi_compiled(kc: &CompiledPoly, d: usize, xi: &[f64], rule: &GRule) -> Result<Vec<f64>> {
    let n = d - 1;
    if xi.len() != d || rule.n != n {
        return Err(Error::Domain(format!("ξ must lie in R^{d} and the rule on S^{n}")));
    }
    let r = xi.iter().map(|a| a * a).sum::<f64>().sqrt();
    if !(r < 1.0) {
        return Err(Error::Domain(format!("|ξ| = {r} must be below 1")));
    }
    let (p, t) = if r == 0.0 {
        let mut p = vec![0.0; d];
        p[n] = 1.0;
        (p, 1.0)
    } else {
        (xi.iter().map(|a| a / r).collect::<Vec<_>>(), 1.0 / (1.0 - r))
    };
    let frame = super::critical::tangent_frame(&p);
    let m = rule.omega.len();
    let mut es = vec![0.0; m * d];
    for j in 0..m {
        let om = rule.omega.point(j);
        for a in 0..d {
            es[j * d + a] = (0..n).map(|c| frame[(a, c)] * om[c]).sum();
        }
    }
    // On the great circle through P and e_j, K is a trigonometric
    // polynomial of degree `deg` in β'; recover it from 2 deg + 1 samples.
    let deg = rule.degree as usize;
    let samples = 2 * deg + 1;
    let mut cos_coef = vec![0.0; m * (deg + 1)];
    let mut sin_coef = vec![0.0; m * (deg + 1)];
    let mut img = vec![0.0; d];
    for j in 0..m {
        let e = &es[j * d..(j + 1) * d];
        for q in 0..samples {
            let phi = 2.0 * std::f64::consts::PI * q as f64 / samples as f64;
            let (sp, cp) = phi.sin_cos();
            for a in 0..d {
                img[a] = cp * p[a] + sp * e[a];
            }
            let f = kc.eval(&img) / samples as f64;
            for h in 0..=deg {
                let scale = if h == 0 { 1.0 } else { 2.0 };
                let (sh, ch) = (h as f64 * phi).sin_cos();
                cos_coef[j * (deg + 1) + h] += scale * f * ch;
                sin_coef[j * (deg + 1) + h] += scale * f * sh;
            }
        }
    }
    let (beta, beta_w) = rule.beta_nodes(t);
    let mut out = vec![0.0; d];
    let mut harm_c = vec![0.0; deg + 1];
    let mut harm_s = vec![0.0; deg + 1];
    for (&bp, &wb) in beta.iter().zip(&beta_w) {
        let half = 0.5 * bp;
        let (sh, ch) = half.sin_cos();
        // β = 2 atan(t tan(β'/2)) and dβ/dβ'
        let b = 2.0 * (t * sh).atan2(ch);
        let jac = t / (ch * ch + t * t * sh * sh);
        let (sb, cb) = b.sin_cos();
        let radial = wb * jac * sb.powi(n as i32 - 1);
        for h in 0..=deg {
            let (s_h, c_h) = (h as f64 * bp).sin_cos();
            harm_c[h] = c_h;
            harm_s[h] = s_h;
        }
        // Σ_j w_j K(img_j) (cb P + sb e_j) split into the P part and the e part
        let mut along = 0.0;
        for j in 0..m {
            let cc = &cos_coef[j * (deg + 1)..(j + 1) * (deg + 1)];
            let sc = &sin_coef[j * (deg + 1)..(j + 1) * (deg + 1)];
            let kv: f64 = (0..=deg).map(|h| cc[h] * harm_c[h] + sc[h] * harm_s[h]).sum();
            let w = radial * rule.omega.weights[j] * kv;
            along += w;
            let e = &es[j * d..(j + 1) * d];
            for a in 0..d {
                out[a] += w * sb * e[a];
            }
        }
        for a in 0..d {
            out[a] += along * cb * p[a];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::MobiusMap;
    use crate::numerics::sphere_area;

    #[test]
    fn origin_and_constant() {
        for n in [3, 4] {
            let k = Poly::parse(&format!("2 + x{}", n + 1), n + 1).unwrap();
            let rule = GRule::for_poly(&k);
            let g = g_of_xi(&k, &vec![0.0; n + 1], &rule).unwrap();
            let want = sphere_area(n) / (n as f64 + 1.0);
            assert!((g[n] - want).abs() < 1e-12 && g[..n].iter().all(|v| v.abs() < 1e-12), "{g:?}");
            let c = Poly::constant(n + 1, 3.0);
            let mut xi = vec![0.1; n + 1];
            xi[0] = 0.7;
            let g = g_of_xi(&c, &xi, &GRule::for_poly(&c)).unwrap();
            assert!(g.iter().all(|v| v.abs() < 1e-12), "{g:?}");
        }
    }

    #[test]
    fn matches_direct_quadrature() {
        let k = Poly::random(4, 3, 1.0, 5);
        let xi = [0.2, -0.1, 0.3, 0.25];
        let r = xi.iter().map(|a| a * a).sum::<f64>().sqrt();
        let map = MobiusMap::new(xi.iter().map(|a| a / r).collect(), 1.0 / (1.0 - r)).unwrap();
        let direct_rule = SphereRule::new(3, 60);
        let mut direct = [0.0; 4];
        for i in 0..direct_rule.len() {
            let x = direct_rule.point(i);
            let v = k.eval(&map.apply(x));
            for a in 0..4 {
                direct[a] += direct_rule.weights[i] * v * x[a];
            }
        }
        let g = g_of_xi(&k, &xi, &GRule::for_poly(&k)).unwrap();
        for a in 0..4 {
            assert!((g[a] - direct[a]).abs() < 1e-9, "{g:?} {direct:?}");
        }
    }
}
