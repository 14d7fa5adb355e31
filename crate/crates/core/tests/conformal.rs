use nalgebra::DMatrix;
use proptest::prelude::*;

use sigmak_core::conformal::sphere::sphere_factor_from_euclidean;
use sigmak_core::conformal::*;
use sigmak_core::numerics::stencil::jet2;
use sigmak_core::numerics::Poly;
use sigmak_core::reduction::sigma_field;

fn unit(v: Vec<f64>) -> Vec<f64> {
    let r = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / r).collect()
}

/// `v(θ) = 1 + a cos θ + b cos 2θ` with its first two derivatives.
fn trig(a: f64, b: f64) -> impl Fn(f64) -> (f64, f64, f64) {
    move |t| {
        (
            1.0 + a * t.cos() + b * (2.0 * t).cos(),
            -a * t.sin() - 2.0 * b * (2.0 * t).sin(),
            -a * t.cos() - 4.0 * b * (2.0 * t).cos(),
        )
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stereographic_round_trip(y in prop::collection::vec(-4.0f64..4.0, 2..7)) {
        let x = stereographic_to_sphere(&y);
        let norm: f64 = x.iter().map(|v| v * v).sum();
        prop_assert!((norm - 1.0).abs() < 1e-14);
        let back = sphere_to_stereographic(&x).unwrap();
        for (a, b) in y.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-14 * (1.0 + a.abs()).powi(2));
        }
    }

    /// `A^u = e^{2ψ} F[ψ]` with `ψ = −2/(n−2) ln u`, on exact jets of `u = e^p`.
    #[test]
    fn schouten_matches_f_of_psi(seed in 0u64..1000, n in 3usize..7, x in prop::collection::vec(-0.5f64..0.5, 6)) {
        let p = Poly::random(n, 3, 0.4, seed);
        let x = &x[..n];
        let u = p.eval(x).exp();
        let g = p.gradient(x);
        let h = p.hessian(x);
        let gv = nalgebra::DVector::from_column_slice(&g);
        let d2u = (&h + &gv * gv.transpose()) * u;
        let du: Vec<f64> = g.iter().map(|v| u * v).collect();
        let c = -2.0 / (n as f64 - 2.0);
        let dpsi: Vec<f64> = g.iter().map(|v| c * v).collect();
        let d2psi = &h * c;
        let a = schouten_from_jet(u, &du, &d2u);
        let f = f_from_jet(&dpsi, &d2psi) * (2.0 * c * p.eval(x)).exp();
        prop_assert!((&a - &f).norm() < 1e-11 * (1.0 + a.norm()), "{a} vs {f}");
    }

    /// Every bubble has `A^u = 2I`, whatever its center and scale.
    #[test]
    fn bubble_schouten_is_2i(n in 3usize..6, lam in 0.3f64..3.0, c in prop::collection::vec(-0.5f64..0.5, 5), z in prop::collection::vec(-0.7f64..0.7, 5)) {
        let y0 = &c[..n];
        let u = |p: &[f64]| bubble(p, y0, lam);
        let j = jet2(&u, &z[..n], 2e-3 / lam);
        let a = schouten_from_jet(j.value, &j.gradient, &j.hessian);
        let two = DMatrix::<f64>::identity(n, n) * 2.0;
        prop_assert!((&a - &two).norm() < 1e-6, "{a}");
    }

    #[test]
    fn kelvin_is_an_involution(n in 3usize..6, radius in 0.5f64..2.0, lam in 0.5f64..2.0, x in prop::collection::vec(-2.0f64..2.0, 5)) {
        let x = &x[..n];
        prop_assume!(x.iter().map(|v| v * v).sum::<f64>() > 1e-2);
        let c: Vec<f64> = (0..n).map(|i| 0.1 * i as f64).collect();
        let u = |p: &[f64]| Ok(bubble(p, &c, lam));
        let once = |p: &[f64]| kelvin_value(u, radius, p);
        let twice = kelvin_value(once, radius, x).unwrap();
        let direct = u(x).unwrap();
        prop_assert!((twice - direct).abs() < 1e-12 * direct);
    }

    /// Pullback by the axis map agrees with `φ_{P,t}` for `P = e_{n+1}`.
    #[test]
    fn axis_map_matches_mobius(n in 3usize..6, t in 1.0f64..6.0, theta in 0.0f64..std::f64::consts::PI) {
        let map = MobiusMap::new(unit((0..=n).map(|i| if i == n { 1.0 } else { 0.0 }).collect()), t).unwrap();
        let axis = AxisMobius::new(map.axis_tau().unwrap());
        let mut x = vec![0.0; n + 1];
        x[0] = theta.sin();
        x[n] = theta.cos();
        let y = map.apply(&x);
        let image = y[n].clamp(-1.0, 1.0).acos();
        prop_assert!((image - axis.map_theta(theta)).abs() < 1e-10);
        prop_assert!((map.factor(&x) - axis.factor(theta)).abs() < 1e-10 * map.factor(&x));
        let back = map.apply_inverse(&y);
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn pullbacks_compose(t1 in -1.5f64..1.5, t2 in -1.5f64..1.5, a in -0.3f64..0.3, b in -0.2f64..0.2) {
        let v = trig(a, b);
        let (p1, p2) = (AxisMobius::new(t1), AxisMobius::new(t2));
        for i in 0..=32 {
            let th = std::f64::consts::PI * i as f64 / 32.0;
            let nested = p2.pullback_value(4, |s| p1.pullback_value(4, |r| v(r).0, s), th);
            let direct = AxisMobius::new(t1 + t2).pullback_value(4, |r| v(r).0, th);
            prop_assert!((nested - direct).abs() < 1e-12 * direct);
        }
    }
}

/// `σ_k` of the pulled-back metric is `σ_k` of the original composed with `φ`.
#[test]
fn curvature_naturality() {
    let big = 256;
    for (n, k) in [(4usize, 2usize), (5, 3), (6, 1)] {
        for tau in [-0.8, 0.5] {
            let phi = AxisMobius::new(tau);
            let v = trig(0.15, -0.05);
            let pulled = SphereAxisymField::from_fn(n, big, |t| phi.pullback_value(n, |r| v(r).0, t)).unwrap();
            let sig = sigma_field(&pulled, k).unwrap();
            for (i, s) in sig.iter().enumerate() {
                let image = phi.map_theta(pulled.theta(i));
                let (f, d1, d2) = v(image);
                let (lt, ls) = axisym_eigs_from(n, image, f, d1, d2);
                let want = sigma_axisym(n, k, lt, ls).0;
                assert!((s - want).abs() < 1e-6 * (1.0 + want.abs()), "n={n} k={k} tau={tau} i={i}: {s} vs {want}");
            }
        }
    }
}

#[test]
fn round_metric_is_mobius_invariant() {
    let one = SphereAxisymField::constant(5, 512, 1.0).unwrap();
    for t in [1.0, 2.0, 7.5] {
        let map = MobiusMap::new(vec![0.0, 0.0, 0.0, 0.0, 0.0, -1.0], t).unwrap();
        let v = mobius_pullback(&one, &map).unwrap();
        for i in 0..=v.intervals() {
            let (lt, ls) = axisym_eigs(&v, i);
            assert!((lt - 0.5).abs() < 1e-5 && (ls - 0.5).abs() < 1e-5, "t={t} i={i}: {lt} {ls}");
        }
    }
    let identity = mobius_pullback(&one, &MobiusMap::identity(5)).unwrap();
    assert!(identity.values.iter().all(|x| (x - 1.0).abs() < 1e-15));
}

#[test]
fn constant_factor_scales_eigenvalues() {
    for n in 3..=6 {
        let c = 1.7;
        let v = SphereAxisymField::constant(n, 32, c).unwrap();
        let want = 0.5 * c.powf(-4.0 / (n as f64 - 2.0));
        for i in [0, 7, 16, 32] {
            let (lt, ls) = axisym_eigs(&v, i);
            assert!((lt - want).abs() < 1e-12 && (ls - want).abs() < 1e-12);
        }
    }
}

/// The standard bubble pulled back to the sphere is a constant multiple of the round metric.
#[test]
fn stereographic_bubble_is_round() {
    for n in 3..=6 {
        let want = 0.5f64.powf((n as f64 - 2.0) / 2.0);
        let v = SphereAxisymField::from_fn(n, 128, |theta| {
            if theta == 0.0 {
                return want;
            }
            // projection from the north pole: |y| = cot(θ/2)
            let mut y = vec![0.0; n];
            y[0] = theta.sin() / (1.0 - theta.cos());
            sphere_factor_from_euclidean(n, bubble(&y, &vec![0.0; n], 1.0), y[0] * y[0])
        })
        .unwrap();
        assert!(v.values.iter().all(|x| (x - want).abs() < 1e-12 * want), "n={n}");
    }
}
