use proptest::prelude::*;
use sigmak_core::identities::*;
use sigmak_core::numerics::Poly;

fn bubble_log(x: &[f64]) -> f64 {
    (1.0 + x.iter().map(|v| v * v).sum::<f64>()).ln()
}

#[test]
fn random_quartic_psi_all_ell() {
    for n in 3..=5 {
        let p = Poly::random(n, 4, 0.5, 100 + n as u64);
        let psi = |x: &[f64]| p.eval(x);
        let pts = sample_points(n, 4, 0.5, n as u64);
        for ell in 0..n {
            let r = check_divergence(&psi, ell, &pts, &DEFAULT_STEPS).unwrap();
            // exact for T_0 since the stencils are exact on quartics
            if ell == 0 {
                assert!(r.residual < 1e-9, "n={n}: {r:?}");
            } else {
                assert!(r.order.unwrap() >= 3.5, "n={n} l={ell}: {r:?}");
            }
        }
    }
}

#[test]
fn weighted_identity_orders() {
    let p = Poly::random(4, 4, 0.5, 11);
    let psi = |x: &[f64]| p.eval(x);
    let pts = sample_points(4, 4, 0.5, 12);
    let r = check_weighted_divergence(&psi, 0, 4.0, -2.0, &pts, &DEFAULT_STEPS).unwrap();
    assert!(r.order.unwrap() >= 3.5, "{r:?}");
    let r = check_weighted_divergence(&bubble_log, 1, 2.0, 1.0, &pts, &DEFAULT_STEPS).unwrap();
    assert!(r.order.unwrap() >= 3.5, "{r:?}");
}

#[test]
fn summed_identity_orders_and_single_term() {
    let p = Poly::random(4, 4, 0.5, 21);
    let psi = |x: &[f64]| p.eval(x);
    let pts = sample_points(4, 4, 0.5, 22);
    let r = check_summed_identity(&psi, 2, 1.0, 3.0, 3.1, &pts, &DEFAULT_STEPS).unwrap();
    assert!(r.order.unwrap() >= 3.5, "{r:?}");
    let c = r.coefficients.expect("specialization with delta = 0.1");
    assert!(c.all_positive && (c.delta - 0.1).abs() < 1e-12);

    // k = 1 is the weighted identity with l = 0, p = 0
    let a = check_summed_identity(&bubble_log, 1, 0.7, 2.0, 2.5, &pts, &[0.05]).unwrap();
    let b = check_weighted_divergence(&bubble_log, 0, 0.0, 0.7, &pts, &[0.05]).unwrap();
    assert!((a.residual - b.residual).abs() < 1e-9, "{a:?} {b:?}");
}

#[test]
fn prop_variant_with_positive_exponent() {
    let pts = sample_points(4, 10, 1.0, 31);
    let rep = cacciopoli_sides(
        &bubble_log,
        4,
        2,
        CacciopoliVariant::Negative { s: 1.0 },
        0.05,
        1.0,
        2.0,
        &pts,
        &CacciopoliConfig::default(),
    )
    .unwrap();
    assert!(rep.lhs.is_finite() && rep.lhs > 0.0);
    assert!(rep.holds, "{rep:?}");
}

#[test]
fn constant_psi_cacciopoli_gradient_terms_vanish() {
    let pts = sample_points(4, 5, 1.0, 32);
    let rep = cacciopoli_sides(
        &|_: &[f64]| 0.3,
        4,
        2,
        CacciopoliVariant::Positive { q: 1.0 },
        0.05,
        1.0,
        2.0,
        &pts,
        &CacciopoliConfig::default(),
    )
    .unwrap();
    assert!(rep.lhs.abs() < 1e-12);
    assert!(rep.sigma_integral.abs() < 1e-12);
    assert!(rep.mass_integral > 0.0);
}

#[test]
fn second_moments_are_isotropic() {
    let q_ll = |l: usize, p: usize| move |y: &[f64]| y[l] * y[p];
    let off = moment_limit(&q_ll(0, 1), 2.0, 4, 20.0, 1.0, 6).unwrap();
    assert!(off.abs() < 1e-12);
    let diag: Vec<f64> = (0..4).map(|p| moment_limit(&q_ll(p, p), 2.0, 4, 20.0, 1.0, 6).unwrap()).collect();
    assert!(diag[0] > 0.0);
    for d in &diag {
        assert!((d - diag[0]).abs() < 1e-10 * diag[0]);
    }
}

#[test]
fn moment_limit_increases_toward_oracle() {
    let oracle = std::f64::consts::PI.powi(2) / 6.0;
    let mut prev = 0.0;
    for r in [1.0, 5.0, 10.0, 25.0, 50.0] {
        let v = moment_limit(&|_: &[f64]| 1.0, 0.0, 4, 1.0, r, 4).unwrap();
        assert!(v > prev && v < oracle);
        prev = v;
    }
    assert!(oracle - prev < 1e-6);
}

#[test]
fn truncated_tail_profile_is_finite() {
    let u = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>().powf(-1.0);
    let d = delta_energy_profile(&u, 4, Domain::Annulus { inner: 0.5, outer: 1.0 }, 8, 4).unwrap();
    assert!(d.t_sup.is_finite() && d.energy.is_finite() && d.energy > 0.0);
    let eps = |e: f64| delta_energy_profile(&move |_: &[f64]| e, 4, Domain::Ball { radius: 1.0 }, 8, 4).unwrap();
    assert!(eps(1e-3).t_sup < eps(1e-1).t_sup && eps(1e-3).energy < 1e-10);
}

fn quad_exp(c: [f64; 4]) -> impl Fn(&[f64]) -> f64 + Sync {
    move |x: &[f64]| (c[0] + c[1] * x[0] + c[2] * x[1] * x[2] - c[3] * x[0] * x[0]).exp()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn convexity_defect_nonnegative(
        a in prop::array::uniform4(-1.0f64..1.0),
        b in prop::array::uniform4(-1.0f64..1.0),
        seed in 0u64..1000,
    ) {
        let pts = sample_points(3, 1, 1.0, seed);
        let r = check_convexity(&quad_exp(a), &quad_exp(b), &pts, 0.05).unwrap();
        prop_assert!(r.min_eigenvalue >= -1e-10, "{:?}", r);
    }

    #[test]
    fn specialization_positive(n in 2usize..=10, kk in 1usize..=5, delta in 1e-6f64..=0.1) {
        prop_assume!(2 * kk <= n);
        prop_assert!(specialization_coefficients(n, kk, delta).unwrap().all_positive);
    }
}
