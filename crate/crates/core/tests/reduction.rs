use proptest::prelude::*;
use sigmak_core::conformal::{axis_pullback, AxisMobius, SphereAxisymField};
use sigmak_core::numerics::{axisym_weights, Poly};
use sigmak_core::reduction::*;
use sigmak_core::Error;

fn harmonic_eigenvalue(n: usize, k: usize, big: usize, y: impl Fn(f64) -> f64) -> f64 {
    let one = SphereAxisymField::constant(n, big, 1.0).unwrap();
    let jac = linearize(&one, k).unwrap();
    let f: Vec<f64> = (0..=big).map(|i| y(one.theta(i).cos())).collect();
    let jy = &jac * nalgebra::DVector::from_vec(f.clone());
    // ratio at a node where the harmonic is not small
    let i = big / 7;
    jy[i] / f[i]
}

#[test]
fn linearization_on_harmonics() {
    // n = 4: degree-1 zonal harmonic cos θ, degree-2 is 5cos²θ − 1
    let n = 4;
    let d = linearization_constant(n, 2);
    assert_eq!(d, 1.5);
    let l1 = harmonic_eigenvalue(n, 2, 256, |c| c);
    assert!(l1.abs() < 1e-6, "{l1}");
    let l2 = harmonic_eigenvalue(n, 2, 256, |c| 5.0 * c * c - 1.0);
    assert!((l2 - 9.0).abs() < 1e-6, "{l2}");
    // general n, k on the degree-2 harmonic (n+1)c² − 1: d (2(n+1) − n)
    for n in 3..=6 {
        for k in 1..=n {
            let want = linearization_constant(n, k) * (n as f64 + 2.0);
            let got = harmonic_eigenvalue(n, k, 256, |c| (n as f64 + 1.0) * c * c - 1.0);
            assert!((got - want).abs() < 1e-5 * want.abs().max(1.0), "n={n} k={k}: {got} vs {want}");
        }
    }
}

#[test]
fn mobius_invariance_of_residual() {
    let one = SphereAxisymField::constant(4, 256, 1.0).unwrap();
    let v = axis_pullback(&one, AxisMobius::new(0.4)).unwrap();
    let r = residual(&v, &AxisymK::constant(1.0), 2, 0.0).unwrap();
    assert!(r.iter().all(|x| x.abs() < 1e-6));
}

#[test]
fn constant_k_solves_in_one_step() {
    let r = solve_homotopy(&AxisymK::constant(1.5), 4, 2, &HomotopyConfig::default()).unwrap();
    assert!(r.state.v.values.iter().all(|v| *v == 1.0));
    assert_eq!(r.trace.len(), 1);
    let scaled = solve_homotopy(&AxisymK::constant(6.0), 4, 2, &HomotopyConfig::default()).unwrap();
    assert!(scaled.state.residual_norm < 1e-10, "{}", scaled.state.residual_norm);
}

#[test]
fn homotopy_rejects_failing_criterion() {
    let height = AxisymK::from_poly(&Poly::parse("2 + x5", 5).unwrap()).unwrap();
    let err = solve_homotopy(&height, 4, 2, &HomotopyConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
    let negative = AxisymK::new(vec![0.1, 0.5]).unwrap();
    assert!(solve_homotopy(&negative, 4, 2, &HomotopyConfig::default()).unwrap_err().is_precondition());
}

#[test]
fn homotopy_trace_is_monotone_and_in_cone() {
    let k = AxisymK::new(vec![1.5, 0.05, 0.1]).unwrap();
    let cfg = HomotopyConfig { intervals: 128, ..Default::default() };
    let r = solve_homotopy(&k, 4, 2, &cfg).unwrap();
    assert_eq!(r.state.mu, 1.0);
    for e in &r.trace {
        assert!(e.cone_margin > 0.0);
        assert!(e.residuals.windows(2).all(|w| w[1] <= w[0]), "{:?}", e.residuals);
    }
    let f = residual(&r.state.v, &k, 2, 1.0).unwrap();
    assert!(f.iter().all(|x| x.abs() <= 1e-8));
}

#[test]
fn reduced_solution_lies_in_s0() {
    let k = AxisymK::new(vec![1.5, -0.08, 0.05, 0.02]).unwrap();
    let cfg = ReducedConfig { intervals: 128, ..Default::default() };
    let r = solve_reduced(&k, 4, 2, &axis_xi(4, -0.35), 0.1, &cfg).unwrap();
    assert!(r.center_of_mass.abs() <= 1e-8);
    assert!(r.projected_residual <= 1e-9);
    let v = pi_parametrize(&r.w, &r.xi).unwrap();
    // v solves the unprojected equation up to the multiplier term
    let f = residual(&v, &k, 2, 0.1).unwrap();
    assert!(f.iter().map(|x| x.abs()).fold(0.0, f64::max) < 0.1);
    assert!(matches!(solve_reduced(&k, 4, 2, &axis_xi(4, 1.2), 0.1, &cfg), Err(Error::Domain(_))));
}

fn fields() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 6).prop_map(|c| {
        let big = 96;
        (0..=big)
            .map(|i| {
                let t = std::f64::consts::PI * i as f64 / big as f64;
                c.iter().enumerate().map(|(m, a)| a * (m as f64 * t).cos()).sum()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent_and_orthogonal(f in fields(), n in 3usize..=6) {
        let once = project_pi(&f, n);
        let twice = project_pi(&once, n);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        let big = f.len() - 1;
        let w = axisym_weights(n, big);
        let inner: f64 = once
            .iter()
            .zip(&w)
            .enumerate()
            .map(|(i, (v, q))| q * v * (std::f64::consts::PI * i as f64 / big as f64).cos())
            .sum();
        prop_assert!(inner.abs() <= 1e-10);
    }

    #[test]
    fn reflection_commutes_with_residual(c in prop::collection::vec(-0.03f64..0.03, 3), mu in 0.0f64..1.0) {
        let v = SphereAxisymField::from_fn(4, 64, |t| 1.0 + c[0] * t.cos() + c[1] * (2.0 * t).cos()).unwrap();
        let k = AxisymK::new(vec![1.5, c[2], 0.05]).unwrap();
        let a = residual(&v, &k, 2, mu).unwrap();
        let b = residual(&v.reflected(), &k.reflected(), 2, mu).unwrap();
        for (x, y) in a.iter().zip(b.iter().rev()) {
            prop_assert!((x - y).abs() <= 1e-10);
        }
    }
}
