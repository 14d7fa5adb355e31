use nalgebra::DMatrix;
use proptest::prelude::*;

use sigmak_core::degree::*;
use sigmak_core::numerics::{sphere_area, Poly};
use sigmak_core::Error;

fn height(n: usize) -> Poly {
    Poly::constant(n + 1, 2.0).add(&Poly::var(n + 1, n))
}

fn parity(n: usize) -> i64 {
    if n.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

#[test]
fn height_function() {
    for n in 3..=6 {
        // two critical points; a coarse seed grid finds both and keeps S^6 cheap
        let cfg = CriticalConfig { seed_q: if n >= 5 { 3 } else { 5 }, ..Default::default() };
        let recs = find_critical_points(&height(n), &cfg).unwrap();
        assert_eq!(recs.len(), 2, "n={n}");
        let north = recs.iter().find(|r| r.x[n] > 0.0).unwrap();
        let south = recs.iter().find(|r| r.x[n] < 0.0).unwrap();
        assert_eq!((north.class, north.morse_index), (CritClass::Minus, n));
        assert_eq!((south.class, south.morse_index), (CritClass::Plus, 0));
        assert!((north.laplacian + n as f64).abs() < 1e-10);
        assert_eq!(deg_crit_minus(&recs), parity(n));
        assert_eq!(morse_sum(&recs), 1 + parity(n));
    }
}

#[test]
fn g_at_origin() {
    for n in 3..=5 {
        let k = height(n);
        let g = g_of_xi(&k, &vec![0.0; n + 1], &GRule::for_poly(&k)).unwrap();
        let want = sphere_area(n) / (n as f64 + 1.0);
        for (i, v) in g.iter().enumerate() {
            let target = if i == n { want } else { 0.0 };
            assert!((v - target).abs() < 1e-10 * want, "n={n} i={i}: {v}");
        }
    }
}

#[test]
fn height_function_g_degree_matches_prediction() {
    let k = height(3);
    let a = analyze(&k, &DEFAULT_RADII, &CriticalConfig::default(), &BrouwerConfig::default()).unwrap();
    assert!(!a.criterion_holds);
    assert_eq!(a.predicted_g_degree, 0);
    assert!(a.g_degrees.iter().all(|r| r.degree == a.predicted_g_degree), "{:?}", a.g_degrees);
}

#[test]
fn constant_is_degenerate() {
    let r = find_critical_points(&Poly::constant(5, 1.0), &CriticalConfig::default());
    assert!(matches!(r, Err(Error::NondegeneracyViolation { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Distinct diagonal quadratics have exactly the critical points `±e_i`.
    #[test]
    fn diagonal_quadratic(n in 3usize..6, c in prop::collection::vec(0.2f64..3.0, 6)) {
        let mut cs = c[..=n].to_vec();
        cs.sort_by(f64::total_cmp);
        prop_assume!(cs.windows(2).all(|w| w[1] - w[0] > 0.05));
        let mut k = Poly::constant(n + 1, 2.0);
        for (i, ci) in cs.iter().enumerate() {
            k = k.add(&Poly::var(n + 1, i).pow(2).scale(*ci));
        }
        let recs = find_critical_points(&k, &CriticalConfig::default()).unwrap();
        prop_assert_eq!(recs.len(), 2 * (n + 1));
        for r in &recs {
            let axis = r.x.iter().map(|v| v.abs()).fold(0.0, f64::max);
            prop_assert!((axis - 1.0).abs() < 1e-9);
            let i = r.x.iter().position(|v| v.abs() > 0.5).unwrap();
            // K decreases toward every e_j with c_j < c_i
            prop_assert_eq!(r.morse_index, i);
        }
        prop_assert_eq!(morse_sum(&recs), 1 + parity(n));
    }

    #[test]
    fn criterion_ignores_positive_affine_change(seed in 0u64..200, a in 0.2f64..5.0, b in -3.0f64..3.0) {
        let k = Poly::constant(4, 2.0).add(&Poly::random(4, 3, 0.5, seed));
        let Ok(base) = find_critical_points(&k, &CriticalConfig::default()) else {
            return Ok(());
        };
        let moved = find_critical_points(&k.scale(a).add(&Poly::constant(4, b)), &CriticalConfig::default()).unwrap();
        prop_assert_eq!(base.len(), moved.len());
        prop_assert_eq!(deg_crit_minus(&base), deg_crit_minus(&moved));
        prop_assert_eq!(morse_sum(&base), 1 + parity(3));
    }

    #[test]
    fn linear_map_degree_is_sign_det(d in 2usize..5, entries in prop::collection::vec(-1.0f64..1.0, 16), s in 0.3f64..0.9) {
        let m = DMatrix::from_fn(d, d, |i, j| entries[i * 4 + j]) + DMatrix::identity(d, d) * 0.3;
        let det = m.determinant();
        prop_assume!(det.abs() > 0.05);
        let f = move |x: &[f64]| Ok((&m * nalgebra::DVector::from_column_slice(x)).as_slice().to_vec());
        let r = brouwer_degree(&f, d, s, &BrouwerConfig::default()).unwrap();
        prop_assert_eq!(r.degree, if det > 0.0 { 1 } else { -1 });
        prop_assert_eq!(r.zeros.len(), 1);
    }
}
