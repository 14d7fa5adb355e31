use nalgebra::DMatrix;
use proptest::prelude::*;
use sigmak_core::symmetric::*;

fn brute_sigma(v: &[f64], k: usize) -> f64 {
    let n = v.len();
    let mut total = 0.0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize == k {
            total += (0..n).filter(|i| mask & (1 << i) != 0).map(|i| v[i]).product::<f64>();
        }
    }
    total
}

fn sym_from(n: usize, raw: &[f64]) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |i, j| raw[i * n + j]);
    0.5 * (&m + m.transpose())
}

fn spectra() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=8).prop_flat_map(|n| prop::collection::vec(-3.0f64..3.0, n))
}

fn matrices(lo: usize, hi: usize) -> impl Strategy<Value = DMatrix<f64>> {
    (lo..=hi).prop_flat_map(|n| prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |r| sym_from(n, &r)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sigma_matches_subset_enumeration(v in spectra()) {
        let s = Spectrum::new(v.clone()).unwrap();
        let scale: f64 = v.iter().map(|x| x.abs()).fold(1.0, f64::max);
        for k in 1..=v.len() {
            let got = sigma(&s, k).unwrap();
            let want = brute_sigma(&v, k);
            let bound = 1e-12 * scale.powi(k as i32) * sigmak_core::numerics::binomial(v.len(), k);
            prop_assert!((got - want).abs() <= bound.max(1e-12 * want.abs()), "k={} {} vs {}", k, got, want);
        }
    }

    #[test]
    fn cone_is_nested(v in spectra()) {
        let s = Spectrum::new(v.clone()).unwrap();
        for k in 1..=v.len() {
            if in_gamma_k(&s, k, CONE_TOL) {
                for j in 1..k {
                    prop_assert!(in_gamma_k(&s, j, CONE_TOL));
                }
            }
        }
    }

    #[test]
    fn newton_trace_identity(f in matrices(2, 8)) {
        let n = f.nrows();
        let lam = eigenvalues(&f).unwrap();
        let e = sigma_all(lam.values());
        let ts = newton_tensors(&f, n - 1).unwrap();
        for (l, t) in ts.iter().enumerate() {
            let want = (n - l) as f64 * e[l];
            let scale = 1.0 + f.norm().powi(l as i32) * sigmak_core::numerics::binomial(n, l);
            prop_assert!((t.trace() - want).abs() <= 1e-11 * scale.max(want.abs()));
        }
    }

    #[test]
    fn newton_tensor_psd_on_closed_cone(f in matrices(2, 6)) {
        let n = f.nrows();
        let lam = eigenvalues(&f).unwrap();
        let e = sigma_all(lam.values());
        for l in 0..n {
            if (1..=l + 1).all(|j| e[j] >= 0.0) {
                let t = newton_tensor(&f, l).unwrap();
                let min = eigenvalues(&t).unwrap().values()[0];
                prop_assert!(min >= -1e-10 * (1.0 + t.norm()), "l={} min={}", l, min);
            }
        }
    }

    #[test]
    fn sigma_of_matrix_agrees_with_reference_eigensolver(a in matrices(1, 8)) {
        let reference = a.clone().symmetric_eigen().eigenvalues;
        let mut r: Vec<f64> = reference.iter().copied().collect();
        r.sort_by(f64::total_cmp);
        let ours = eigenvalues(&a).unwrap();
        for (x, y) in ours.values().iter().zip(&r) {
            prop_assert!((x - y).abs() < 1e-12 * (1.0 + a.norm()));
        }
        let es = sigma_all(&r);
        for (k, want) in es.iter().enumerate().skip(1) {
            let got = sigma_of_matrix(&a, k).unwrap();
            prop_assert!((got - want).abs() <= 1e-12 * (1.0 + want.abs()) * (1.0 + a.norm()).powi(k as i32));
        }
    }

    #[test]
    fn dsigma_matches_central_differences(a in matrices(2, 5), k in 1usize..5) {
        let n = a.nrows();
        let k = k.min(n);
        let g = dsigma_da(&a, k).unwrap();
        let h = 1e-5;
        for i in 0..n {
            for j in i..n {
                let mut e = DMatrix::<f64>::zeros(n, n);
                e[(i, j)] = 1.0;
                e[(j, i)] = 1.0;
                let plus = sigma_of_matrix(&(&a + &e * h), k).unwrap();
                let minus = sigma_of_matrix(&(&a - &e * h), k).unwrap();
                let fd = (plus - minus) / (2.0 * h);
                let analytic = if i == j { g[(i, i)] } else { 2.0 * g[(i, j)] };
                prop_assert!((fd - analytic).abs() < 1e-6 * (1.0 + analytic.abs()), "({},{}) {} vs {}", i, j, fd, analytic);
            }
        }
    }
}
