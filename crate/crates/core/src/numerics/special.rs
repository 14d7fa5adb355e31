use std::f64::consts::PI;

/// Binomial coefficient as a float; zero outside `0 <= k <= n`.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Rising factorial `x (x+1) ... (x+j-1)`, equal to 1 for `j = 0`.
pub fn rising_factorial(x: f64, j: usize) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (x + i as f64))
}

/// Gamma function restricted to positive half-integers.
fn gamma_half_integer(two_x: usize) -> f64 {
    // two_x = 2x, x in {1/2, 1, 3/2, ...}
    assert!(two_x >= 1);
    let mut value = if two_x.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut t = if two_x.is_multiple_of(2) { 2 } else { 1 };
    while t < two_x {
        value *= t as f64 / 2.0;
        t += 2;
    }
    value
}

/// Area of the unit sphere `S^m` in `R^{m+1}`.
pub fn sphere_area(m: usize) -> f64 {
    2.0 * PI.powf((m + 1) as f64 / 2.0) / gamma_half_integer(m + 1)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n - 1) / n as f64
}

/// `ln cosh(x)` without overflow for large `|x|`.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `sech(x)^2` evaluated stably, positive until underflow.
pub fn sech2(x: f64) -> f64 {
    let a = x.abs();
    let e = (-2.0 * a).exp();
    4.0 * e / ((1.0 + e) * (1.0 + e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(10, 5), 252.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(7, 0), 1.0);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!((ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn rising() {
        assert_eq!(rising_factorial(3.0, 0), 1.0);
        assert_eq!(rising_factorial(3.0, 3), 60.0);
    }

    #[test]
    fn stable_hyperbolics() {
        for &x in &[0.0f64, 0.3, -2.0, 15.0, 400.0] {
            let direct = if x < 300.0 { x.cosh().ln() } else { x - std::f64::consts::LN_2 };
            assert!((ln_cosh(x) - direct).abs() < 1e-12 * (1.0 + direct.abs()));
        }
        assert!(sech2(20.0) > 0.0);
        assert!((sech2(0.7) - 1.0 / 0.7f64.cosh().powi(2)).abs() < 1e-15);
    }
}
