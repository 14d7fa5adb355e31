/// Four-point Lagrange weights for a sample at fractional offset `s ∈ [0,1)`
/// from node `i`, using nodes `i-1, i, i+1, i+2`.
pub fn cubic_weights(s: f64) -> [f64; 4] {
    [
        -s * (s - 1.0) * (s - 2.0) / 6.0,
        (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
        -(s + 1.0) * s * (s - 2.0) / 2.0,
        (s + 1.0) * s * (s - 1.0) / 6.0,
    ]
}

/// Cubic interpolation on a uniform 1D grid `x_i = x0 + i h`, `i = 0..len`.
///
/// `fetch` receives possibly out-of-range indices and is responsible for
/// boundary handling (reflection, extrapolation, or refusal).
pub fn cubic_1d<F: Fn(i64) -> f64>(fetch: F, x0: f64, h: f64, x: f64) -> f64 {
    let u = (x - x0) / h;
    let i = u.floor();
    let s = u - i;
    let w = cubic_weights(s);
    let i = i as i64;
    (0..4).map(|j| w[j] * fetch(i - 1 + j as i64)).sum()
}
