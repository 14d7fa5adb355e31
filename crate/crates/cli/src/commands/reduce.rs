use serde::Serialize;

use sigmak_core::conformal::SphereAxisymField;
use sigmak_core::reduction::{
    axis_xi, pi_parametrize, project_pi, residual, round_sigma, solve_reduced, AxisymK, ReducedConfig,
};

use crate::kspec;
use crate::report::{check_solver_k, Check, Failure, Outcome, Report};

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Axisymmetric K: polynomial in x{n+1}, or a .csv colatitude profile.
    #[arg(long = "K", required_unless_present = "selftest")]
    #[serde(rename = "K")]
    pub k_spec: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Axis coordinate s of xi = s e_{n+1}, or all n+1 coordinates comma separated.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub xi: String,
    #[arg(long, default_value_t = 0.05)]
    pub mu: f64,
    /// Colatitude intervals.
    #[arg(long = "N", default_value_t = 256)]
    #[serde(rename = "N")]
    pub intervals: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

pub fn parse_xi(src: &str, n: usize) -> Result<Vec<f64>, Failure> {
    let parts: Vec<f64> = src
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::usage(format!("bad xi component {s:?}"))))
        .collect::<Result<_, _>>()?;
    match parts.len() {
        1 => Ok(axis_xi(n, parts[0])),
        m if m == n + 1 => Ok(parts),
        m => Err(Failure::usage(format!("xi needs 1 or {} components, got {m}", n + 1))),
    }
}

pub fn run(a: Args) -> Outcome {
    if a.selftest {
        return Ok(selftest());
    }
    check_solver_k(a.n, a.k)?;
    let spec = a.k_spec.as_deref().ok_or_else(|| Failure::usage("--K is required"))?;
    let k_fn = kspec::axisym(spec, a.n)?;
    let xi = parse_xi(&a.xi, a.n)?;
    if !(0.0..=1.0).contains(&a.mu) {
        return Err(Failure::usage(format!("mu = {} must lie in [0, 1]", a.mu)));
    }
    let cfg = ReducedConfig { intervals: a.intervals, tol: a.tol, ..Default::default() };
    let sol = solve_reduced(&k_fn, a.n, a.k, &xi, a.mu, &cfg)?;
    Ok(Report::new("reduce", &a, sol))
}

fn selftest() -> Report {
    let (n, k) = (4, 2);
    let round = AxisymK::constant(round_sigma(n, k));
    let cfg = ReducedConfig { intervals: 64, ..Default::default() };
    let mut checks = Vec::new();
    for (s, mu) in [(0.0, 0.5), (0.4, 0.2), (-0.3, 1.0)] {
        let name = format!("round K at s = {s}, mu = {mu}: w = 1, Lambda = 0");
        checks.push(match solve_reduced(&round, n, k, &axis_xi(n, s), mu, &cfg) {
            Ok(r) => {
                let lam = r.lambda.iter().map(|v| v.abs()).fold(0.0, f64::max);
                Check::new(
                    &name,
                    r.deviation() < 1e-10 && lam < 1e-10,
                    format!("|w-1| {:.1e}, |Lambda| {lam:.1e}", r.deviation()),
                )
            }
            Err(e) => Check::new(&name, false, e.to_string()),
        });
    }
    let c = vec![2.5; 65];
    let pc = project_pi(&c, n);
    checks.push(Check::new("projection fixes constants", pc.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-13), ""));
    let one = SphereAxisymField::constant(n, 64, 1.0).expect("positive constant");
    checks.push(Check::new("pi(1, 0) = 1", pi_parametrize(&one, &axis_xi(n, 0.0)).is_ok_and(|v| v == one), ""));
    let k_fn = AxisymK::new(vec![1.5, 0.05, 0.1]).expect("finite coefficients");
    let r0 = residual(&one, &k_fn, k, 0.0).map(|r| r.iter().map(|v| v.abs()).fold(0.0, f64::max));
    checks.push(Check::close("v = 1, mu = 0: zero residual", r0, 0.0, 1e-12));
    Report::selftest("reduce", checks)
}
