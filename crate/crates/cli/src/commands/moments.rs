use serde::Serialize;

use sigmak_core::conformal::bubble;
use sigmak_core::identities::{moment_limit, moments, MomentSet};
use sigmak_core::numerics::{sphere_area, Poly};

use crate::report::{check_n, Check, Failure, Outcome, Report};

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Bubble concentration.
    #[arg(long, default_value_t = 1.0)]
    pub lam: f64,
    /// Truncation radius.
    #[arg(long, default_value_t = 50.0)]
    pub r0: f64,
    /// Homogeneous polynomial weight q in y1..yn for the limiting moment.
    #[arg(long, default_value = "1")]
    pub q: String,
    #[arg(long, default_value_t = 64)]
    pub radial: usize,
    #[arg(long, default_value_t = 4)]
    pub angular: usize,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Debug, Serialize)]
struct Output {
    bubble: MomentSet,
    q_degree: u32,
    moment_limit: f64,
    /// Closed form when q is constant.
    oracle: Option<f64>,
}

/// `∫_{R^n} (1+|z|²)^{−n} dz = π^{n/2} Γ(n/2) / Γ(n)`.
fn constant_oracle(n: usize) -> f64 {
    let gamma_n: f64 = (1..n).map(|i| i as f64).product();
    2.0 * std::f64::consts::PI.powi(n as i32) / sphere_area(n - 1) / gamma_n
}

fn homogeneous_degree(q: &Poly) -> Result<u32, Failure> {
    let mut degrees = q.terms.keys().map(|e| e.iter().sum::<u32>());
    let d = degrees.next().unwrap_or(0);
    if degrees.any(|e| e != d) {
        return Err(Failure::usage("q must be homogeneous"));
    }
    Ok(d)
}

pub fn run(a: Args) -> Outcome {
    if a.selftest {
        return Ok(selftest());
    }
    check_n(a.n)?;
    let q = Poly::parse(&a.q, a.n)?;
    let d = homogeneous_degree(&q)?;
    let origin = vec![0.0; a.n];
    let u = |z: &[f64]| bubble(z, &origin, a.lam);
    let set = moments(&u, a.n, a.r0, a.radial, a.angular)?;
    let qf = |y: &[f64]| q.eval(y);
    let limit = moment_limit(&qf, d as f64, a.n, a.lam, a.r0, a.angular)?;
    let oracle = (d == 0).then(|| q.eval(&origin) * constant_oracle(a.n));
    Ok(Report::new("moments", &a, Output { bubble: set, q_degree: d, moment_limit: limit, oracle }))
}

fn selftest() -> Report {
    let n = 4;
    let origin = [0.0; 4];
    let y1 = |y: &[f64]| y[0];
    let one = |_: &[f64]| 1.0;
    let checks = vec![
        Check::close("q = y1: odd moment vanishes", moment_limit(&y1, 1.0, n, 1.0, 50.0, 4), 0.0, 1e-12),
        Check::close("q = 1, n = 4: pi^2/6", moment_limit(&one, 0.0, n, 1.0, 50.0, 4), constant_oracle(4), 1e-6),
        Check::close("bubble at its center", Ok(bubble(&origin, &origin, 1.0)), 1.0, 1e-15),
        Check::close("bubble on the unit sphere", Ok(bubble(&[1.0, 0.0, 0.0, 0.0], &origin, 1.0)), 0.5, 1e-15),
    ];
    Report::selftest("moments", checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_values() {
        assert!((constant_oracle(4) - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        assert!((constant_oracle(3) - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-14);
        assert!(homogeneous_degree(&Poly::parse("x1 + x2^2", 2).unwrap()).is_err());
        assert_eq!(homogeneous_degree(&Poly::parse("x1*x2 - x2^2", 2).unwrap()).unwrap(), 2);
    }
}
