use serde::Serialize;

use sigmak_core::conformal::bubble;
use sigmak_core::identities::{delta_energy_profile, Domain};

use crate::report::{check_n, Check, Failure, Outcome, Report};

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Bubble concentration.
    #[arg(long, default_value_t = 1.0)]
    pub lam: f64,
    /// Use the constant field u = eps instead of a bubble.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Outer radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Inner radius; the domain is an annulus when set.
    #[arg(long)]
    pub inner: Option<f64>,
    #[arg(long, default_value_t = 32)]
    pub radial: usize,
    #[arg(long, default_value_t = 4)]
    pub angular: usize,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

pub fn run(a: Args) -> Outcome {
    if a.selftest {
        return Ok(selftest());
    }
    check_n(a.n)?;
    let domain = match a.inner {
        Some(inner) => Domain::Annulus { inner, outer: a.radius },
        None => Domain::Ball { radius: a.radius },
    };
    let origin = vec![0.0; a.n];
    let result = match a.eps {
        Some(eps) if !(eps > 0.0) => return Err(Failure::usage("eps must be positive")),
        Some(eps) => delta_energy_profile(&|_: &[f64]| eps, a.n, domain, a.radial, a.angular)?,
        None => delta_energy_profile(&|z: &[f64]| bubble(z, &origin, a.lam), a.n, domain, a.radial, a.angular)?,
    };
    Ok(Report::new("energy", &a, result))
}

fn selftest() -> Report {
    let ball = Domain::Ball { radius: 1.0 };
    let mut checks = Vec::new();
    let mut last = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        let name = format!("u = {eps:e} on the unit ball: T and energy shrink");
        checks.push(match delta_energy_profile(&|_: &[f64]| eps, 4, ball, 16, 4) {
            Ok(r) => {
                let ok = r.t_sup <= eps * 1.0001 && r.energy < last;
                last = r.energy;
                Check::new(&name, ok, format!("T {:.2e}, energy {:.2e}", r.t_sup, r.energy))
            }
            Err(e) => Check::new(&name, false, e.to_string()),
        });
    }
    Report::selftest("energy", checks)
}
