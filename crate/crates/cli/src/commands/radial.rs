use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use sigmak_core::radial::{
    check_h_monotone, conserved_energy, energy_drift, gamma_of_a, h_of_a, integrate_va, ln_h, spherical_average_fn,
    tail_exponent, two_sided_upper, MonotoneReport, RK4_STEP,
};

use crate::report::{check_n, Check, Failure, Outcome, Report};

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// Initial value of the profile.
    #[arg(long, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Order used for the monotone quantity H; defaults to n/2.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 20.0)]
    pub tmax: f64,
    #[arg(long, default_value_t = RK4_STEP)]
    pub step: f64,
    /// Write (t, xi, xi', E, H) here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Debug, Serialize)]
struct Summary {
    h_a: f64,
    gamma_formula: f64,
    gamma_fit: f64,
    relative_error: f64,
    conservation_drift: f64,
    nodes: usize,
    monotone: MonotoneReport,
}

pub fn run(a: Args) -> Outcome {
    if a.selftest {
        return Ok(selftest());
    }
    check_n(a.n)?;
    let k = a.k.unwrap_or(a.n / 2);
    let p = integrate_va(a.a, a.n, a.tmax, a.step)?;
    let gamma_fit = tail_exponent(&p)?;
    let gamma_formula = gamma_of_a(a.a, a.n);
    if let Some(path) = &a.csv {
        let io = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
        let mut w = BufWriter::new(std::fs::File::create(path).map_err(io)?);
        writeln!(w, "t,xi,xi_prime,E,H").map_err(io)?;
        let e = conserved_energy(&p);
        for (i, e) in e.iter().enumerate() {
            writeln!(w, "{},{},{},{},{}", p.t[i], p.xi[i], p.xip[i], e, ln_h(&p, i, k).exp()).map_err(io)?;
        }
        w.flush().map_err(io)?;
    }
    let summary = Summary {
        h_a: h_of_a(a.a, a.n),
        gamma_formula,
        gamma_fit,
        relative_error: (gamma_fit - gamma_formula).abs() / gamma_formula,
        conservation_drift: energy_drift(&p),
        nodes: p.len(),
        monotone: check_h_monotone(&p, k),
    };
    Ok(Report::new("radial", &a, summary))
}

fn selftest() -> Report {
    let mut checks = vec![Check::close("n = 4, k = 4: bound constant", two_sided_upper(4, 4), 4.0, 1e-14)];
    let radial_u =
        |x: &[f64]| -> sigmak_core::Result<f64> { Ok((1.0 + x.iter().map(|v| v * v).sum::<f64>()).powf(-1.0)) };
    checks.push(Check::close(
        "radial u: spherical average equals u",
        spherical_average_fn(radial_u, &[0.0; 4], 0.7, 4),
        1.0 / 1.49,
        1e-12,
    ));
    for n in [4usize, 6] {
        checks.push(Check::new(
            &format!("n = {n}: gamma(0) = n - 2"),
            gamma_of_a(0.0, n) == n as f64 - 2.0,
            format!("{}", gamma_of_a(0.0, n)),
        ));
    }
    Report::selftest("radial", checks)
}
