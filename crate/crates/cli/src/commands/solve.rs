use std::io::BufWriter;
use std::path::PathBuf;

use serde::Serialize;

use sigmak_core::conformal::io::{write_sphere, Encoding};
use sigmak_core::conformal::SphereAxisymField;
use sigmak_core::reduction::{residual, round_sigma, solve_homotopy, AxisymK, HomotopyConfig};

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
    /// Colatitude intervals.
    #[arg(long = "N", default_value_t = 256)]
    #[serde(rename = "N")]
    pub intervals: usize,
    /// Residual sup norm accepted at each continuation step.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Write the solution field here (CSV body under a JSON header line).
    #[arg(long = "field-out")]
    pub field_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

pub fn run(a: Args) -> Outcome {
    if a.selftest {
        return Ok(selftest());
    }
    check_solver_k(a.n, a.k)?;
    let spec = a.k_spec.as_deref().ok_or_else(|| Failure::usage("--K is required"))?;
    let k_fn = kspec::axisym(spec, a.n)?;
    if !(a.tol > 0.0) {
        return Err(Failure::usage("tol must be positive"));
    }
    let cfg = HomotopyConfig { intervals: a.intervals, tol: a.tol, ..Default::default() };
    let report = solve_homotopy(&k_fn, a.n, a.k, &cfg)?;
    if let Some(path) = &a.field_out {
        let io = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
        let file = std::fs::File::create(path).map_err(io)?;
        write_sphere(BufWriter::new(file), &report.state.v, Encoding::Csv)?;
    }
    Ok(Report::new("solve", &a, report))
}

fn selftest() -> Report {
    let mut checks = Vec::new();
    for (n, k) in [(4, 2), (5, 3), (6, 6)] {
        let name = format!("round K, n = {n}, k = {k}: v = 1 in one step");
        let cfg = HomotopyConfig { intervals: 64, ..Default::default() };
        checks.push(match solve_homotopy(&AxisymK::constant(round_sigma(n, k)), n, k, &cfg) {
            Ok(r) => {
                let dev = r.state.v.values.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
                Check::new(
                    &name,
                    dev < 1e-14 && r.trace.len() == 1,
                    format!("|v-1| {dev:.1e}, {} steps", r.trace.len()),
                )
            }
            Err(e) => Check::new(&name, false, e.to_string()),
        });
    }
    let one = SphereAxisymField::constant(4, 64, 1.0).expect("positive constant");
    let k_fn = AxisymK::new(vec![1.7, -0.1]).expect("finite coefficients");
    let mu = 0.4;
    let r = residual(&one, &k_fn, 2, mu).map(|r| {
        r.iter().enumerate().map(|(i, x)| (x - mu * (1.5 - k_fn.value(one.theta(i)))).abs()).fold(0.0, f64::max)
    });
    checks.push(Check::close("v = 1: residual is mu (round - K)", r, 0.0, 1e-12));
    Report::selftest("solve", checks)
}
