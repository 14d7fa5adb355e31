use serde::Serialize;

use sigmak_core::degree::{
    analyze, brouwer_degree, deg_crit_minus, find_critical_points, g_of_xi, BrouwerConfig, CriticalConfig,
    DegreeAnalysis, GRule, DEFAULT_RADII,
};
use sigmak_core::numerics::Poly;
use sigmak_core::Error;

use crate::kspec;
use crate::report::{check_n, Check, Failure, Outcome, Report};

#[derive(Debug, Clone, clap::Args, Serialize)]
pub struct Args {
    /// K as a polynomial in x1..x{n+1}, or a file holding one.
    #[arg(long = "K", required_unless_present = "selftest")]
    #[serde(rename = "K")]
    pub k_spec: Option<String>,
    /// Sphere dimension; inferred from the highest variable when absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Seed for the Newton starts of the zero search.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub selftest: bool,
}

#[derive(Debug, Serialize)]
struct Output {
    #[serde(flatten)]
    analysis: DegreeAnalysis,
    radii: Vec<f64>,
    verdict: &'static str,
}

pub fn run(a: Args) -> Outcome {
    if a.selftest {
        return Ok(selftest());
    }
    let spec = a.k_spec.as_deref().ok_or_else(|| Failure::usage("--K is required"))?;
    let (k, n) = kspec::poly(spec, a.n)?;
    check_n(n)?;
    let brouwer = BrouwerConfig { rng_seed: a.seed, ..Default::default() };
    let analysis = analyze(&k, &DEFAULT_RADII, &CriticalConfig::default(), &brouwer)?;
    let verdict =
        if analysis.criterion_holds { "criterion holds: deg ≠ (−1)^n" } else { "criterion fails: deg = (−1)^n" };
    let params = serde_json::json!({ "K": spec, "n": n, "seed": a.seed });
    Ok(Report::new("degree", params, Output { analysis, radii: DEFAULT_RADII.to_vec(), verdict }))
}

fn selftest() -> Report {
    let cfg = BrouwerConfig::default();
    let mut checks = Vec::new();
    let constant = Poly::constant(4, 2.0);
    let nondeg = matches!(
        find_critical_points(&constant, &CriticalConfig::default()),
        Err(Error::NondegeneracyViolation { .. })
    );
    checks.push(Check::new("constant K is rejected", nondeg, "expects a nondegeneracy violation"));
    checks.push(Check::new("empty Crit- gives 0", deg_crit_minus(&[]) == 0, ""));
    let id = |x: &[f64]| Ok(x.to_vec());
    let anti = |x: &[f64]| Ok(x.iter().map(|v| -v).collect());
    for (name, map, d, want) in [
        ("identity map has degree 1", &id as &(dyn Fn(&[f64]) -> _ + Sync), 3, 1),
        ("antipodal map in R^5 has degree -1", &anti, 5, -1),
    ] {
        checks.push(match brouwer_degree(map, d, 0.5, &cfg) {
            Ok(r) => Check::new(name, r.degree == want, format!("degree {}", r.degree)),
            Err(e) => Check::new(name, false, e.to_string()),
        });
    }
    let g = g_of_xi(&constant, &[0.1, -0.2, 0.0, 0.3], &GRule::for_poly(&constant))
        .map(|v| v.iter().map(|x| x.abs()).fold(0.0, f64::max));
    checks.push(Check::close("constant K: G vanishes", g, 0.0, 1e-12));
    Report::selftest("degree", checks)
}
