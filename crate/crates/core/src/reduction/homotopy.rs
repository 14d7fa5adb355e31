use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::conformal::SphereAxisymField;
use crate::error::{Error, Result};
use crate::identities::kazdan_warner_axisym;

use super::operator::{cone_scan, linearize, residual, round_sigma};
use super::projection::{axis_xi, pi_parametrize};
use super::reduced::{solve_reduced, ReducedConfig};
use super::target::{axis_criterion, AxisCriterion};
use super::AxisymK;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyConfig {
    pub intervals: usize,
    /// Sup norm of `F_μ` accepted at every continuation step.
    pub tol: f64,
    /// Starting parameter, where the reduced map is solved for `ξ`.
    pub mu0: f64,
    /// Axis points `s e_{n+1}` scanned for a sign change of `Λ_{ξ,μ0}`.
    pub scan: Vec<f64>,
    pub mu_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub newton_iter: usize,
    /// Threshold for the nondegeneracy check on `K`.
    pub criterion_tol: f64,
}

impl Default for HomotopyConfig {
    fn default() -> Self {
        Self {
            intervals: 256,
            tol: 1e-8,
            mu0: 0.05,
            scan: (0..=36).map(|i| -0.9 + 0.05 * i as f64).collect(),
            mu_step: 0.05,
            min_step: 1e-4,
            max_step: 0.1,
            newton_iter: 30,
            criterion_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyState {
    pub mu: f64,
    pub v: SphereAxisymField,
    /// Sup norm of `F_μ[v]`.
    pub residual_norm: f64,
    /// Smallest cone margin over the nodes.
    pub cone_margin: f64,
    pub steps: usize,
}

/// One accepted continuation step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub mu: f64,
    pub residual_norm: f64,
    pub cone_margin: f64,
    pub newton_steps: usize,
    /// Sup norm of the residual after each Newton step.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub n: usize,
    pub k: usize,
    pub criterion: Option<AxisCriterion>,
    /// Axis coordinate of the zero of `Λ_{ξ,μ0}` the path starts from.
    pub xi_start: Option<f64>,
    /// `(s, Λ_{n+1})` over the scan.
    pub lambda_scan: Vec<(f64, f64)>,
    pub trace: Vec<TraceEntry>,
    pub rejected_steps: usize,
    pub state: HomotopyState,
    /// `∫ ⟨∇K, ∇x_{n+1}⟩ v^{2n/(n−2)} dv`.
    pub kazdan_warner: f64,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Damped Newton on `F_μ[v] = 0`; trial steps leaving `Γ_k` or the positive
/// cone are rejected like steps that fail the Armijo test.
pub fn newton_solve(
    v0: &SphereAxisymField,
    k_fn: &AxisymK,
    k: usize,
    mu: f64,
    tol: f64,
    max_iter: usize,
) -> Result<(SphereAxisymField, Vec<f64>)> {
    let mut v = v0.clone();
    let mut f = residual(&v, k_fn, k, mu)?;
    let mut trace = vec![sup(&f)];
    while sup(&f) > tol {
        if trace.len() > max_iter {
            return Err(Error::NoConvergence { iterations: trace.len() - 1, trace });
        }
        let jac = linearize(&v, k)?;
        let step = jac
            .lu()
            .solve(&-DVector::from_column_slice(&f))
            .ok_or_else(|| Error::Numeric("singular Jacobian".into()))?;
        let f0 = l2(&f);
        let mut lam = 1.0;
        loop {
            let vals: Vec<f64> = v.values.iter().zip(step.iter()).map(|(a, s)| a + lam * s).collect();
            let accepted = SphereAxisymField::new(v.n, vals).ok().and_then(|tv| match residual(&tv, k_fn, k, mu) {
                Ok(tf) if l2(&tf) < (1.0 - 1e-4 * lam) * f0 => Some((tv, tf)),
                _ => None,
            });
            if let Some((tv, tf)) = accepted {
                v = tv;
                f = tf;
                break;
            }
            lam *= 0.5;
            if lam < 1e-4 {
                return Err(Error::NoConvergence { iterations: trace.len() - 1, trace });
            }
        }
        trace.push(sup(&f));
    }
    Ok((v, trace))
}

fn state(v: SphereAxisymField, mu: f64, k: usize, residual_norm: f64, steps: usize) -> HomotopyState {
    let (cone_margin, _) = cone_scan(&v, k);
    HomotopyState { mu, v, residual_norm, cone_margin, steps }
}

/// Axis coordinate, starting field and the `Λ` scan.
type StartPoint = (f64, SphereAxisymField, Vec<(f64, f64)>);

/// Zero of `s ↦ Λ_{s e_{n+1}, μ}` closest to the origin, by bracketing over
/// the scan and bisection.
fn start_point(k_fn: &AxisymK, n: usize, k: usize, cfg: &HomotopyConfig) -> Result<StartPoint> {
    let rcfg = ReducedConfig { intervals: cfg.intervals, ..Default::default() };
    let lam = |s: f64| -> Result<f64> { Ok(solve_reduced(k_fn, n, k, &axis_xi(n, s), cfg.mu0, &rcfg)?.lambda[n]) };
    let scan: Vec<(f64, f64)> = cfg.scan.iter().map(|&s| Ok((s, lam(s)?))).collect::<Result<_>>()?;
    let mut brackets: Vec<(f64, f64, f64, f64)> =
        scan.windows(2).filter(|p| p[0].1 * p[1].1 <= 0.0).map(|p| (p[0].0, p[0].1, p[1].0, p[1].1)).collect();
    brackets.sort_by(|a, b| (a.0 + a.2).abs().total_cmp(&(b.0 + b.2).abs()));
    let Some(&(mut a, mut fa, mut b, mut fb)) = brackets.first() else {
        return Err(Error::NoConvergence { iterations: scan.len(), trace: scan.iter().map(|p| p.1).collect() });
    };
    for _ in 0..60 {
        if fa == 0.0 {
            b = a;
            break;
        }
        if fb == 0.0 || (b - a).abs() < 1e-12 {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = lam(m)?;
        if fm * fa > 0.0 {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let s = if fa == 0.0 { a } else { b };
    let r = solve_reduced(k_fn, n, k, &axis_xi(n, s), cfg.mu0, &rcfg)?;
    let v = pi_parametrize(&r.w, &axis_xi(n, s))?;
    Ok((s, v, scan))
}

/// Continue `F_μ[v] = 0` from `μ0` to `μ = 1`.
///
/// `K` must be positive and satisfy the degree criterion. The path starts at
/// `π(w_{ξ,μ0}, ξ)` for a zero `ξ` of the reduced map on the axis; `μ` then
/// advances with adaptive steps, doubling after each success and halving
/// after a failure.
pub fn solve_homotopy(k_fn: &AxisymK, n: usize, k: usize, cfg: &HomotopyConfig) -> Result<HomotopyReport> {
    if n < 3 || k == 0 || k > n {
        return Err(Error::Domain(format!("need n >= 3 and 1 <= k <= n, got n = {n}, k = {k}")));
    }
    if !(k_fn.min_value() > 0.0) {
        return Err(Error::Precondition("K must be positive".into()));
    }
    let kw = |v: &SphereAxisymField| kazdan_warner_axisym(v, |t| k_fn.dtheta(t));
    if k_fn.is_constant() {
        // σ_k scales like v^{−4k/(n−2)} on constants
        let c = (k_fn.coeffs[0] / round_sigma(n, k)).powf(-(n as f64 - 2.0) / (4.0 * k as f64));
        let v = SphereAxisymField::constant(n, cfg.intervals, c)?;
        let r = sup(&residual(&v, k_fn, k, 1.0)?);
        let kazdan_warner = kw(&v)?;
        let st = state(v, 1.0, k, r, 1);
        let entry =
            TraceEntry { mu: 1.0, residual_norm: r, cone_margin: st.cone_margin, newton_steps: 0, residuals: vec![r] };
        return Ok(HomotopyReport {
            n,
            k,
            criterion: None,
            xi_start: None,
            lambda_scan: Vec::new(),
            trace: vec![entry],
            rejected_steps: 0,
            state: st,
            kazdan_warner,
        });
    }
    let criterion = axis_criterion(k_fn, n, cfg.criterion_tol)?;
    if !criterion.holds {
        return Err(Error::Precondition(format!(
            "criterion fails: deg(grad K, Crit-) = {} = (-1)^n",
            criterion.deg_crit_minus
        )));
    }
    let (s0, v0, lambda_scan) = start_point(k_fn, n, k, cfg)?;
    let (mut v, res) = newton_solve(&v0, k_fn, k, cfg.mu0, cfg.tol, cfg.newton_iter)?;
    let mut trace = vec![entry_for(&v, k, cfg.mu0, res)];
    let mut mu = cfg.mu0;
    let mut prev: Option<(f64, SphereAxisymField)> = None;
    let mut step = cfg.mu_step;
    let mut rejected = 0;
    while mu < 1.0 {
        let next = if mu + step > 1.0 - 1e-9 { 1.0 } else { mu + step };
        let guess = match &prev {
            Some((pm, pv)) => {
                let r = (next - mu) / (mu - pm);
                let vals: Vec<f64> = v.values.iter().zip(&pv.values).map(|(a, b)| a + r * (a - b)).collect();
                SphereAxisymField::new(n, vals).unwrap_or_else(|_| v.clone())
            }
            None => v.clone(),
        };
        let attempt = newton_solve(&guess, k_fn, k, next, cfg.tol, cfg.newton_iter)
            .or_else(|_| newton_solve(&v, k_fn, k, next, cfg.tol, cfg.newton_iter));
        match attempt {
            Ok((nv, res)) => {
                trace.push(entry_for(&nv, k, next, res));
                prev = Some((mu, std::mem::replace(&mut v, nv)));
                mu = next;
                step = (2.0 * step).min(cfg.max_step);
            }
            Err(e) if e.is_convergence() || matches!(e, Error::ConeExit { .. } | Error::Numeric(_)) => {
                rejected += 1;
                step *= 0.5;
                if step < cfg.min_step {
                    return Err(Error::StepUnderflow { mu, step });
                }
            }
            Err(e) => return Err(e),
        }
    }
    let last = trace.last().expect("at least one accepted state");
    let (residual_norm, steps) = (last.residual_norm, trace.iter().map(|t| t.newton_steps).sum());
    let kazdan_warner = kw(&v)?;
    Ok(HomotopyReport {
        n,
        k,
        criterion: Some(criterion),
        xi_start: Some(s0),
        lambda_scan,
        trace,
        rejected_steps: rejected,
        state: state(v, 1.0, k, residual_norm, steps),
        kazdan_warner,
    })
}

fn entry_for(v: &SphereAxisymField, k: usize, mu: f64, residuals: Vec<f64>) -> TraceEntry {
    let (cone_margin, _) = cone_scan(v, k);
    TraceEntry {
        mu,
        residual_norm: *residuals.last().expect("non-empty trace"),
        cone_margin,
        newton_steps: residuals.len() - 1,
        residuals,
    }
}
