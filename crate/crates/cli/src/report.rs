use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;
use serde_json::{json, Value};

use sigmak_core::Error;

pub const REPORT_SCHEMA: &str = "sigmak.report/1";

/// A failed run: message for stderr plus exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_precondition() {
            2
        } else if e.is_convergence() {
            3
        } else {
            1
        };
        Self { code, message: e.to_string() }
    }
}

pub type Outcome = Result<Report, Failure>;

/// Report body plus the exit status it implies.
#[derive(Debug)]
pub struct Report {
    body: Value,
    code: u8,
}

impl Report {
    /// Versioned envelope: `schema`, `command`, the echoed parameters and the
    /// result. Nothing time- or host-dependent goes in, so equal inputs give
    /// byte-equal output.
    pub fn new(command: &str, params: impl Serialize, result: impl Serialize) -> Self {
        let body = json!({
            "schema": REPORT_SCHEMA,
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "params": to_value(params),
            "result": to_value(result),
        });
        Self { body, code: 0 }
    }

    pub fn raw(body: Value) -> Self {
        Self { body, code: 0 }
    }

    pub fn selftest(command: &str, checks: Vec<Check>) -> Self {
        let failed = checks.iter().filter(|c| !c.passed).count();
        let mut r = Self::new(command, json!({ "selftest": true }), json!({ "checks": checks, "failed": failed }));
        r.code = if failed == 0 { 0 } else { 1 };
        r
    }

    pub fn emit(&self, path: Option<&Path>) -> Result<ExitCode, Failure> {
        let mut text = serde_json::to_string_pretty(&self.body).map_err(|e| Failure::io(e.to_string()))?;
        text.push('\n');
        match path {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display())))?,
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::io(e.to_string()))?,
        }
        Ok(ExitCode::from(self.code))
    }
}

fn to_value(v: impl Serialize) -> Value {
    // non-finite floats serialize as null
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// One self-test example.
#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }

    /// Passes when `|got − want| <= tol`; errors count as failures.
    pub fn close(name: &str, got: sigmak_core::Result<f64>, want: f64, tol: f64) -> Self {
        match got {
            Ok(g) => Self::new(name, (g - want).abs() <= tol, format!("{g:e} vs {want:e}")),
            Err(e) => Self::new(name, false, e.to_string()),
        }
    }
}

/// Shared range checks on `n` and `k`.
pub fn check_n(n: usize) -> Result<(), Failure> {
    if !(3..=10).contains(&n) {
        return Err(Failure::usage(format!("n = {n} must lie in 3..=10")));
    }
    Ok(())
}

/// Solver paths need `n/2 <= k <= n`.
pub fn check_solver_k(n: usize, k: usize) -> Result<(), Failure> {
    check_n(n)?;
    if 2 * k < n || k > n {
        return Err(Failure::usage(format!("k = {k} must satisfy n/2 <= k <= n for n = {n}")));
    }
    Ok(())
}

/// Identity paths need `1 <= k <= n/2`.
pub fn check_identity_k(n: usize, k: usize) -> Result<(), Failure> {
    check_n(n)?;
    if k == 0 || 2 * k > n {
        return Err(Failure::usage(format!("k = {k} must satisfy 1 <= k <= n/2 for n = {n}")));
    }
    Ok(())
}
