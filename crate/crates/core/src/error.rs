use thiserror::Error;

/// Errors raised across the toolkit.
///
/// Variants are grouped so front ends can map them to exit statuses:
/// [`Error::is_precondition`] covers invalid inputs and violated
/// hypotheses, [`Error::is_convergence`] covers iterative failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("stencil error: {0}")]
    Stencil(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("cone exit at {} node(s), first offenders {:?}", nodes.len(), &nodes[..nodes.len().min(8)])]
    ConeExit { nodes: Vec<usize> },

    #[error("non-degeneracy violated at {x:?}: |grad K| + |lap K| = {value:.3e}")]
    NondegeneracyViolation { x: Vec<f64>, value: f64 },

    #[error("degenerate critical point at {x:?}: smallest |hessian eigenvalue| = {value:.3e}")]
    DegenerateCritical { x: Vec<f64>, value: f64 },

    #[error("map vanishes on the boundary sphere |xi| = {radius} (min |f| = {min_norm:.3e})")]
    BoundaryZero { radius: f64, min_norm: f64 },

    #[error("suspected degenerate zero at {x:?}: |det J| = {det:.3e}")]
    DegenerateZero { x: Vec<f64>, det: f64 },

    #[error("degree scan disagrees across radii: {0:?}")]
    DegreeScanMismatch(Vec<(f64, i64)>),

    #[error(
        "quadrature not resolved at |xi| = {norm}: change {change:.3e} after refinement, try more than {panels} panels"
    )]
    Resolution { norm: f64, change: f64, panels: usize },

    #[error("no convergence after {iterations} iterations (residual trace {trace:?})")]
    NoConvergence { iterations: usize, trace: Vec<f64> },

    #[error("continuation step underflow at mu = {mu} (step {step:.3e})")]
    StepUnderflow { mu: f64, step: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::Stencil(_)
                | Error::Precondition(_)
                | Error::ConeExit { .. }
                | Error::NondegeneracyViolation { .. }
                | Error::DegenerateCritical { .. }
                | Error::BoundaryZero { .. }
                | Error::DegenerateZero { .. }
                | Error::DegreeScanMismatch(_)
                | Error::Parse(_)
        )
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::StepUnderflow { .. } | Error::Resolution { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
