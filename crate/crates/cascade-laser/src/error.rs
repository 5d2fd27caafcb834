use thiserror::Error;

/// Everything that can go wrong short of a bug.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    /// A parameter is outside its physical domain.
    #[error("invalid parameter {name}: {reason} (got {value})")]
    InvalidParam {
        name: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// The closed forms are derived for a real atomic coherence; a nonzero
    /// injection phase needs the complex-coefficient route instead.
    #[error("closed forms require theta = 0 (got theta = {theta}); use the Fock-basis evolution for a complex coherence")]
    UnsupportedPhase { theta: f64 },

    /// The requested steady-state quantity does not exist: the relevant
    /// decay rate is non-positive, so the mode does not settle.
    #[error("no steady state: decay rate {rate_name} = {rate} <= 0 at gain_a = {gain_a}")]
    AboveThreshold {
        rate_name: &'static str,
        rate: f64,
        gain_a: f64,
    },

    /// A numerical routine was asked for a step it cannot take accurately.
    #[error("step size {step} exceeds stability budget {limit} for the stiffest decay rate")]
    StepSize { step: f64, limit: f64 },

    /// Long-time evolution did not settle within the allowed horizon.
    #[error("not converged after t = {t_final}: residual {residual} > tol {tol}")]
    Unconverged {
        t_final: f64,
        residual: f64,
        tol: f64,
    },

    /// A search region contains no point where the objective is defined.
    #[error("no feasible point in the search region for {objective}")]
    EmptyFeasibleRegion { objective: &'static str },

    /// A sweep or search specification is malformed.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}
