use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Annulus parameters are inconsistent (r outside (0,1), p ≠ −ln r, ...).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The evaluation point sits on (or numerically at) a pole.
    #[error("singularity: {0}")]
    Singularity(String),

    /// Sampled boundary data disagree with the analytic law by more than allowed.
    #[error("truncation too coarse: {what} deviates by {deviation:e} (limit {limit:e})")]
    TruncationTooCoarse {
        what: String,
        deviation: f64,
        limit: f64,
    },

    #[error("no convergence after {iterations} iterations: {what}")]
    NonConvergence { what: String, iterations: usize },

    /// The tracked point y_t left (r_t, 1).
    #[error("blow-up at t = {t}: y_t = {y} left ({r_t}, 1)")]
    BlowUp { t: f64, y: f64, r_t: f64 },

    /// No λ ∈ [0,1] brackets a zero of the symmetry defect.
    #[error("balancing schedule infeasible at step {step} (s = {s}): defect {defect_lo:e} at λ=0, {defect_hi:e} at λ=1")]
    ScheduleInfeasible {
        step: usize,
        s: f64,
        defect_lo: f64,
        defect_hi: f64,
    },

    /// A stepwise invariant of a run was violated.
    #[error("invariant violated at step {step} (s = {s}): {what}")]
    InvariantViolated { step: usize, s: f64, what: String },
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::TruncationTooCoarse { .. }
                | Error::NonConvergence { .. }
                | Error::BlowUp { .. }
                | Error::ScheduleInfeasible { .. }
                | Error::InvariantViolated { .. }
        )
    }
}
