use thiserror::Error;

/// Errors shared by all simulator modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller combined values in an inconsistent way (length mismatch,
    /// unsorted sequence, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// All retained amplitudes vanish; the requested quantity is undefined.
    #[error("degenerate state: {0}")]
    Degenerate(String),

    /// An adaptive refinement loop hit its hard cap before reaching the
    /// requested tolerance.
    #[error("convergence failure: {context} (achieved {achieved:e}, requested {requested:e})")]
    Convergence {
        context: String,
        achieved: f64,
        requested: f64,
    },

    /// The mode-sum escalation in `overlap_limit_check` hit its hard cap.
    /// Carries the points computed so far.
    #[error("mode-sum truncation cap reached at epsilon = {epsilon}")]
    TruncationCap {
        epsilon: f64,
        partial: Vec<crate::perturbation::LimitPoint>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
