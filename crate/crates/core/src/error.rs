use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes do not agree.
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    /// Argument outside the domain of an operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vector is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("svd did not converge after {sweeps} sweeps (largest residual off-diagonal ratio {residual:e})")]
    SvdNoConvergence { sweeps: usize, residual: f64 },

    /// Requested ancilla dimension is smaller than the bond dimension of the
    /// target state, so no sequential chain can produce it.
    #[error("ancilla too small: dimension {d} is below the bond dimension chi = {chi}")]
    AncillaTooSmall { d: usize, chi: usize },

    #[error("ancilla not decoupled: reduced ancilla purity is {purity}")]
    NotDecoupled { purity: f64 },

    /// A step breaks `V0†V0 + V1†V1 = I`. `entries` lists the `(i, j)` cells
    /// (1-based, as in the printed table) of the largest deviations.
    #[error(
        "isometry sum rule violated at step {step}: defect {defect:e}, worst cells {entries:?}; \
         compare against the MPS-derived isometries (mps::to_isometries)"
    )]
    SumRuleViolation { step: usize, defect: f64, entries: Vec<(usize, usize)> },

    #[error("branch probabilities sum to {sum}, expected 1")]
    ProbabilityLeak { sum: f64 },

    #[error("the number of clones M must be odd for economical phase-covariant cloning (got M = {0})")]
    EvenCloneCount(usize),

    #[error("phase-covariant cloning only accepts equatorial inputs (theta = pi/2), got theta = {0}")]
    NotEquatorial(f64),

    #[error("clone count {m} exceeds the hard cap of {cap}")]
    TooManyClones { m: usize, cap: usize },
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NotNormalized(_)
                | Error::SvdNoConvergence { .. }
                | Error::NotDecoupled { .. }
                | Error::SumRuleViolation { .. }
                | Error::ProbabilityLeak { .. }
                | Error::DimensionMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
