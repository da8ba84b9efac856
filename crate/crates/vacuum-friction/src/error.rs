//! Error taxonomy for the vacuum-friction library.
//!
//! Errors fall into two broad families that front ends map to distinct exit
//! codes: configuration/domain problems (bad inputs, malformed tables) and
//! numerical failures (non-convergence, bracket exhaustion, step underflow).

use crate::dynamics::SpinDownTrajectory;

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the physical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A permittivity table (or other input stream) is malformed.
    #[error("format error: {0}")]
    Format(String),

    /// Structurally valid input violates a physical invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A frequency query lies above the tabulated grid; callers must
    /// truncate explicitly rather than extrapolate.
    #[error("frequency {omega:.6e} rad/s above table maximum {grid_max:.6e} rad/s")]
    AboveGrid { omega: f64, grid_max: f64 },

    /// Evaluation at an essential singularity (e.g. Drude permittivity at
    /// zero frequency); callers must use the appropriate limit form.
    #[error("singularity: {0}")]
    Singularity(String),

    /// A polarizability denominator vanished (lossless plasmon resonance).
    #[error("polarizability pole: {0}")]
    Pole(String),

    /// Adaptive quadrature failed to reach the requested tolerance.
    /// The best available estimate and its error bound are preserved.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions: \
         partial result {partial:.9e} with error estimate {error_estimate:.3e}"
    )]
    QuadratureNonConvergence {
        partial: f64,
        error_estimate: f64,
        evaluations: u64,
        subdivisions: u32,
    },

    /// Sign-change bracketing failed during root isolation.
    #[error("no sign change in [{lo:.6e}, {hi:.6e}] after {expansions} bracket expansions")]
    BracketFailure { lo: f64, hi: f64, expansions: u32 },

    /// The material cannot absorb, so no thermal balance point exists.
    #[error("no equilibrium: {0}")]
    NoEquilibrium(String),

    /// Empirical monotonicity pre-check failed; the balance root may not
    /// be unique, so the solver aborts instead of returning one of several.
    #[error("absorbed power is not monotone in particle temperature: {0}")]
    NonMonotonic(String),

    /// A linear-regime probe detected dependence on the probe parameter
    /// beyond the allowed threshold.
    #[error("linear-regime probe failed: {0}")]
    Regime(String),

    /// The emission spectrum has no usable maximum.
    #[error("undefined peak: emission spectrum is zero everywhere on the search grid")]
    UndefinedPeak,

    /// Adaptive ODE step size underflowed; the trajectory accumulated so
    /// far is preserved.
    #[error("integration step underflow at t = {t:.6e} s after {accepted} accepted steps")]
    StepUnderflow {
        t: f64,
        accepted: usize,
        partial: Box<SpinDownTrajectory>,
    },
}

impl Error {
    /// True for errors caused by invalid configuration or input data
    /// (front ends report these as usage errors), false for numerical
    /// failures encountered during an otherwise valid computation.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::Format(_) | Error::Validation(_)
        )
    }
}
