//! Error type shared by every module of the library.

use thiserror::Error;

/// Library-wide error enumeration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Matrix determinant too small relative to the matrix scale.
    #[error("singular matrix: |det| = {det_abs:.3e} below pivot threshold")]
    SingularMatrix { det_abs: f64 },

    /// Scalar argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Connection parameters violate their algebraic constraints.
    #[error("invalid connection parameters: {0}")]
    InvalidParams(String),

    /// Gamma-function evaluation requested at a pole or on the branch cut.
    #[error("log-gamma pole or branch cut at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    /// Operation undefined at the trivial point (s1 = 0).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Parametrix evaluation requested on the jump contour |zeta| = 1.
    #[error("point on the jump contour: |zeta| - 1 = {0:.3e}")]
    OnContour(f64),

    /// Adaptive integrator step size collapsed.
    #[error("step underflow at x = {x:.6e} (h = {h:.3e})")]
    StepUnderflow { x: f64, h: f64 },

    /// Integrator state left the finite range.
    #[error("non-finite state at x = {x:.6e}")]
    NonFinite { x: f64 },

    /// Fit/crosscheck window shorter than required.
    #[error("window too short: {0}")]
    WindowTooShort(String),

    /// Iterative fit did not converge within the iteration cap.
    #[error("fit did not converge within {iters} iterations")]
    NoConvergence { iters: usize },

    /// Oscillation amplitude below the phase-identifiability threshold.
    /// Carries the envelope amplitude so callers can still report sigma.
    #[error("amplitude too small for phase fit: sigma estimate {sigma:.3e}")]
    AmplitudeTooSmall { sigma: f64 },

    /// One comparison side has a defined phase and the other does not.
    #[error("phase defined on one side only: {0}")]
    PhaseUndefined(String),
}

/// Convenient result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
