use thiserror::Error;

use crate::solver::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature-weight index out of range.
    #[error("weight index j={j} out of range for step n={n} (valid 0..={})", n + 1)]
    WeightIndex { j: usize, n: usize },

    /// The integrator produced a non-finite or runaway value. The trajectory
    /// computed so far is preserved; unstable runs are expected outputs.
    #[error("solution diverged at step {step} (t = {time})")]
    Diverged {
        step: usize,
        time: f64,
        partial: Box<Trajectory>,
    },

    /// A bisection bracket did not straddle the threshold.
    #[error("bracket error: {0}")]
    Bracket(String),

    /// `g(tau) - tau` comes within 1e-7 of zero at a local extremum without a
    /// sign change: the classification is not trustworthy near a tangency.
    #[error("near-tangential contact of g(tau) with the identity at tau = {tau}")]
    DegenerateTangency { tau: f64 },

    /// Newton iteration did not converge within the iteration budget.
    #[error("root refinement did not converge after {iterations} iterations (|H| = {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        last_re: f64,
        last_im: f64,
        residual: f64,
    },

    /// Not enough data to produce a reportable diagnostic.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
