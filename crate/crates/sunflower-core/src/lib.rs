//! Numerical toolkit for the fractional-order sunflower delay differential equation
//!
//! ```text
//! (tau/l) D^{2a} x(t) + D^a x(t) = -(m/l) g(x(t - tau)),    0 < a <= 1,
//! ```
//!
//! where `D^a` is the Caputo derivative and `g` is one of a small family of
//! delayed-feedback kernels (the sine nonlinearity or its linearizations near
//! the two equilibrium families `2n*pi` and `(2n+1)*pi`).
//!
//! The crate provides:
//! - a predictor–corrector time stepper with trapezoidal product-quadrature
//!   memory sums ([`solver`]),
//! - characteristic-equation stability analysis: crossing frequencies, the
//!   critical-delay map `g(tau)`, equilibrium classification and complex
//!   root refinement ([`stability`]),
//! - regime-boundary curve tracing in the `lm`-plane ([`bifurcation`]),
//! - chaos diagnostics: asymptotic cycle counting and the maximum Lyapunov
//!   exponent via trajectory-separation tracking ([`chaos`]).

pub mod bifurcation;
pub mod chaos;
mod error;
pub mod params;
pub mod rhs;
pub mod solver;
pub mod special;
pub mod stability;
pub mod weights;

pub use error::{Error, Result};
pub use params::SystemParams;
