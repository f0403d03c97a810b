//! Delayed-feedback kernels.
//!
//! The model family is `(tau/l) D^{2a} x + D^a x = -(m/l) g(x(t - tau))`
//! where `g` selects the variant: the full sine nonlinearity, or the
//! linearizations near the two equilibrium families. Each kernel lives
//! behind a common trait and is selected by name at runtime (CLI `--rhs`,
//! recipe files).

/// One right-hand-side kernel `g`.
pub trait DelayedFeedback: Send + Sync {
    /// Registry name, also recorded in output headers.
    fn name(&self) -> &'static str;

    /// `g(u)` applied to the delayed state `u = x(t - tau)`.
    fn eval(&self, u: f64) -> f64;
}

/// Full nonlinear model: `g(u) = sin(u)`.
pub struct NonlinearSine;

/// Linearization near `x* = 2n*pi`: `g(u) = u`.
pub struct LinearNearX1;

/// Linearization near `x* = (2n+1)*pi`: `g(u) = -u`
/// (the feedback sign flips at the odd equilibria).
pub struct LinearNearX2;

impl DelayedFeedback for NonlinearSine {
    fn name(&self) -> &'static str {
        "sine"
    }
    fn eval(&self, u: f64) -> f64 {
        u.sin()
    }
}

impl DelayedFeedback for LinearNearX1 {
    fn name(&self) -> &'static str {
        "linear-x1"
    }
    fn eval(&self, u: f64) -> f64 {
        u
    }
}

impl DelayedFeedback for LinearNearX2 {
    fn name(&self) -> &'static str {
        "linear-x2"
    }
    fn eval(&self, u: f64) -> f64 {
        -u
    }
}

/// All registered kernels.
pub static REGISTRY: &[&dyn DelayedFeedback] = &[&NonlinearSine, &LinearNearX1, &LinearNearX2];

/// Look a kernel up by its registry name.
pub fn lookup(name: &str) -> Option<&'static dyn DelayedFeedback> {
    REGISTRY.iter().find(|r| r.name() == name).copied()
}

/// Registered kernel names, for help texts and error messages.
pub fn names() -> Vec<&'static str> {
    REGISTRY.iter().map(|r| r.name()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_lookup() {
        assert_eq!(lookup("sine").unwrap().name(), "sine");
        assert_eq!(lookup("linear-x1").unwrap().eval(0.25), 0.25);
        assert_eq!(lookup("linear-x2").unwrap().eval(0.25), -0.25);
        assert!(lookup("cubic").is_none());
        assert_eq!(names(), vec!["sine", "linear-x1", "linear-x2"]);
    }

    #[test]
    fn sine_kernel() {
        let g = lookup("sine").unwrap();
        assert_eq!(g.eval(0.0), 0.0);
        assert!((g.eval(std::f64::consts::FRAC_PI_2) - 1.0).abs() < 1e-15);
    }
}
