use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The quadruple defining one instance of the delay equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub l: f64,
    pub m: f64,
    pub alpha: f64,
    pub tau: f64,
}

impl SystemParams {
    pub fn new(l: f64, m: f64, alpha: f64, tau: f64) -> Result<Self> {
        let p = SystemParams { l, m, alpha, tau };
        p.validate()?;
        Ok(p)
    }

    /// `l, m > 0`, `alpha` in (0, 1], `tau >= 0`. Time stepping additionally
    /// needs `tau > 0`; the delay-free reduction is still meaningful for the
    /// characteristic-equation analysis.
    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0) || !self.l.is_finite() {
            return Err(Error::domain(format!("l must be positive, got {}", self.l)));
        }
        if !(self.m > 0.0) || !self.m.is_finite() {
            return Err(Error::domain(format!("m must be positive, got {}", self.m)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::domain(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::domain(format!(
                "tau must be non-negative, got {}",
                self.tau
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SystemParams::new(14.0, 5.6, 0.85, 4.0).is_ok());
        assert!(SystemParams::new(0.0, 5.6, 0.85, 4.0).is_err());
        assert!(SystemParams::new(14.0, -1.0, 0.85, 4.0).is_err());
        assert!(SystemParams::new(14.0, 5.6, 1.2, 4.0).is_err());
        assert!(SystemParams::new(14.0, 5.6, 0.0, 4.0).is_err());
        assert!(SystemParams::new(14.0, 5.6, 0.85, -1.0).is_err());
        assert!(SystemParams::new(14.0, 5.6, 0.85, 0.0).is_ok());
    }
}
