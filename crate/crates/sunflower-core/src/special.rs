//! Gamma function and principal-branch complex powers.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos coefficients, g = 7, n = 9. Relative error is a few ulps over the
// argument range this crate needs (denominators up to Gamma(2a + 2) <= Gamma(4)).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Euler gamma function for positive real arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(gamma_unchecked(x))
}

pub(crate) fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        PI / ((PI * x).sin() * gamma_unchecked(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = LANCZOS[0];
        for (i, c) in LANCZOS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + LANCZOS_G + 0.5;
        (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// Principal-branch complex power `z^p` (argument taken in (-pi, pi]).
pub fn complex_power(z: Complex64, p: f64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        if p > 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        return Err(Error::domain(format!(
            "complex_power: 0 cannot be raised to non-positive power {p}"
        )));
    }
    let r = z.norm();
    let theta = z.arg();
    Ok(Complex64::from_polar((p * r.ln()).exp(), p * theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent oracle: shift the argument up by 50 integer steps and
    /// evaluate the Stirling series there, then divide the product back out.
    fn gamma_oracle(x: f64) -> f64 {
        const SHIFT: usize = 50;
        let z = x + SHIFT as f64;
        // ln Gamma(z) via Stirling with Bernoulli-number corrections
        let mut ln_g = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln();
        let coeffs = [
            1.0 / 12.0,
            -1.0 / 360.0,
            1.0 / 1260.0,
            -1.0 / 1680.0,
            1.0 / 1188.0,
        ];
        let mut zp = z;
        for c in coeffs {
            ln_g += c / zp;
            zp *= z * z;
        }
        let mut val = ln_g.exp();
        for i in 0..SHIFT {
            val /= x + i as f64;
        }
        val
    }

    #[test]
    fn gamma_known_points() {
        assert_relative_eq!(gamma_fn(1.0).unwrap(), 1.0, max_relative = 1e-14);
        // Gamma(1/2) = sqrt(pi)
        assert_relative_eq!(
            gamma_fn(0.5).unwrap(),
            1.772_453_850_905_516,
            max_relative = 1e-13
        );
        // frozen from a 40-digit evaluation of the shifted-Stirling oracle
        assert_relative_eq!(
            gamma_fn(1.85).unwrap(),
            0.945_611_176_406_195_5,
            max_relative = 1e-13
        );
        assert_relative_eq!(gamma_fn(1.85).unwrap(), gamma_oracle(1.85), max_relative = 1e-13);
    }

    #[test]
    fn gamma_matches_oracle_on_grid() {
        let mut x = 0.1;
        while x <= 4.0 {
            assert_relative_eq!(gamma_fn(x).unwrap(), gamma_oracle(x), max_relative = 1e-12);
            x += 0.05;
        }
    }

    #[test]
    fn gamma_recurrence() {
        // |Gamma(x+1) - x Gamma(x)| <= 1e-12 Gamma(x+1) over x = 0.1, 0.2, ..., 3.0
        for i in 1..=30 {
            let x = i as f64 * 0.1;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-12 * lhs,
                "recurrence violated at x={x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
    }

    #[test]
    fn complex_power_known_points() {
        // i^0.5 = exp(i pi/4)
        let r = complex_power(Complex64::new(0.0, 1.0), 0.5).unwrap();
        assert_relative_eq!(r.re, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);
        assert_relative_eq!(r.im, std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-14);

        let r = complex_power(Complex64::new(4.0, 0.0), 0.5).unwrap();
        assert_relative_eq!(r.re, 2.0, max_relative = 1e-14);
        assert!(r.im.abs() < 1e-15);

        // frozen from a 40-digit polar-form evaluation
        let r = complex_power(Complex64::new(0.0425373, 3.65101), 0.3).unwrap();
        assert_relative_eq!(r.re, 1.316_387_360_705_868_3, max_relative = 1e-13);
        assert_relative_eq!(r.im, 0.664_947_780_146_738_3, max_relative = 1e-13);
    }

    #[test]
    fn complex_power_zero_handling() {
        assert_eq!(
            complex_power(Complex64::new(0.0, 0.0), 1.3).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert!(complex_power(Complex64::new(0.0, 0.0), 0.0).is_err());
        assert!(complex_power(Complex64::new(0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn complex_power_identity_and_root() {
        let z = Complex64::new(1.7, -2.3);
        let r = complex_power(z, 1.0).unwrap();
        assert_relative_eq!(r.re, z.re, max_relative = 1e-14);
        assert_relative_eq!(r.im, z.im, max_relative = 1e-14);

        let z = Complex64::new(2.5, 0.9); // Re z > 0
        let half = complex_power(z, 0.5).unwrap();
        let back = complex_power(half, 2.0).unwrap();
        assert_relative_eq!(back.re, z.re, max_relative = 1e-12);
        assert_relative_eq!(back.im, z.im, max_relative = 1e-12);
    }
}
