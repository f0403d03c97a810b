//! Trapezoidal product-quadrature weights for the two fractional memory sums.
//!
//! The integrator discretizes the order-`a` and order-`2a` fractional
//! integrals with product-trapezoidal rules whose weights at step `n` are,
//! for exponent parameter `p` (either `a` or `2a`):
//!
//! - `j = 0`:        `n^{p+1} - (n - p)(n + 1)^p`
//! - `1 <= j <= n`:  `(n-j+2)^{p+1} + (n-j)^{p+1} - 2(n-j+1)^{p+1}`
//! - `j = n + 1`:    `1`
//!
//! The middle entries depend only on `n - j`, so a whole run shares one O(N)
//! table of second differences.

use crate::error::{Error, Result};

fn second_difference(d: f64, p: f64) -> f64 {
    let q = p + 1.0;
    (d + 2.0).powf(q) + d.powf(q) - 2.0 * (d + 1.0).powf(q)
}

fn head_weight(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    nf.powf(p + 1.0) - (nf - p) * (nf + 1.0).powf(p)
}

fn weight_checked(j: usize, n: usize, p: f64) -> Result<f64> {
    if j > n + 1 {
        return Err(Error::WeightIndex { j, n });
    }
    Ok(if j == n + 1 {
        1.0
    } else if j == 0 {
        head_weight(n, p)
    } else {
        second_difference((n - j) as f64, p)
    })
}

/// Weight `a_{j,n+1}` of the order-`alpha` memory sum.
pub fn weight_a(j: usize, n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    weight_checked(j, n, alpha)
}

/// Weight `b_{j,n+1}` of the order-`2 alpha` memory sum.
pub fn weight_b(j: usize, n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    weight_checked(j, n, 2.0 * alpha)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Cached weight table for one exponent parameter and one run length.
///
/// Holds the O(N) second-difference column; full rows are materialized on
/// demand. Immutable once built, so it can be shared across threads.
#[derive(Debug, Clone)]
pub struct QuadWeightTable {
    order: f64,
    diffs: Vec<f64>,
}

impl QuadWeightTable {
    /// Build the table for exponent parameter `order` (`alpha` or `2 alpha`)
    /// covering steps `n = 0..=max_step`.
    pub fn new(order: f64, max_step: usize) -> Self {
        let diffs = (0..=max_step)
            .map(|d| second_difference(d as f64, order))
            .collect();
        QuadWeightTable { order, diffs }
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// Second differences indexed by `d = n - j`; the integrator's inner loop
    /// reads this column directly.
    pub fn diffs(&self) -> &[f64] {
        &self.diffs
    }

    pub fn head(&self, n: usize) -> f64 {
        head_weight(n, self.order)
    }

    pub fn weight(&self, j: usize, n: usize) -> Result<f64> {
        if j >= 1 && j <= n {
            debug_assert!(n - j < self.diffs.len());
            return Ok(self.diffs[n - j]);
        }
        weight_checked(j, n, self.order)
    }

    /// The full row of `n + 2` weights for step `n` (indices `j = 0..=n+1`).
    pub fn row(&self, n: usize) -> Vec<f64> {
        let mut row = Vec::with_capacity(n + 2);
        row.push(head_weight(n, self.order));
        for j in 1..=n {
            row.push(self.diffs[n - j]);
        }
        row.push(1.0);
        row
    }
}
