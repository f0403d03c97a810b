//! Regime-boundary curves in the `lm`-plane.
//!
//! Two boundaries matter for the even equilibria at small fractional order:
//! the tangency curve `m = h2(l)`, where `g(tau)` first touches the identity
//! (stable-for-all vs. stability switch), and the escape curve `m = h1(l)`,
//! where the second intersection of `g` with the identity leaves the scan
//! horizon (stability switch vs. single stable region). The escape is a
//! limit statement, so `h1` is defined operationally against an explicit
//! horizon which is part of the returned record.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stability::{critical_delay_g, ScanConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    H1,
    H2,
}

/// One sampled point of a boundary curve; `m` is `None` where bracketing
/// failed (recorded as a gap, not a fatal error).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub l: f64,
    pub m: Option<f64>,
}

/// A sampled boundary curve `m = h(l)` at fixed fractional order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationCurve {
    pub alpha: f64,
    pub which: CurveKind,
    pub samples: Vec<CurveSample>,
    /// Scan horizon used by the underlying predicates.
    pub horizon: f64,
}

/// An escape threshold together with the horizon that defines it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonThreshold {
    pub m: f64,
    pub horizon: f64,
}

/// Minimum of `g(tau) - tau` over the scan grid, golden-refined around the
/// grid argmin. Doubling `grid_points` near bisection convergence guards
/// against missed tangencies.
fn min_g_minus_tau(l: f64, m: f64, alpha: f64, scan: &ScanConfig) -> f64 {
    let n = scan.grid_points;
    let phi = |tau: f64| critical_delay_g(l, m, alpha, tau).expect("validated coefficients") - tau;
    let mut best_i = 1usize;
    let mut best = f64::INFINITY;
    let grid = |i: usize| scan.horizon * i as f64 / n as f64;
    for i in 1..=n {
        let v = phi(grid(i));
        if v < best {
            best = v;
            best_i = i;
        }
    }
    if best <= 0.0 {
        return best;
    }
    let lo = grid(best_i.saturating_sub(1).max(1)).min(grid(best_i) * 0.5);
    let hi = grid((best_i + 1).min(n));
    let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = phi(c);
    let mut fd = phi(d);
    for _ in 0..200 {
        if b - a < 1e-12 * b.max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = phi(d);
        }
    }
    best.min(fc).min(fd)
}

fn check_tangency_inputs(l: f64, alpha: f64) -> Result<()> {
    if !(l > 0.0) {
        return Err(Error::domain(format!("l must be positive, got {l}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(())
}

/// Tangency predicate behind `h2`: does `g` touch or cross the identity
/// anywhere on the scan window?
fn touches(l: f64, m: f64, alpha: f64, scan: &ScanConfig) -> f64 {
    min_g_minus_tau(l, m, alpha, scan)
}

/// Threshold `m* = h2(l)`: bisection (1e-6 relative) on the tangency
/// predicate. The bracket must satisfy: no contact at `m_lo`, contact at
/// `m_hi`.
pub fn tangency_threshold_h2(
    l: f64,
    alpha: f64,
    m_bracket: (f64, f64),
    scan: &ScanConfig,
) -> Result<f64> {
    check_tangency_inputs(l, alpha)?;
    scan.validate()?;
    let (mut lo, mut hi) = m_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("bad m bracket ({lo}, {hi})")));
    }
    let contact_lo = touches(l, lo, alpha, scan) <= 0.0;
    let contact_hi = touches(l, hi, alpha, scan) <= 0.0;
    if contact_lo == contact_hi {
        return Err(Error::Bracket(format!(
            "tangency predicate is {contact_lo} at both ends of ({lo}, {hi})"
        )));
    }
    let fine = ScanConfig {
        horizon: scan.horizon,
        grid_points: scan.grid_points * 2,
    };
    let tol = 1e-6;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        // doubled scan resolution once the bracket is nearly converged
        let use_fine = hi - lo <= 64.0 * tol * hi;
        let s = if use_fine { &fine } else { scan };
        if touches(l, mid, alpha, s) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Escape predicate behind `h1`: a second intersection still exists below
/// the horizon, i.e. `g(T) - T > 0` at `T = horizon`.
fn second_intersection_below(l: f64, m: f64, alpha: f64, horizon: f64) -> bool {
    critical_delay_g(l, m, alpha, horizon).expect("validated coefficients") > horizon
}

/// Threshold `m = h1(l)` at the given horizon: bisection (1e-4 relative) on
/// the escape predicate. The bracket must satisfy: switch regime at `m_lo`
/// (predicate true), single-stable-region regime at `m_hi` (false).
pub fn escape_threshold_h1(
    l: f64,
    alpha: f64,
    m_bracket: (f64, f64),
    horizon: f64,
) -> Result<HorizonThreshold> {
    check_tangency_inputs(l, alpha)?;
    if !(horizon > 0.0) {
        return Err(Error::domain("horizon must be positive"));
    }
    let (mut lo, mut hi) = m_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::domain(format!("bad m bracket ({lo}, {hi})")));
    }
    let p_lo = second_intersection_below(l, lo, alpha, horizon);
    let p_hi = second_intersection_below(l, hi, alpha, horizon);
    if p_lo == p_hi {
        return Err(Error::Bracket(format!(
            "escape predicate is {p_lo} at both ends of ({lo}, {hi})"
        )));
    }
    let tol = 1e-4;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if second_intersection_below(l, mid, alpha, horizon) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(HorizonThreshold {
        m: 0.5 * (lo + hi),
        horizon,
    })
}

/// Canonical power-of-two bracket for a monotone predicate: returns
/// `(2^e, 2^{e+1})` with the predicate differing across the pair. The result
/// does not depend on the starting probe, so warm-starting is purely an
/// evaluation saver.
fn canonical_bracket(
    pred: impl Fn(f64) -> bool,
    rises: bool,
    start: f64,
) -> Option<(f64, f64)> {
    let mut e = start.max(1e-6).log2().floor() as i32;
    e = e.clamp(-60, 60);
    let at = |e: i32| (e as f64).exp2();
    // establish pred(2^e) = !rises-side, pred(2^{e+1}) = rises-side
    let mut lo_ok = pred(at(e)) != rises;
    let mut guard = 0;
    while !lo_ok {
        e -= 1;
        guard += 1;
        if e < -60 || guard > 130 {
            return None;
        }
        lo_ok = pred(at(e)) != rises;
    }
    let mut hi_ok = pred(at(e + 1)) == rises;
    while !hi_ok {
        e += 1;
        guard += 1;
        if e > 60 || guard > 260 {
            return None;
        }
        if pred(at(e)) == rises {
            // predicate flipped below our lower probe; re-anchor
            e -= 1;
        }
        hi_ok = pred(at(e + 1)) == rises;
    }
    Some((at(e), at(e + 1)))
}

/// Trace `m = h(l)` over an `l` grid. Sequential tracing warm-starts each
/// bracket probe from the previous sample; `parallel` distributes samples
/// across threads without warm starts. Both paths land on the same canonical
/// power-of-two brackets, so the thresholds are identical.
pub fn trace_curve(
    alpha: f64,
    l_range: (f64, f64),
    n_points: usize,
    which: CurveKind,
    scan: &ScanConfig,
    parallel: bool,
) -> Result<BifurcationCurve> {
    check_tangency_inputs(l_range.0, alpha)?;
    scan.validate()?;
    if n_points < 2 {
        return Err(Error::domain("trace needs at least 2 points"));
    }
    if !(l_range.1 > l_range.0) {
        return Err(Error::domain("l range must be increasing"));
    }
    match which {
        CurveKind::H2 => {
            if alpha >= 0.5 {
                return Err(Error::domain(
                    "h2 is undefined for alpha >= 1/2: the classification is single-stable-region everywhere",
                ));
            }
        }
        CurveKind::H1 => {
            // the escape regime needs all three behaviors, observed for
            // alpha in [0.4, 0.5)
            if !(0.4..0.5).contains(&alpha) {
                return Err(Error::domain(
                    "h1 tracing requires alpha in [0.4, 0.5), where the single stable region coexists with the switch",
                ));
            }
        }
    }

    let ls: Vec<f64> = (0..n_points)
        .map(|i| l_range.0 + (l_range.1 - l_range.0) * i as f64 / (n_points - 1) as f64)
        .collect();

    let solve_at = |l: f64, start: f64| -> Option<f64> {
        match which {
            CurveKind::H2 => {
                let pred = |m: f64| min_g_minus_tau(l, m, alpha, scan) <= 0.0;
                let (lo, hi) = canonical_bracket(pred, true, start)?;
                tangency_threshold_h2(l, alpha, (lo, hi), scan).ok()
            }
            CurveKind::H1 => {
                let pred = |m: f64| second_intersection_below(l, m, alpha, scan.horizon);
                let (lo, hi) = canonical_bracket(pred, false, start)?;
                escape_threshold_h1(l, alpha, (lo, hi), scan.horizon)
                    .ok()
                    .map(|t| t.m)
            }
        }
    };

    let samples: Vec<CurveSample> = if parallel {
        ls.par_iter()
            .map(|&l| CurveSample {
                l,
                m: solve_at(l, 1.0),
            })
            .collect()
    } else {
        let mut out = Vec::with_capacity(ls.len());
        let mut warm = 1.0;
        for &l in &ls {
            let m = solve_at(l, warm);
            if let Some(v) = m {
                warm = v;
            }
            out.push(CurveSample { l, m });
        }
        out
    };

    Ok(BifurcationCurve {
        alpha,
        which,
        samples,
        horizon: scan.horizon,
    })
}
