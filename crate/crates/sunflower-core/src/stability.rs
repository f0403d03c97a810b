//! Characteristic-equation analysis for the linearized equation.
//!
//! Near the even equilibria the characteristic function is
//! `H(lambda) = (tau/l) lambda^{2a} + lambda^a + (m/l) exp(-lambda tau)`
//! (sign `-` on the exponential term for the odd equilibria). A purely
//! imaginary root `lambda = iv`, `v > 0` exists iff `w = v^a` solves
//!
//! `F(w) = tau^2 w^4 + 2 l tau cos(a pi/2) w^3 + l^2 w^2 - m^2 = 0`,
//!
//! which has exactly one positive root (`F(0) < 0`, `F` strictly increasing).
//! The matching critical delay is `tau* = g(tau) = theta / v` with
//! `theta = atan2(S, C)` mapped into `[0, 2pi)`; physically realized
//! crossings are fixed points `g(tau) = tau` because the characteristic
//! coefficients themselves contain the delay.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::special::complex_power;

pub const DEFAULT_SCAN_HORIZON: f64 = 200.0;
pub const DEFAULT_GRID_POINTS: usize = 20_000;

/// Scan window for locating fixed points of `g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub horizon: f64,
    pub grid_points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            horizon: DEFAULT_SCAN_HORIZON,
            grid_points: DEFAULT_GRID_POINTS,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > 0.0) {
            return Err(Error::domain("scan horizon must be positive"));
        }
        if self.grid_points < 1000 {
            return Err(Error::domain("scan needs at least 1000 grid points"));
        }
        Ok(())
    }
}

/// A purely imaginary characteristic crossing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingPoint {
    /// Crossing frequency `v` (rad / time).
    pub frequency: f64,
    /// Lowest matching critical delay `tau* = g(tau)`.
    pub critical_delay: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    StableForAll,
    SingleStableRegion,
    StabilitySwitch,
    AlwaysUnstable,
}

/// Classification of an equilibrium over a scan horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    pub classification: Classification,
    /// Strictly increasing critical delays (0, 1 or 2 entries; more only in
    /// the never-observed >= 3 intersection case, reported verbatim).
    pub critical_delays: Vec<f64>,
    /// The horizon the scan used; `StableForAll` is horizon-relative.
    pub scan_horizon: f64,
    /// Set when more than two intersections were found.
    pub multiplicity_warning: bool,
}

/// `AlwaysUnstable` verdict for the odd equilibria plus its constructive
/// witness: a real positive characteristic root.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct X2Verdict {
    pub verdict: StabilityVerdict,
    pub witness_root: f64,
    pub residual: f64,
}

/// A refined complex characteristic root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRoot {
    pub re: f64,
    pub im: f64,
    pub residual: f64,
}

impl ComplexRoot {
    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Which equilibrium family's characteristic equation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    /// `x* = 2 n pi`: `+ (m/l) exp(-lambda tau)`.
    X1,
    /// `x* = (2n+1) pi`: `- (m/l) exp(-lambda tau)`.
    X2,
}

fn check_coefficients(l: f64, m: f64, alpha: f64, tau_coeff: f64) -> Result<()> {
    if !(l > 0.0 && m > 0.0) {
        return Err(Error::domain(format!("l and m must be positive, got l={l} m={m}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    if !(tau_coeff >= 0.0) {
        return Err(Error::domain(format!("tau must be non-negative, got {tau_coeff}")));
    }
    Ok(())
}

/// The unique positive root `w = v^alpha` of the crossing polynomial, by
/// bracketing bisection. `|F(w)| < 1e-12 m^2` at return.
fn crossing_w(l: f64, m: f64, alpha: f64, tau_coeff: f64) -> f64 {
    let c = (alpha * PI / 2.0).cos();
    let t2 = tau_coeff * tau_coeff;
    let b3 = 2.0 * l * tau_coeff * c;
    let l2 = l * l;
    let m2 = m * m;
    let f = |w: f64| ((t2 * w + b3) * w + l2) * w * w - m2;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    // F is strictly increasing on w > 0, so plain bisection to full precision
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = 0.5 * (lo + hi);
    debug_assert!(f(w).abs() < 1e-12 * m2);
    w
}

/// Crossing frequency `v > 0` for delay coefficient `tau_coeff`.
pub fn crossing_frequency(l: f64, m: f64, alpha: f64, tau_coeff: f64) -> Result<f64> {
    check_coefficients(l, m, alpha, tau_coeff)?;
    Ok(crossing_w(l, m, alpha, tau_coeff).powf(1.0 / alpha))
}

/// Crossing frequency and critical delay together.
pub fn crossing_point(l: f64, m: f64, alpha: f64, tau_coeff: f64) -> Result<CrossingPoint> {
    check_coefficients(l, m, alpha, tau_coeff)?;
    Ok(crossing_point_unchecked(l, m, alpha, tau_coeff))
}

fn crossing_point_unchecked(l: f64, m: f64, alpha: f64, tau_coeff: f64) -> CrossingPoint {
    let w = crossing_w(l, m, alpha, tau_coeff);
    let v = w.powf(1.0 / alpha);
    // boundary equations give the phase of the crossing:
    //   cos(v tau*) = C, sin(v tau*) = S
    let c = -(tau_coeff * w * w * (alpha * PI).cos() + l * w * (alpha * PI / 2.0).cos()) / m;
    let s = (tau_coeff * w * w * (alpha * PI).sin() + l * w * (alpha * PI / 2.0).sin()) / m;
    debug_assert!((c * c + s * s - 1.0).abs() < 1e-9);
    let mut theta = s.atan2(c);
    if theta < 0.0 {
        theta += 2.0 * PI;
    }
    CrossingPoint {
        frequency: v,
        critical_delay: theta / v,
    }
}

/// The critical-delay map `tau* = g(tau)`.
pub fn critical_delay_g(l: f64, m: f64, alpha: f64, tau_coeff: f64) -> Result<f64> {
    Ok(crossing_point(l, m, alpha, tau_coeff)?.critical_delay)
}

fn g_minus_tau(l: f64, m: f64, alpha: f64, tau: f64) -> f64 {
    crossing_point_unchecked(l, m, alpha, tau).critical_delay - tau
}

/// Sampled `g(tau)` curve for plotting.
pub fn g_curve(l: f64, m: f64, alpha: f64, horizon: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    check_coefficients(l, m, alpha, 0.0)?;
    if points < 2 || !(horizon > 0.0) {
        return Err(Error::domain("g_curve needs a positive horizon and >= 2 points"));
    }
    Ok((1..=points)
        .map(|i| {
            let tau = horizon * i as f64 / points as f64;
            (tau, crossing_point_unchecked(l, m, alpha, tau).critical_delay)
        })
        .collect())
}

/// Scan grid: a geometric prefix followed by the uniform grid. The first
/// fixed point can sit at `g(0+) = (pi - a pi/2) / (m/l)^{1/a}`, microscopic
/// for large `m/l` at small order, so the prefix floor tracks that closed
/// form.
fn scan_grid(l: f64, m: f64, alpha: f64, horizon: f64, grid_points: usize) -> Vec<f64> {
    let first = horizon / grid_points as f64;
    let g0 = (PI - alpha * PI / 2.0) / (m / l).powf(1.0 / alpha);
    let mut lo = first * 1e-5;
    if g0.is_finite() && g0 > 0.0 {
        lo = lo.min(0.3 * g0);
    }
    lo = lo.max(1e-300);
    let prefix = 64usize;
    let mut taus = Vec::with_capacity(grid_points + prefix);
    for i in 0..prefix {
        taus.push(lo * (first / lo).powf(i as f64 / prefix as f64));
    }
    for i in 1..=grid_points {
        taus.push(horizon * i as f64 / grid_points as f64);
    }
    taus
}

fn bisect_root(
    phi: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    tol: f64,
) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a < tol || mid == a || mid == b {
            break;
        }
        let fm = phi(mid);
        if fa * fm <= 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

fn golden_extremum(phi: impl Fn(f64) -> f64, mut a: f64, mut b: f64, minimize: bool) -> (f64, f64) {
    let gr = (5.0_f64.sqrt() - 1.0) / 2.0;
    let sgn = if minimize { 1.0 } else { -1.0 };
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = sgn * phi(c);
    let mut fd = sgn * phi(d);
    for _ in 0..200 {
        if b - a < 1e-12 * b.max(1.0) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = sgn * phi(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = sgn * phi(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, phi(x))
}

/// Tolerance below which a grazing extremum of `g(tau) - tau` is reported as
/// a degenerate (near-tangential) contact.
const TANGENCY_TOL: f64 = 1e-7;

/// Classify the even equilibria by locating all fixed points of `g` on
/// `(0, horizon]`: 0 roots is stable for every delay, 1 a single stable
/// region, 2 a stability switch.
pub fn classify_x1(l: f64, m: f64, alpha: f64, scan: &ScanConfig) -> Result<StabilityVerdict> {
    check_coefficients(l, m, alpha, 0.0)?;
    scan.validate()?;
    let phi = |tau: f64| g_minus_tau(l, m, alpha, tau);
    let taus = scan_grid(l, m, alpha, scan.horizon, scan.grid_points);
    let phis: Vec<f64> = taus.iter().map(|&t| phi(t)).collect();

    let mut roots = Vec::new();
    for i in 0..taus.len() - 1 {
        if phis[i] == 0.0 {
            roots.push(taus[i]);
        } else if phis[i] * phis[i + 1] < 0.0 {
            roots.push(bisect_root(phi, taus[i], taus[i + 1], phis[i], 1e-9));
        }
    }
    if phis[taus.len() - 1] == 0.0 {
        roots.push(taus[taus.len() - 1]);
    }

    // grazing contact check: an interior extremum of phi that closes to
    // within TANGENCY_TOL of zero without changing sign on the grid. If the
    // refined extremum does cross zero the grid missed a root pair; recover
    // both roots instead of misclassifying.
    for i in 1..taus.len() - 1 {
        let is_min = phis[i] < phis[i - 1] && phis[i] < phis[i + 1] && phis[i] > 0.0;
        let is_max = phis[i] > phis[i - 1] && phis[i] > phis[i + 1] && phis[i] < 0.0;
        if !(is_min || is_max) {
            continue;
        }
        if phis[i].abs() > 1e3 * TANGENCY_TOL {
            continue; // nowhere near grazing
        }
        let (t_ext, val) = golden_extremum(phi, taus[i - 1], taus[i + 1], is_min);
        let crossed = (is_min && val < 0.0) || (is_max && val > 0.0);
        if crossed {
            roots.push(bisect_root(phi, taus[i - 1], t_ext, phis[i - 1], 1e-9));
            roots.push(bisect_root(phi, t_ext, taus[i + 1], val, 1e-9));
        } else if val.abs() < TANGENCY_TOL {
            return Err(Error::DegenerateTangency { tau: t_ext });
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-8 * b.max(1.0));

    let classification = match roots.len() {
        0 => Classification::StableForAll,
        1 => Classification::SingleStableRegion,
        _ => Classification::StabilitySwitch,
    };
    Ok(StabilityVerdict {
        classification,
        multiplicity_warning: roots.len() > 2,
        critical_delays: roots,
        scan_horizon: scan.horizon,
    })
}

/// The odd equilibria are unstable for every delay; return the verdict with
/// a constructive witness: the real positive root of
/// `(tau/l) r^{2a} + r^a - (m/l) exp(-r tau) = 0`.
pub fn classify_x2(params: &SystemParams) -> Result<X2Verdict> {
    params.validate()?;
    let SystemParams { l, m, alpha, tau } = *params;
    let f = |r: f64| (tau / l) * r.powf(2.0 * alpha) + r.powf(alpha) - (m / l) * (-r * tau).exp();
    // the left side starts below the right (f(0) = -m/l) and is unbounded
    let mut hi = 1.0;
    let mut guard = 0;
    while f(hi) < 0.0 {
        hi *= 2.0;
        guard += 1;
        assert!(guard < 2000, "witness bracket failed to close");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let residual = f(root).abs();
    Ok(X2Verdict {
        verdict: StabilityVerdict {
            classification: Classification::AlwaysUnstable,
            critical_delays: Vec::new(),
            scan_horizon: 0.0,
            multiplicity_warning: false,
        },
        witness_root: root,
        residual,
    })
}

fn char_fn(params: &SystemParams, kind: EquilibriumKind, z: Complex64) -> Result<Complex64> {
    let SystemParams { l, m, alpha, tau } = *params;
    let sign = match kind {
        EquilibriumKind::X1 => 1.0,
        EquilibriumKind::X2 => -1.0,
    };
    Ok((tau / l) * complex_power(z, 2.0 * alpha)?
        + complex_power(z, alpha)?
        + sign * (m / l) * (-z * tau).exp())
}

fn char_derivative(params: &SystemParams, kind: EquilibriumKind, z: Complex64) -> Result<Complex64> {
    let SystemParams { l, m, alpha, tau } = *params;
    let sign = match kind {
        EquilibriumKind::X1 => 1.0,
        EquilibriumKind::X2 => -1.0,
    };
    Ok((tau / l) * 2.0 * alpha * complex_power(z, 2.0 * alpha - 1.0)?
        + alpha * complex_power(z, alpha - 1.0)?
        - sign * tau * (m / l) * (-z * tau).exp())
}

/// Damped Newton refinement of a complex characteristic root from `seed`.
pub fn refine_complex_root(
    params: &SystemParams,
    seed: Complex64,
    kind: EquilibriumKind,
) -> Result<ComplexRoot> {
    params.validate()?;
    if seed == Complex64::new(0.0, 0.0) {
        return Err(Error::domain("refine_complex_root: seed must be non-zero"));
    }
    let mut z = seed;
    let mut restarted = false;
    let mut hz = char_fn(params, kind, z)?;
    for it in 0..200 {
        if hz.norm() < 1e-12 {
            return Ok(ComplexRoot {
                re: z.re,
                im: z.im,
                residual: hz.norm(),
            });
        }
        let dz = char_derivative(params, kind, z)?;
        if dz.norm() == 0.0 {
            return Err(Error::NoConvergence {
                iterations: it,
                last_re: z.re,
                last_im: z.im,
                residual: hz.norm(),
            });
        }
        let mut step = hz / dz;
        // damping: halve the step while the residual does not decrease
        let mut accepted = None;
        for _ in 0..20 {
            let cand = z - step;
            let hc = char_fn(params, kind, cand)?;
            if hc.norm() < hz.norm() {
                accepted = Some((cand, hc));
                break;
            }
            step *= 0.5;
        }
        let (mut next, mut hn) = match accepted {
            Some(v) => v,
            None => (z - step, char_fn(params, kind, z - step)?),
        };
        // branch-cut guard: an iterate dipping below the negative real axis
        // restarts once from the conjugated seed
        if next.re < 0.0 && next.im < 0.0 && !restarted {
            restarted = true;
            next = seed.conj();
            hn = char_fn(params, kind, next)?;
        }
        z = next;
        hz = hn;
    }
    if hz.norm() < 1e-12 {
        return Ok(ComplexRoot {
            re: z.re,
            im: z.im,
            residual: hz.norm(),
        });
    }
    Err(Error::NoConvergence {
        iterations: 200,
        last_re: z.re,
        last_im: z.im,
        residual: hz.norm(),
    })
}

/// Residuals of the two boundary equations at `(v, tau*)`; both vanish at a
/// genuine crossing.
pub fn boundary_residuals(
    l: f64,
    m: f64,
    alpha: f64,
    tau_coeff: f64,
    point: &CrossingPoint,
) -> (f64, f64) {
    let v = point.frequency;
    let w = v.powf(alpha);
    let re = tau_coeff / l * w * w * (alpha * PI).cos() + w * (alpha * PI / 2.0).cos()
        + m / l * (v * point.critical_delay).cos();
    let im = tau_coeff / l * w * w * (alpha * PI).sin() + w * (alpha * PI / 2.0).sin()
        - m / l * (v * point.critical_delay).sin();
    (re, im)
}
