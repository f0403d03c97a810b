//! Predictor–corrector time stepper for the delay equation.
//!
//! Working form: applying the order-`2a` fractional integral to the model
//! turns it into a Volterra equation whose two memory integrals (orders `a`
//! and `2a`) are discretized by trapezoidal product quadrature on the grid
//! `t_j = j h`, `h = tau / k`, `j = -k..=N`. Each step evaluates an explicit
//! predictor from the convolution sums, a delayed-feedback increment, and a
//! corrector; extra corrector sweeps re-substitute the running estimate into
//! the implicit step equation (plain fixed-point sweeps, which contract only
//! while `(l/tau) h^a / Gamma(a+2) < 1`).

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rhs::DelayedFeedback;
use crate::special::gamma_unchecked;
use crate::weights::QuadWeightTable;

/// Runaway cutoff: genuinely unstable runs are expected outputs, so the
/// integrator stops with a diagnostic rather than propagating to infinity.
pub const DIVERGENCE_CUTOFF: f64 = 1e8;

/// History segment on `(-tau, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum History {
    /// Constant value on the whole segment (the reference runs all use this).
    Constant(f64),
    /// Tabulated `(t, x)` samples covering `[-tau, 0]`, linearly interpolated
    /// onto the grid.
    Tabulated(Vec<(f64, f64)>),
}

/// Initial data: the history segment plus `x'(0)`, which enters the drift
/// term only when `alpha >= 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub history: History,
    pub x0_prime: Option<f64>,
}

impl InitialData {
    pub fn constant(value: f64) -> Self {
        InitialData {
            history: History::Constant(value),
            x0_prime: None,
        }
    }

    pub fn with_derivative(mut self, x0_prime: f64) -> Self {
        self.x0_prime = Some(x0_prime);
        self
    }

    pub fn tabulated(points: Vec<(f64, f64)>) -> Self {
        InitialData {
            history: History::Tabulated(points),
            x0_prime: None,
        }
    }
}

/// Discretization of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Substeps per delay; the step is `h = tau / k`.
    pub steps_per_delay: usize,
    /// Final time `T`; the grid has `N = round(T / h)` post-history steps.
    pub final_time: f64,
    /// Corrector sweeps; 1 evaluates the corrector formula exactly once.
    pub corrector_sweeps: usize,
    /// Regression toggle: use the literal `(a + 2)` denominator in the
    /// predictor increment instead of `Gamma(a + 2)`.
    pub literal_z_weight: bool,
}

impl SolverConfig {
    pub fn new(steps_per_delay: usize, final_time: f64) -> Self {
        SolverConfig {
            steps_per_delay,
            final_time,
            corrector_sweeps: 1,
            literal_z_weight: false,
        }
    }

    pub fn with_sweeps(mut self, sweeps: usize) -> Self {
        self.corrector_sweeps = sweeps;
        self
    }
}

/// A uniformly sampled solution, history segment included.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    times: Vec<f64>,
    values: Vec<f64>,
    pub params: SystemParams,
    pub config: SolverConfig,
    pub rhs_name: String,
    /// Number of leading samples with `t < 0` (k for a fresh run, 0 for tails).
    history_len: usize,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Grid step `h = tau / k`.
    pub fn step(&self) -> f64 {
        self.params.tau / self.config.steps_per_delay as f64
    }

    /// The delay expressed in grid steps (`k`).
    pub fn delay_steps(&self) -> usize {
        self.config.steps_per_delay
    }

    /// Samples at `t >= 0`.
    pub fn post_history(&self) -> (&[f64], &[f64]) {
        (
            &self.times[self.history_len..],
            &self.values[self.history_len..],
        )
    }

    /// Number of leading history samples (`t < 0`).
    pub fn history_samples(&self) -> usize {
        self.history_len
    }

    /// Wrap an externally produced uniform series as a history-free
    /// trajectory; the grid step is `params.tau / config.steps_per_delay` and
    /// times start at `start_time`.
    pub fn from_series(
        values: Vec<f64>,
        start_time: f64,
        params: SystemParams,
        config: SolverConfig,
        rhs_name: &str,
    ) -> Result<Self> {
        params.validate()?;
        if params.tau <= 0.0 || config.steps_per_delay == 0 {
            return Err(Error::domain("from_series needs tau > 0 and k >= 1"));
        }
        if values.is_empty() {
            return Err(Error::domain("from_series needs a non-empty series"));
        }
        let h = params.tau / config.steps_per_delay as f64;
        let times = (0..values.len())
            .map(|i| start_time + i as f64 * h)
            .collect();
        Ok(Trajectory {
            times,
            values,
            params,
            config,
            rhs_name: rhs_name.to_string(),
            history_len: 0,
        })
    }

    /// Two-column CSV with a `#` header recording params, config and kernel.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# sunflower-core v{} | rhs={} | l={} m={} alpha={} tau={} | k={} T={} sweeps={} literal_z={}",
            env!("CARGO_PKG_VERSION"),
            self.rhs_name,
            self.params.l,
            self.params.m,
            self.params.alpha,
            self.params.tau,
            self.config.steps_per_delay,
            self.config.final_time,
            self.config.corrector_sweeps,
            self.config.literal_z_weight,
        )?;
        writeln!(w, "t,x")?;
        for (t, x) in self.times.iter().zip(&self.values) {
            writeln!(w, "{t},{x}")?;
        }
        Ok(())
    }
}

/// Integrate the equation on `[-tau, T]`.
///
/// Unstable runs that pass the divergence cutoff return
/// [`Error::Diverged`] carrying the step index and the partial trajectory.
pub fn integrate(
    params: &SystemParams,
    init: &InitialData,
    config: &SolverConfig,
    rhs: &dyn DelayedFeedback,
) -> Result<Trajectory> {
    params.validate()?;
    if params.tau <= 0.0 {
        return Err(Error::domain("time stepping requires tau > 0"));
    }
    let k = config.steps_per_delay;
    if k == 0 {
        return Err(Error::domain("steps_per_delay must be at least 1"));
    }
    if !(config.final_time > 0.0) {
        return Err(Error::domain("final_time must be positive"));
    }
    if config.corrector_sweeps == 0 {
        return Err(Error::domain("corrector_sweeps must be at least 1"));
    }
    let h = params.tau / k as f64;
    let n_steps = (config.final_time / h).round() as usize;
    if n_steps == 0 {
        return Err(Error::domain(
            "final_time shorter than half a grid step; nothing to do",
        ));
    }
    let alpha = params.alpha;
    let use_drift2 = alpha >= 0.5;
    let x0_prime = match (use_drift2, init.x0_prime) {
        (true, Some(v)) => v,
        (true, None) => {
            return Err(Error::domain(
                "x0_prime is required when alpha >= 1/2 (second drift term)",
            ))
        }
        (false, _) => 0.0,
    };

    // history on the grid, j = -k..=0 stored at indices 0..=k
    let mut x = Vec::with_capacity(k + n_steps + 1);
    match &init.history {
        History::Constant(v) => x.extend(std::iter::repeat_n(*v, k + 1)),
        History::Tabulated(points) => {
            if points.len() < 2 {
                return Err(Error::domain("tabulated history needs at least 2 points"));
            }
            for w in points.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::domain("tabulated history times must increase"));
                }
            }
            let (t_first, t_last) = (points[0].0, points[points.len() - 1].0);
            if t_first > -params.tau + 1e-12 * params.tau || t_last < 0.0 {
                return Err(Error::domain(format!(
                    "tabulated history must cover [-tau, 0] = [{}, 0], got [{t_first}, {t_last}]",
                    -params.tau
                )));
            }
            for j in 0..=k {
                let t = (j as f64 - k as f64) * h;
                x.push(interp_linear(points, t));
            }
        }
    }
    let x0 = x[k];

    let drift_coeff = params.l / (params.tau * gamma_unchecked(alpha + 1.0));
    let cl = (params.l / params.tau) * h.powf(alpha) / gamma_unchecked(alpha + 2.0);
    let cm = (params.m / params.tau) * h.powf(2.0 * alpha) / gamma_unchecked(2.0 * alpha + 2.0);
    let clz = if config.literal_z_weight {
        (params.l / params.tau) * h.powf(alpha) / (alpha + 2.0)
    } else {
        cl
    };

    let table_a = QuadWeightTable::new(alpha, n_steps);
    let table_b = QuadWeightTable::new(2.0 * alpha, n_steps);
    let diffs_a = table_a.diffs();
    let diffs_b = table_b.diffs();

    // delayed feedback values g(x_{j-k}) indexed by storage slot j+k,
    // i.e. y[i] = g(x[i]); slots beyond the current step fill as we go
    let mut y = Vec::with_capacity(k + n_steps + 1);
    for &v in x.iter().take((k + 1).min(n_steps + 1)) {
        y.push(rhs.eval(v));
    }

    let mut diverged: Option<usize> = None;
    for n in 0..n_steps {
        let t_next = (n + 1) as f64 * h;
        let mut drift = x0 * (1.0 + drift_coeff * t_next.powf(alpha));
        if use_drift2 {
            drift += t_next * x0_prime;
        }
        // S_a = a_{0,n+1} x_0 + sum_{j=1..n} phi_a(n-j) x_j   (x_j at slot j+k)
        let mut sum_a = table_a.head(n) * x[k];
        let mut sum_b = table_b.head(n) * y[0];
        if n >= 1 {
            let xs = &x[k + 1..k + n + 1];
            let ys = &y[1..n + 1];
            for (j, (&xv, &yv)) in xs.iter().zip(ys).enumerate() {
                let d = n - 1 - j; // n - (j+1)
                sum_a += diffs_a[d] * xv;
                sum_b += diffs_b[d] * yv;
            }
        }
        let predicted = drift - cl * sum_a - cm * sum_b;
        let delayed = y[n + 1]; // g(x_{n+1-k}): always a past value (k >= 1)
        let increment = -clz * predicted - cm * delayed;
        let mut corrected = predicted - cl * (predicted + increment) - cm * delayed;
        for _ in 1..config.corrector_sweeps {
            corrected = predicted - cl * corrected - cm * delayed;
        }

        if !corrected.is_finite() || corrected.abs() > DIVERGENCE_CUTOFF {
            diverged = Some(n + 1);
            break;
        }
        x.push(corrected);
        if k + n < n_steps {
            y.push(rhs.eval(corrected));
        }
    }

    let times: Vec<f64> = (0..x.len()).map(|i| (i as f64 - k as f64) * h).collect();
    let traj = Trajectory {
        times,
        values: x,
        params: *params,
        config: *config,
        rhs_name: rhs.name().to_string(),
        history_len: k,
    };
    match diverged {
        Some(step) => Err(Error::Diverged {
            step,
            time: step as f64 * h,
            partial: Box::new(traj),
        }),
        None => Ok(traj),
    }
}

fn interp_linear(points: &[(f64, f64)], t: f64) -> f64 {
    if t <= points[0].0 {
        return points[0].1;
    }
    if t >= points[points.len() - 1].0 {
        return points[points.len() - 1].1;
    }
    let idx = points.partition_point(|&(pt, _)| pt <= t);
    let (t0, v0) = points[idx - 1];
    let (t1, v1) = points[idx];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

/// `(x(t - tau), x(t))` pairs on the grid, exact index arithmetic.
pub fn delayed_pairs(traj: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let k = traj.delay_steps();
    let v = traj.values();
    if v.len() <= k {
        return Err(Error::domain(format!(
            "trajectory has {} samples, shorter than one delay ({} steps)",
            v.len(),
            k
        )));
    }
    Ok((0..v.len() - k).map(|i| (v[i], v[i + k])).collect())
}

/// Write delayed pairs as `x_delayed,x` CSV.
pub fn write_pairs_csv<W: Write>(
    mut w: W,
    traj: &Trajectory,
    pairs: &[(f64, f64)],
) -> io::Result<()> {
    writeln!(
        w,
        "# sunflower-core v{} | rhs={} | l={} m={} alpha={} tau={} | k={} T={}",
        env!("CARGO_PKG_VERSION"),
        traj.rhs_name,
        traj.params.l,
        traj.params.m,
        traj.params.alpha,
        traj.params.tau,
        traj.config.steps_per_delay,
        traj.config.final_time,
    )?;
    writeln!(w, "x_delayed,x")?;
    for (a, b) in pairs {
        writeln!(w, "{a},{b}")?;
    }
    Ok(())
}

/// The last `ceil(fraction * P)` post-history samples, times preserved
/// (`P` counts samples with `t >= 0`).
pub fn tail(traj: &Trajectory, fraction: f64) -> Result<Trajectory> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::domain(format!(
            "tail fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let post = traj.len() - traj.history_len;
    if post == 0 {
        return Err(Error::domain("trajectory has no post-history samples"));
    }
    let count = ((fraction * post as f64).ceil() as usize).clamp(1, post);
    let start = traj.len() - count;
    Ok(Trajectory {
        times: traj.times[start..].to_vec(),
        values: traj.values[start..].to_vec(),
        params: traj.params,
        config: traj.config,
        rhs_name: traj.rhs_name.clone(),
        history_len: 0,
    })
}
