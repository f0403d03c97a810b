//! Chaos diagnostics on simulated trajectories: delay-coordinate embedding,
//! maximum Lyapunov exponent by trajectory-separation tracking, and
//! asymptotic cycle counting for the period-doubling cascade.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{tail, Trajectory};

/// Delay-coordinate reconstruction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    pub dimension: usize,
    /// Lag between coordinates, in samples.
    pub lag: usize,
    /// Temporal exclusion window for neighbor searches, in samples.
    pub theiler_window: usize,
}

impl EmbeddingConfig {
    /// Defaults tied to the delay grid: dimension 3, quarter-delay lag,
    /// one-delay Theiler window.
    pub fn for_delay_steps(k: usize) -> Self {
        EmbeddingConfig {
            dimension: 3,
            lag: (k / 4).max(1),
            theiler_window: k,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::domain("embedding dimension must be at least 2"));
        }
        if self.lag < 1 {
            return Err(Error::domain("embedding lag must be at least 1"));
        }
        Ok(())
    }
}

/// An embedded point set in `R^dimension`, stored flat.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub dimension: usize,
    data: Vec<f64>,
}

impl Embedding {
    pub fn len(&self) -> usize {
        self.data.len() / self.dimension
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        self.point(i)
            .iter()
            .zip(self.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Diagonal of the bounding box.
    pub fn extent(&self) -> f64 {
        let d = self.dimension;
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for i in 0..self.len() {
            for (c, &v) in self.point(i).iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        lo.iter()
            .zip(&hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }
}

/// Delay-coordinate embedding `y_i = (x_i, x_{i+lag}, ..., x_{i+(d-1)lag})`.
pub fn embed(series: &[f64], cfg: &EmbeddingConfig) -> Result<Embedding> {
    cfg.validate()?;
    let span = cfg.dimension * cfg.lag;
    if series.len() <= span + 10 {
        return Err(Error::domain(format!(
            "series of {} samples is too short for dimension {} with lag {}",
            series.len(),
            cfg.dimension,
            cfg.lag
        )));
    }
    let count = series.len() - (cfg.dimension - 1) * cfg.lag;
    let mut data = Vec::with_capacity(count * cfg.dimension);
    for i in 0..count {
        for c in 0..cfg.dimension {
            data.push(series[i + c * cfg.lag]);
        }
    }
    Ok(Embedding {
        dimension: cfg.dimension,
        data,
    })
}

/// Uniform-grid spatial hash over the embedding's bounding box; exhaustive
/// search is used below this point count.
const HASH_MIN_POINTS: usize = 5000;
const HASH_CELLS_PER_AXIS: f64 = 64.0;

struct NeighborIndex<'a> {
    emb: &'a Embedding,
    cell: f64,
    origin: Vec<f64>,
    dims: Vec<usize>,
    buckets: Vec<Vec<u32>>,
    exhaustive: bool,
}

impl<'a> NeighborIndex<'a> {
    fn new(emb: &'a Embedding) -> Self {
        let d = emb.dimension;
        let n = emb.len();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for i in 0..n {
            for (c, &v) in emb.point(i).iter().enumerate() {
                lo[c] = lo[c].min(v);
                hi[c] = hi[c].max(v);
            }
        }
        let max_side = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| b - a)
            .fold(0.0_f64, f64::max);
        let exhaustive = n < HASH_MIN_POINTS || max_side == 0.0;
        let cell = if exhaustive {
            1.0
        } else {
            max_side / HASH_CELLS_PER_AXIS
        };
        let mut dims = vec![1usize; d];
        let mut buckets = Vec::new();
        if !exhaustive {
            for c in 0..d {
                dims[c] = ((hi[c] - lo[c]) / cell).floor() as usize + 1;
            }
            let total: usize = dims.iter().product();
            buckets = vec![Vec::new(); total];
            for i in 0..n {
                let idx = Self::bucket_of(emb.point(i), &lo, cell, &dims);
                buckets[idx].push(i as u32);
            }
        }
        NeighborIndex {
            emb,
            cell,
            origin: lo,
            dims,
            buckets,
            exhaustive,
        }
    }

    fn bucket_of(p: &[f64], origin: &[f64], cell: f64, dims: &[usize]) -> usize {
        let mut idx = 0usize;
        for (c, &v) in p.iter().enumerate() {
            let mut q = ((v - origin[c]) / cell).floor() as isize;
            q = q.clamp(0, dims[c] as isize - 1);
            idx = idx * dims[c] + q as usize;
        }
        idx
    }

    /// Best candidate under `accept`, minimizing `score` (ties broken by
    /// index for determinism). Scans hash rings outward until no closer
    /// candidate can exist.
    fn search(
        &self,
        query: usize,
        accept: impl Fn(usize, f64) -> bool,
        score: impl Fn(usize, f64) -> f64,
    ) -> Option<(usize, f64)> {
        let n = self.emb.len();
        let mut best: Option<(f64, usize, f64)> = None; // (score, idx, dist)
        let consider = |j: usize, best: &mut Option<(f64, usize, f64)>| {
            if j == query {
                return;
            }
            let d = self.emb.dist(query, j);
            if !accept(j, d) {
                return;
            }
            let s = score(j, d);
            if best.is_none()
                || (s, j) < (best.unwrap().0, best.unwrap().1)
            {
                *best = Some((s, j, d));
            }
        };
        if self.exhaustive {
            for j in 0..n {
                consider(j, &mut best);
            }
            return best.map(|(_, j, d)| (j, d));
        }
        let d = self.emb.dimension;
        let p = self.emb.point(query);
        let mut center = vec![0isize; d];
        for c in 0..d {
            center[c] = (((p[c] - self.origin[c]) / self.cell).floor() as isize)
                .clamp(0, self.dims[c] as isize - 1);
        }
        let max_ring = *self.dims.iter().max().unwrap() as isize;
        for ring in 0..=max_ring {
            // cells whose Chebyshev distance from the center equals `ring`
            self.for_ring(&center, ring, |bucket| {
                for &j in &self.buckets[bucket] {
                    consider(j as usize, &mut best);
                }
            });
            if let Some((_, _, dist)) = best {
                // all unexplored cells are at least (ring) * cell away
                if dist <= ring as f64 * self.cell {
                    break;
                }
            }
        }
        best.map(|(_, j, d)| (j, d))
    }

    fn for_ring(&self, center: &[isize], ring: isize, mut f: impl FnMut(usize)) {
        let d = self.dims.len();
        let mut offsets = vec![-ring; d];
        'outer: loop {
            if offsets.iter().map(|o| o.abs()).max().unwrap() == ring {
                let mut ok = true;
                let mut idx = 0usize;
                for c in 0..d {
                    let q = center[c] + offsets[c];
                    if q < 0 || q >= self.dims[c] as isize {
                        ok = false;
                        break;
                    }
                    idx = idx * self.dims[c] + q as usize;
                }
                if ok {
                    f(idx);
                }
            }
            for c in (0..d).rev() {
                offsets[c] += 1;
                if offsets[c] <= ring {
                    continue 'outer;
                }
                offsets[c] = -ring;
            }
            break;
        }
    }
}

/// Settings for the separation-tracking exponent estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleConfig {
    pub embedding: EmbeddingConfig,
    /// Samples each pair is co-evolved per chunk.
    pub evolve_steps: usize,
    /// Replacement trigger as a fraction of the attractor extent.
    pub replace_threshold: f64,
    /// Fraction of the run discarded from the front as transient.
    pub transient_fraction: f64,
    /// Renewal: a pair older than this many chunks is re-anchored to a fresh
    /// close neighbor even if its separation stayed small, so decaying and
    /// periodic runs still accumulate enough pairs to report.
    pub max_pair_age: usize,
}

impl MleConfig {
    pub fn for_delay_steps(k: usize) -> Self {
        MleConfig {
            embedding: EmbeddingConfig::for_delay_steps(k),
            evolve_steps: 5,
            replace_threshold: 0.1,
            transient_fraction: 0.5,
            max_pair_age: 16,
        }
    }
}

/// Maximum-Lyapunov-exponent estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MleResult {
    /// Average log separation growth rate, 1/time units.
    pub exponent: f64,
    /// Neighbor replacements performed.
    pub pair_count: usize,
    /// Length of the discarded transient, time units.
    pub transient_discarded: f64,
}

/// Wolf-style exponent: track a fiducial point and its nearest neighbor,
/// co-evolve them `evolve_steps` at a time, accumulate `ln(d_end/d_start)`
/// per chunk, and replace the neighbor (keeping orientation) whenever the
/// separation exceeds `replace_threshold * extent`, the pair ages out, or
/// the neighbor's future is exhausted.
pub fn mle(traj: &Trajectory, cfg: &MleConfig) -> Result<MleResult> {
    if !(cfg.transient_fraction >= 0.0 && cfg.transient_fraction < 1.0) {
        return Err(Error::domain("transient_fraction must lie in [0, 1)"));
    }
    if cfg.evolve_steps == 0 {
        return Err(Error::domain("evolve_steps must be at least 1"));
    }
    if !(cfg.replace_threshold > 0.0 && cfg.replace_threshold < 1.0) {
        return Err(Error::domain("replace_threshold must lie in (0, 1)"));
    }
    let kept = tail(traj, 1.0 - cfg.transient_fraction)?;
    let h = traj.step();
    let post = traj.len() - traj.history_samples();
    let transient_discarded = (post - kept.len()) as f64 * h;
    for &v in kept.values() {
        if !v.is_finite() {
            return Err(Error::domain("trajectory contains non-finite samples"));
        }
    }
    let emb = embed(kept.values(), &cfg.embedding)?;
    let n = emb.len();
    let theiler = cfg.embedding.theiler_window;
    let extent = emb.extent();
    if extent == 0.0 {
        return Err(Error::InsufficientData(
            "constant series has no attractor extent".into(),
        ));
    }
    let threshold = cfg.replace_threshold * extent;
    let floor = 1e-12 * extent;
    let index = NeighborIndex::new(&emb);
    let evolve = cfg.evolve_steps;

    let outside_theiler =
        |i: usize, j: usize| i.abs_diff(j) > theiler;

    let nearest = |i: usize, limit: usize| {
        index.search(
            i,
            |j, d| j < limit && outside_theiler(i, j) && d > floor,
            |_, d| d,
        )
    };
    // orientation-preserving replacement: among candidates within the
    // threshold, minimize angular deviation from the current separation
    // vector; fall back to the plain nearest neighbor
    let replacement = |i: usize, vec_from: &[f64], limit: usize| {
        let vn: Vec<f64> = {
            let norm = vec_from.iter().map(|v| v * v).sum::<f64>().sqrt();
            vec_from.iter().map(|v| v / norm).collect()
        };
        index
            .search(
                i,
                |j, d| j < limit && outside_theiler(i, j) && d > floor && d < threshold,
                |j, d| {
                    let p = emb.point(i);
                    let q = emb.point(j);
                    let mut dot = 0.0;
                    for c in 0..emb.dimension {
                        dot += (q[c] - p[c]) * vn[c];
                    }
                    (dot / d).abs().clamp(-1.0, 1.0).acos()
                },
            )
            .or_else(|| nearest(i, limit))
    };

    let limit = n.saturating_sub(evolve);
    if limit == 0 {
        return Err(Error::InsufficientData("series shorter than one evolve chunk".into()));
    }
    let mut i = 0usize;
    let (mut j, mut d0) = nearest(0, limit)
        .ok_or_else(|| Error::InsufficientData("no admissible starting neighbor".into()))?;
    let mut log_sum = 0.0;
    let mut evolved_steps = 0usize;
    let mut replacements = 0usize;
    let mut age = 0usize;
    while i + evolve < n && j + evolve < n {
        let (i2, j2) = (i + evolve, j + evolve);
        let d1 = emb.dist(i2, j2);
        if d1 > floor && d0 > floor {
            log_sum += (d1 / d0).ln();
            evolved_steps += evolve;
        }
        i = i2;
        j = j2;
        age += 1;
        if i + evolve >= n {
            break;
        }
        if d1 > threshold || age >= cfg.max_pair_age || j + evolve >= n {
            let sep: Vec<f64> = emb
                .point(j)
                .iter()
                .zip(emb.point(i))
                .map(|(a, b)| a - b)
                .collect();
            let limit = n - evolve;
            match replacement(i, &sep, limit) {
                Some((nj, nd)) => {
                    j = nj;
                    d0 = nd;
                    replacements += 1;
                    age = 0;
                }
                None => break,
            }
        } else {
            d0 = d1;
        }
    }
    if replacements < 10 {
        return Err(Error::InsufficientData(format!(
            "only {replacements} neighbor replacements (need 10)"
        )));
    }
    Ok(MleResult {
        exponent: log_sum / (evolved_steps as f64 * h),
        pair_count: replacements,
        transient_discarded,
    })
}

/// Multiplicity of the asymptotic oscillation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Multiplicity {
    Cycle(usize),
    Aperiodic,
}

impl Serialize for Multiplicity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Cycle(n) => s.serialize_u64(*n as u64),
            Multiplicity::Aperiodic => s.serialize_str("aperiodic"),
        }
    }
}

/// Peak-clustering cycle count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleCount {
    pub multiplicity: Multiplicity,
    /// Cluster representatives (mean peak value per cluster, ascending).
    pub distinct_maxima: Vec<f64>,
    /// Absolute clustering tolerance used.
    pub cluster_tol: f64,
}

/// Local maxima by three-point comparison with parabolic refinement.
/// Ripple smaller than `prominence_tol` above the higher adjacent trough is
/// not counted as a peak; the branch splits of the cascade sit far above
/// solver ripple, shoulders sit far below.
fn principal_maxima(x: &[f64], prominence_tol: f64) -> Vec<f64> {
    let n = x.len();
    let mut peaks = Vec::new();
    let mut prev_min: Option<f64> = None;
    let mut pending: Vec<f64> = Vec::new(); // refined peaks awaiting their right trough
    for i in 1..n - 1 {
        if x[i] < x[i - 1] && x[i] < x[i + 1] {
            for &v in &pending {
                let reference = match prev_min {
                    Some(pm) => pm.max(x[i]),
                    None => x[i],
                };
                if v - reference >= prominence_tol {
                    peaks.push(v);
                }
            }
            pending.clear();
            prev_min = Some(x[i]);
        } else if x[i] > x[i - 1] && x[i] > x[i + 1] {
            let a = (x[i - 1] - 2.0 * x[i] + x[i + 1]) / 2.0;
            let b = (x[i + 1] - x[i - 1]) / 2.0;
            let refined = if a < 0.0 { x[i] - b * b / (4.0 * a) } else { x[i] };
            pending.push(refined);
        }
    }
    peaks
}

/// Count the asymptotic cycle multiplicity of a (transient-free) trajectory
/// tail: cluster peak values with an absolute tolerance, then accept the
/// cluster count as the multiplicity only if the label sequence repeats with
/// that period over the last 16 maxima.
pub fn count_cycles(traj_tail: &Trajectory, cluster_tol: Option<f64>) -> Result<CycleCount> {
    let x = traj_tail.values();
    if x.len() < 3 {
        return Err(Error::InsufficientData("trajectory tail too short".into()));
    }
    let (min, max) = x
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let tol = match cluster_tol {
        Some(t) if t > 0.0 => t,
        Some(t) => return Err(Error::domain(format!("cluster_tol must be positive, got {t}"))),
        None => 1e-2 * (max - min),
    };
    let peaks = principal_maxima(x, tol);
    if peaks.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "only {} principal maxima in the tail (need 20)",
            peaks.len()
        )));
    }
    // gap clustering on the sorted values
    let mut order: Vec<usize> = (0..peaks.len()).collect();
    order.sort_by(|&a, &b| peaks[a].partial_cmp(&peaks[b]).unwrap());
    let mut labels = vec![0usize; peaks.len()];
    let mut cluster = 0usize;
    for w in 1..order.len() {
        if peaks[order[w]] - peaks[order[w - 1]] > tol {
            cluster += 1;
        }
        labels[order[w]] = cluster;
    }
    labels[order[0]] = 0;
    let n_clusters = cluster + 1;

    let mut sums = vec![(0.0, 0usize); n_clusters];
    for (i, &p) in peaks.iter().enumerate() {
        sums[labels[i]].0 += p;
        sums[labels[i]].1 += 1;
    }
    let distinct_maxima: Vec<f64> = sums.iter().map(|(s, c)| s / *c as f64).collect();

    let last = &labels[labels.len() - 16..];
    let periodic = n_clusters <= 16
        && (0..16 - n_clusters).all(|i| last[i] == last[i + n_clusters]);
    Ok(CycleCount {
        multiplicity: if periodic {
            Multiplicity::Cycle(n_clusters)
        } else {
            Multiplicity::Aperiodic
        },
        distinct_maxima,
        cluster_tol: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SystemParams;
    use crate::rhs;
    use crate::solver::{integrate, InitialData, SolverConfig};

    fn synthetic_traj(values: Vec<f64>, tau: f64, k: usize) -> Trajectory {
        let params = SystemParams::new(1.0, 1.0, 0.3, tau).unwrap();
        let h = tau / k as f64;
        let cfg = SolverConfig::new(k, values.len() as f64 * h);
        Trajectory::from_series(values, 0.0, params, cfg, "sine").unwrap()
    }

    #[test]
    fn embed_counts_and_constant() {
        let cfg = EmbeddingConfig {
            dimension: 3,
            lag: 5,
            theiler_window: 0,
        };
        let series: Vec<f64> = (0..100).map(|i| (i as f64 * 0.3).sin()).collect();
        let e = embed(&series, &cfg).unwrap();
        assert_eq!(e.len(), 90); // N - (d-1) lag
        assert_eq!(e.dimension, 3);

        let constant = vec![2.0; 100];
        let e = embed(&constant, &cfg).unwrap();
        let p0 = e.point(0).to_vec();
        assert!((0..e.len()).all(|i| e.point(i) == p0.as_slice()));
        assert_eq!(e.extent(), 0.0);
    }

    #[test]
    fn embed_too_short() {
        let cfg = EmbeddingConfig {
            dimension: 4,
            lag: 10,
            theiler_window: 0,
        };
        assert!(embed(&vec![0.0; 45], &cfg).is_err());
    }

    #[test]
    fn embed_with_unit_lag_matches_pairs() {
        // d = 2, lag = k: identical index arithmetic to delayed pairs
        let params = SystemParams::new(3.0, 6.0, 0.3, 1.0).unwrap();
        let traj = integrate(
            &params,
            &InitialData::constant(0.02),
            &SolverConfig::new(8, 30.0),
            rhs::lookup("sine").unwrap(),
        )
        .unwrap();
        let cfg = EmbeddingConfig {
            dimension: 2,
            lag: 8,
            theiler_window: 0,
        };
        let e = embed(traj.values(), &cfg).unwrap();
        let pairs = crate::solver::delayed_pairs(&traj).unwrap();
        assert_eq!(e.len(), pairs.len());
        for (i, &(a, b)) in pairs.iter().enumerate() {
            assert_eq!(e.point(i), &[a, b]);
        }
    }

    #[test]
    fn mle_periodic_series_is_small() {
        // clean periodic signal: exponent must be near zero
        let n = 4000usize;
        let series: Vec<f64> = (0..n).map(|i| (i as f64 * 0.05).sin()).collect();
        let traj = synthetic_traj(series, 1.0, 20);
        let cfg = MleConfig {
            embedding: EmbeddingConfig {
                dimension: 3,
                lag: 25,
                theiler_window: 60,
            },
            evolve_steps: 5,
            replace_threshold: 0.1,
            transient_fraction: 0.0,
            max_pair_age: 16,
        };
        let r = mle(&traj, &cfg).unwrap();
        assert!(r.exponent.abs() < 0.02, "exponent {}", r.exponent);
        assert!(r.pair_count >= 10);
    }

    #[test]
    fn mle_needs_pairs() {
        let series: Vec<f64> = (0..200).map(|i| (i as f64 * 0.3).sin()).collect();
        let traj = synthetic_traj(series, 1.0, 20);
        let cfg = MleConfig {
            embedding: EmbeddingConfig {
                dimension: 3,
                lag: 10,
                theiler_window: 30,
            },
            evolve_steps: 5,
            replace_threshold: 0.1,
            transient_fraction: 0.0,
            max_pair_age: 1000,
        };
        assert!(matches!(mle(&traj, &cfg), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn count_cycles_two_level_square_wave() {
        // synthetic 2-cycle: alternating peak heights
        let mut series = Vec::new();
        for p in 0..30 {
            let amp = if p % 2 == 0 { 1.0 } else { 0.6 };
            for i in 0..50 {
                series.push(amp * (std::f64::consts::PI * i as f64 / 50.0).sin());
            }
        }
        let traj = synthetic_traj(series, 1.0, 20);
        let c = count_cycles(&traj, None).unwrap();
        assert_eq!(c.multiplicity, Multiplicity::Cycle(2));
        assert_eq!(c.distinct_maxima.len(), 2);
        assert!(c.distinct_maxima[0] < c.distinct_maxima[1]);
    }

    #[test]
    fn count_cycles_shift_invariance() {
        let mut series = Vec::new();
        for p in 0..30 {
            let amp = if p % 2 == 0 { 1.0 } else { 0.6 };
            for i in 0..50 {
                series.push(amp * (std::f64::consts::PI * i as f64 / 50.0).sin());
            }
        }
        let shifted: Vec<f64> = series.iter().map(|v| v + 2.0 * std::f64::consts::PI).collect();
        let a = count_cycles(&synthetic_traj(series, 1.0, 20), None).unwrap();
        let b = count_cycles(&synthetic_traj(shifted, 1.0, 20), None).unwrap();
        assert_eq!(a.multiplicity, b.multiplicity);
        for (x, y) in a.distinct_maxima.iter().zip(&b.distinct_maxima) {
            assert!((y - x - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        }
    }

    #[test]
    fn count_cycles_insufficient_maxima() {
        let series: Vec<f64> = (0..300).map(|i| (i as f64 * 0.02).sin()).collect();
        let traj = synthetic_traj(series, 1.0, 20);
        assert!(matches!(
            count_cycles(&traj, None),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn count_cycles_aperiodic_labels() {
        // pseudo-random peak heights: clusters exist but no periodic label
        // sequence
        let mut series = Vec::new();
        let mut state = 12345u64;
        for _ in 0..40 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let amp = 0.5 + (state >> 33) as f64 / 2.0_f64.powi(31);
            for i in 0..50 {
                series.push(amp * (std::f64::consts::PI * i as f64 / 50.0).sin());
            }
        }
        let traj = synthetic_traj(series, 1.0, 20);
        let c = count_cycles(&traj, Some(1e-3)).unwrap();
        assert_eq!(c.multiplicity, Multiplicity::Aperiodic);
    }
}
