//! Command implementations. Every output file is self-describing (parameters
//! and tool version in the header or JSON body) and carries no timestamps,
//! so identical invocations produce byte-identical files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde_json::json;

use sunflower_core::bifurcation::{self, CurveKind};
use sunflower_core::chaos::{self, EmbeddingConfig, MleConfig};
use sunflower_core::rhs;
use sunflower_core::solver::{self, InitialData, SolverConfig, Trajectory};
use sunflower_core::stability::{self, ScanConfig};
use sunflower_core::{Error as CoreError, SystemParams};

use crate::{recipe, EXIT_DIVERGENCE, EXIT_DOMAIN, EXIT_INSUFFICIENT, EXIT_OK, EXIT_REGRESSION};

pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<CoreError>() {
        Some(CoreError::Diverged { .. }) => EXIT_DIVERGENCE,
        Some(CoreError::InsufficientData(_)) => EXIT_INSUFFICIENT,
        Some(_) => EXIT_DOMAIN,
        None => EXIT_DOMAIN,
    }
}

/// Resolve an output path under `SUNFLOWER_OUT_DIR` when set and relative.
pub fn resolve_out(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os("SUNFLOWER_OUT_DIR") {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_or_stdout(out: &Option<PathBuf>, body: impl Fn(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(p) => {
            let p = resolve_out(p);
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            let mut w = BufWriter::new(
                File::create(&p).with_context(|| format!("creating {}", p.display()))?,
            );
            body(&mut w)?;
            w.flush()?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
    }
}

/// Shared simulation flags.
#[derive(Args, Clone, Debug)]
pub struct SimFlags {
    /// Growth-rate-like coefficient l (> 0)
    #[arg(long)]
    pub l: f64,
    /// Forcing coefficient m (> 0)
    #[arg(long)]
    pub m: f64,
    /// Fractional order alpha in (0, 1]
    #[arg(long)]
    pub alpha: f64,
    /// Delay tau (> 0, time units)
    #[arg(long)]
    pub tau: f64,
    /// Constant history value on (-tau, 0]
    #[arg(long)]
    pub history: f64,
    /// x'(0); required when alpha >= 1/2
    #[arg(long)]
    pub x0prime: Option<f64>,
    /// Substeps per delay: the grid step is h = tau / k
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    /// Final time (time units)
    #[arg(long = "T", default_value_t = 100.0)]
    pub t_final: f64,
    /// Delayed-feedback kernel: sine | linear-x1 | linear-x2
    #[arg(long, default_value = "sine")]
    pub rhs: String,
    /// Corrector sweeps per step
    #[arg(long, default_value_t = 1)]
    pub sweeps: usize,
    /// Use the literal (alpha + 2) denominator in the predictor increment
    #[arg(long, default_value_t = false)]
    pub literal_z: bool,
}

impl SimFlags {
    pub fn run(&self) -> Result<Trajectory, CoreError> {
        let params = SystemParams::new(self.l, self.m, self.alpha, self.tau)?;
        if self.alpha >= 0.5 && self.x0prime.is_none() {
            return Err(CoreError::domain(
                "--x0prime is required when alpha >= 1/2",
            ));
        }
        let mut init = InitialData::constant(self.history);
        if let Some(d) = self.x0prime {
            init = init.with_derivative(d);
        }
        let mut config = SolverConfig::new(self.k, self.t_final).with_sweeps(self.sweeps);
        config.literal_z_weight = self.literal_z;
        let kernel = rhs::lookup(&self.rhs).ok_or_else(|| {
            CoreError::domain(format!(
                "--rhs must be one of {:?}, got {:?}",
                rhs::names(),
                self.rhs
            ))
        })?;
        solver::integrate(&params, &init, &config, kernel)
    }
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn simulate(args: SimulateArgs) -> Result<u8> {
    match args.sim.run() {
        Ok(traj) => {
            write_or_stdout(&args.out, |w| Ok(traj.write_csv(w)?))?;
            Ok(EXIT_OK)
        }
        Err(CoreError::Diverged {
            step,
            time,
            partial,
        }) => {
            // the partial trajectory is still written; the step lands on the
            // diagnostic stream
            write_or_stdout(&args.out, |w| Ok(partial.write_csv(w)?))?;
            eprintln!("sunflower: solution diverged at step {step} (t = {time}); partial trajectory written");
            Ok(EXIT_DIVERGENCE)
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub l: f64,
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub alpha: f64,
    /// Which equilibrium family: x1 (even multiples of pi) or x2 (odd)
    #[arg(long, default_value = "x1")]
    pub equilibrium: String,
    /// Delay tau; used by the x2 witness-root search
    #[arg(long)]
    pub tau: Option<f64>,
    /// Scan horizon T_max for fixed points of g
    #[arg(long, default_value_t = stability::DEFAULT_SCAN_HORIZON)]
    pub tmax: f64,
    /// Scan grid resolution
    #[arg(long, default_value_t = stability::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Also write the verdict JSON to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Dump the g(tau) curve as `tau,g_tau` CSV to this file
    #[arg(long)]
    pub dump_curve: Option<PathBuf>,
}

pub fn classify(args: ClassifyArgs) -> Result<u8> {
    let scan = ScanConfig {
        horizon: args.tmax,
        grid_points: args.grid_points,
    };
    let verdict_json = match args.equilibrium.as_str() {
        "x1" => {
            let v = stability::classify_x1(args.l, args.m, args.alpha, &scan)?;
            json!({
                "equilibrium": "x1",
                "classification": v.classification,
                "critical_delays": v.critical_delays,
                "scan_horizon": v.scan_horizon,
                "multiplicity_warning": v.multiplicity_warning,
                "params": {"l": args.l, "m": args.m, "alpha": args.alpha},
                "version": env!("CARGO_PKG_VERSION"),
            })
        }
        "x2" => {
            let tau = args.tau.ok_or_else(|| {
                CoreError::domain("--tau is required for --equilibrium x2")
            })?;
            let params = SystemParams::new(args.l, args.m, args.alpha, tau)?;
            let v = stability::classify_x2(&params)?;
            json!({
                "equilibrium": "x2",
                "classification": v.verdict.classification,
                "critical_delays": v.verdict.critical_delays,
                "scan_horizon": v.verdict.scan_horizon,
                "witness_root": v.witness_root,
                "residual": v.residual,
                "params": {"l": args.l, "m": args.m, "alpha": args.alpha, "tau": tau},
                "version": env!("CARGO_PKG_VERSION"),
            })
        }
        other => {
            return Err(CoreError::domain(format!(
                "--equilibrium must be x1 or x2, got {other:?}"
            ))
            .into())
        }
    };
    let rendered = serde_json::to_string_pretty(&verdict_json)?;
    println!("{rendered}");
    if let Some(out) = &args.out {
        write_or_stdout(&Some(out.clone()), |w| {
            writeln!(w, "{rendered}")?;
            Ok(())
        })?;
    }
    if let Some(curve_path) = &args.dump_curve {
        let curve = stability::g_curve(args.l, args.m, args.alpha, args.tmax, 2000)?;
        write_or_stdout(&Some(curve_path.clone()), |w| {
            writeln!(
                w,
                "# sunflower v{} | l={} m={} alpha={} | horizon={}",
                env!("CARGO_PKG_VERSION"),
                args.l,
                args.m,
                args.alpha,
                args.tmax
            )?;
            writeln!(w, "tau,g_tau")?;
            for (t, g) in &curve {
                writeln!(w, "{t},{g}")?;
            }
            Ok(())
        })?;
    }
    Ok(EXIT_OK)
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[arg(long)]
    pub alpha: f64,
    /// Which boundary: h1 (escape) or h2 (tangency)
    #[arg(long)]
    pub which: String,
    /// l range as lo:hi
    #[arg(long, value_name = "LO:HI")]
    pub lrange: String,
    /// Number of l samples
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    #[arg(long, default_value_t = stability::DEFAULT_SCAN_HORIZON)]
    pub tmax: f64,
    #[arg(long, default_value_t = stability::DEFAULT_GRID_POINTS)]
    pub grid_points: usize,
    /// Distribute l samples across threads (identical results either way)
    #[arg(long, default_value_t = false)]
    pub parallel: bool,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn curve(args: CurveArgs) -> Result<u8> {
    let which = match args.which.as_str() {
        "h1" => CurveKind::H1,
        "h2" => CurveKind::H2,
        other => {
            return Err(CoreError::domain(format!(
                "--which must be h1 or h2, got {other:?}"
            ))
            .into())
        }
    };
    let (lo, hi) = parse_range(&args.lrange)?;
    let scan = ScanConfig {
        horizon: args.tmax,
        grid_points: args.grid_points,
    };
    let curve = bifurcation::trace_curve(args.alpha, (lo, hi), args.points, which, &scan, args.parallel)?;
    let meta = json!({
        "alpha": curve.alpha,
        "which": curve.which,
        "t_max": curve.horizon,
        "tolerances": {"h2_rel": 1e-6, "h1_rel": 1e-4},
        "version": env!("CARGO_PKG_VERSION"),
    });
    write_or_stdout(&args.out, |w| {
        writeln!(w, "# {meta}")?;
        writeln!(w, "l,m")?;
        for s in &curve.samples {
            match s.m {
                Some(m) => writeln!(w, "{},{}", s.l, m)?,
                None => writeln!(w, "{},", s.l)?,
            }
        }
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn parse_range(spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 2 {
        return Err(CoreError::domain(format!("range must look like lo:hi, got {spec:?}")).into());
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CoreError::domain(format!("bad range endpoint {:?}", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CoreError::domain(format!("bad range endpoint {:?}", parts[1])))?;
    Ok((lo, hi))
}

#[derive(Args, Debug)]
pub struct MleArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Fraction of the run kept as the analysis tail
    #[arg(long, default_value_t = 0.5)]
    pub tail: f64,
    /// Embedding dimension
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Embedding lag in samples (default: k / 4)
    #[arg(long)]
    pub lag: Option<usize>,
    /// Theiler exclusion window in samples (default: k)
    #[arg(long)]
    pub theiler: Option<usize>,
    /// Samples per co-evolution chunk
    #[arg(long, default_value_t = 5)]
    pub evolve: usize,
    /// Neighbor replacement trigger, fraction of attractor extent
    #[arg(long, default_value_t = 0.1)]
    pub replace_threshold: f64,
    /// Pair renewal age, in chunks
    #[arg(long, default_value_t = 16)]
    pub max_pair_age: usize,
    /// Output JSON path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn mle_config(a: &MleArgs) -> MleConfig {
    MleConfig {
        embedding: EmbeddingConfig {
            dimension: a.dim,
            lag: a.lag.unwrap_or((a.sim.k / 4).max(1)),
            theiler_window: a.theiler.unwrap_or(a.sim.k),
        },
        evolve_steps: a.evolve,
        replace_threshold: a.replace_threshold,
        transient_fraction: 1.0 - a.tail,
        max_pair_age: a.max_pair_age,
    }
}

pub fn mle(args: MleArgs) -> Result<u8> {
    let traj = args.sim.run()?;
    let cfg = mle_config(&args);
    let r = chaos::mle(&traj, &cfg)?;
    let body = json!({
        "exponent": r.exponent,
        "pair_count": r.pair_count,
        "transient_discarded": r.transient_discarded,
        "config": cfg,
        "params": traj.params,
        "solver": traj.config,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let rendered = serde_json::to_string_pretty(&body)?;
    write_or_stdout(&args.out, |w| {
        writeln!(w, "{rendered}")?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}

#[derive(Args, Debug)]
pub struct CyclesArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Fraction of the run kept as the analysis tail
    #[arg(long, default_value_t = 0.5)]
    pub tail: f64,
    /// Absolute peak-clustering tolerance (default: 1e-2 of the tail range)
    #[arg(long)]
    pub cluster_tol: Option<f64>,
    /// Output JSON path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn cycles(args: CyclesArgs) -> Result<u8> {
    let traj = args.sim.run()?;
    let kept = solver::tail(&traj, args.tail)?;
    let c = chaos::count_cycles(&kept, args.cluster_tol)?;
    let body = json!({
        "multiplicity": c.multiplicity,
        "distinct_maxima": c.distinct_maxima,
        "cluster_tol": c.cluster_tol,
        "tail_fraction": args.tail,
        "params": traj.params,
        "solver": traj.config,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let rendered = serde_json::to_string_pretty(&body)?;
    write_or_stdout(&args.out, |w| {
        writeln!(w, "{rendered}")?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}

#[derive(Args, Debug)]
pub struct AttractorArgs {
    #[command(flatten)]
    pub sim: SimFlags,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn attractor(args: AttractorArgs) -> Result<u8> {
    let traj = args.sim.run()?;
    let pairs = solver::delayed_pairs(&traj)?;
    write_or_stdout(&args.out, |w| {
        Ok(solver::write_pairs_csv(w, &traj, &pairs)?)
    })?;
    Ok(EXIT_OK)
}

#[derive(Args, Debug)]
pub struct ReproduceArgs {
    /// Recipe file (key = value blocks, or a JSON array)
    #[arg(long)]
    pub recipes: PathBuf,
    /// Parallel recipe jobs
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the report to this file
    #[arg(long)]
    pub report: Option<PathBuf>,
}

pub fn reproduce(args: ReproduceArgs) -> Result<u8> {
    let text = std::fs::read_to_string(&args.recipes)
        .with_context(|| format!("reading {}", args.recipes.display()))?;
    let recipes = match recipe::parse(&text) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("sunflower: {e}");
            return Ok(crate::EXIT_USAGE);
        }
    };
    let jobs = args
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    let results = recipe::run_all(recipes, jobs);
    let mut report = String::new();
    let mut failed = 0usize;
    report.push_str(&format!("{:<40} {:<6} DETAIL\n", "RECIPE", "STATUS"));
    for r in &results {
        if !r.passed {
            failed += 1;
        }
        report.push_str(&format!(
            "{:<40} {:<6} {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        ));
    }
    report.push_str(&format!(
        "{} recipes, {} passed, {} failed\n",
        results.len(),
        results.len() - failed,
        failed
    ));
    print!("{report}");
    if let Some(path) = &args.report {
        write_or_stdout(&Some(path.clone()), |w| {
            write!(w, "{report}")?;
            Ok(())
        })?;
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_REGRESSION })
}
