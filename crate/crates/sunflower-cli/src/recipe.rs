//! Recipe files: named, reproducible command invocations with optional
//! expected-value blocks for regression checking.
//!
//! The native format is line-oriented `key = value` blocks separated by
//! blank lines; `#` starts a comment. A file whose first non-blank character
//! is `[` is parsed as a JSON array of flat objects with the same keys.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;

use rayon::prelude::*;

use sunflower_core::bifurcation::{self, CurveKind};
use sunflower_core::chaos::{self, Multiplicity};
use sunflower_core::solver::{self, Trajectory};
use sunflower_core::stability::{self, ScanConfig};
use sunflower_core::Error as CoreError;

use crate::cmds::{mle_config, resolve_out, MleArgs, SimFlags};

#[derive(Debug, Clone)]
pub struct Recipe {
    pub name: String,
    pub command: String,
    pub line: usize,
    pub kv: BTreeMap<String, String>,
}

#[derive(Debug)]
pub struct RecipeResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "recipe parse error at line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        message: message.into(),
    }
}

const COMMANDS: &[&str] = &[
    "simulate",
    "classify",
    "curve",
    "mle",
    "cycles",
    "attractor",
];

pub fn parse(text: &str) -> Result<Vec<Recipe>, ParseError> {
    if text.trim_start().starts_with('[') {
        return parse_json(text);
    }
    let mut recipes: Vec<Recipe> = Vec::new();
    let mut current: BTreeMap<String, String> = BTreeMap::new();
    let mut block_start = 0usize;

    let flush = |kv: &mut BTreeMap<String, String>, line: usize, out: &mut Vec<Recipe>| -> Result<(), ParseError> {
        if kv.is_empty() {
            return Ok(());
        }
        let name = kv
            .remove("name")
            .ok_or_else(|| err(line, "block is missing `name`"))?;
        let command = kv
            .remove("command")
            .ok_or_else(|| err(line, format!("recipe {name:?} is missing `command`")))?;
        if !COMMANDS.contains(&command.as_str()) {
            return Err(err(
                line,
                format!("recipe {name:?}: unknown command {command:?} (expected one of {COMMANDS:?})"),
            ));
        }
        if out.iter().any(|r| r.name == name) {
            return Err(err(line, format!("duplicate recipe name {name:?}")));
        }
        out.push(Recipe {
            name,
            command,
            line,
            kv: std::mem::take(kv),
        });
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            flush(&mut current, block_start, &mut recipes)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(err(lineno, format!("expected `key = value`, got {line:?}")));
        };
        if current.is_empty() {
            block_start = lineno;
        }
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(err(lineno, "empty key"));
        }
        if current.contains_key(&key) {
            return Err(err(lineno, format!("duplicate key {key:?} in block")));
        }
        current.insert(key, value.trim().to_string());
    }
    flush(&mut current, block_start, &mut recipes)?;
    Ok(recipes)
}

fn parse_json(text: &str) -> Result<Vec<Recipe>, ParseError> {
    let rows: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(text).map_err(|e| err(e.line(), e.to_string()))?;
    let mut recipes = Vec::new();
    for (i, row) in rows.into_iter().enumerate() {
        let mut kv = BTreeMap::new();
        for (k, v) in row {
            let s = match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            };
            kv.insert(k, s);
        }
        let name = kv
            .remove("name")
            .ok_or_else(|| err(i + 1, format!("JSON recipe #{i} is missing \"name\"")))?;
        let command = kv
            .remove("command")
            .ok_or_else(|| err(i + 1, format!("JSON recipe {name:?} is missing \"command\"")))?;
        if !COMMANDS.contains(&command.as_str()) {
            return Err(err(i + 1, format!("unknown command {command:?}")));
        }
        recipes.push(Recipe {
            name,
            command,
            line: i + 1,
            kv,
        });
    }
    Ok(recipes)
}

pub fn run_all(recipes: Vec<Recipe>, jobs: usize) -> Vec<RecipeResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let mut results: Vec<RecipeResult> =
        pool.install(|| recipes.par_iter().map(run_one).collect());
    // report order is by name, independent of completion order
    results.sort_by(|a, b| a.name.cmp(&b.name));
    results
}

struct Ctx<'a> {
    r: &'a Recipe,
}

impl<'a> Ctx<'a> {
    fn get(&self, key: &str) -> Option<&str> {
        self.r.kv.get(key).map(|s| s.as_str())
    }

    fn num(&self, key: &str) -> Result<Option<f64>, String> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| format!("key {key:?}: not a number: {s:?}")),
        }
    }

    fn num_req(&self, key: &str) -> Result<f64, String> {
        self.num(key)?.ok_or_else(|| format!("missing key {key:?}"))
    }

    fn num_or(&self, key: &str, default: f64) -> Result<f64, String> {
        Ok(self.num(key)?.unwrap_or(default))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize, String> {
        match self.get(key) {
            None => Ok(default),
            Some(s) => s
                .parse::<usize>()
                .map_err(|_| format!("key {key:?}: not an integer: {s:?}")),
        }
    }

    fn sim_flags(&self) -> Result<SimFlags, String> {
        Ok(SimFlags {
            l: self.num_req("l")?,
            m: self.num_req("m")?,
            alpha: self.num_req("alpha")?,
            tau: self.num_req("tau")?,
            history: self.num_req("history")?,
            x0prime: self.num("x0prime")?,
            k: self.usize_or("k", 100)?,
            t_final: self.num_or("T", 100.0)?,
            rhs: self.get("rhs").unwrap_or("sine").to_string(),
            sweeps: self.usize_or("sweeps", 1)?,
            literal_z: matches!(self.get("literal_z"), Some("true") | Some("1")),
        })
    }

    /// Absolute/relative tolerance check for an `expect.<field>` key.
    fn check_close(&self, field: &str, actual: f64, checks: &mut Checks) -> Result<(), String> {
        let key = format!("expect.{field}");
        let Some(expected) = self.num(&key)? else {
            return Ok(());
        };
        let atol = self.num(&format!("expect.{field}_atol"))?;
        let rtol = self.num(&format!("expect.{field}_rtol"))?;
        let tol = match (atol, rtol) {
            (Some(a), None) => a,
            (None, Some(r)) => r * expected.abs(),
            (Some(a), Some(r)) => a.max(r * expected.abs()),
            (None, None) => 1e-3 * expected.abs(),
        };
        checks.close(field, actual, expected, tol);
        Ok(())
    }
}

#[derive(Default)]
struct Checks {
    items: Vec<(String, bool)>,
    detail: String,
}

impl Checks {
    fn close(&mut self, label: &str, actual: f64, expected: f64, tol: f64) {
        let ok = (actual - expected).abs() <= tol;
        let _ = write!(
            self.detail,
            "{label}={actual:.6} (want {expected} ± {tol:.2e}) "
        );
        self.items.push((label.to_string(), ok));
    }

    fn require(&mut self, label: &str, ok: bool, note: impl std::fmt::Display) {
        let _ = write!(self.detail, "{note} ");
        self.items.push((label.to_string(), ok));
    }

    fn passed(&self) -> bool {
        self.items.iter().all(|(_, ok)| *ok)
    }

    fn summary(&self, name: &str) -> RecipeResult {
        let failed: Vec<&str> = self
            .items
            .iter()
            .filter(|(_, ok)| !ok)
            .map(|(l, _)| l.as_str())
            .collect();
        let detail = if failed.is_empty() {
            if self.items.is_empty() {
                "ran (no expectations)".to_string()
            } else {
                self.detail.trim().to_string()
            }
        } else {
            format!("FAILED [{}]: {}", failed.join(", "), self.detail.trim())
        };
        RecipeResult {
            name: name.to_string(),
            passed: self.passed(),
            detail,
        }
    }
}

fn run_one(r: &Recipe) -> RecipeResult {
    let ctx = Ctx { r };
    match dispatch(&ctx) {
        Ok(result) => result,
        Err(msg) => RecipeResult {
            name: r.name.clone(),
            passed: false,
            detail: format!("ERROR (recipe at line {}): {msg}", r.line),
        },
    }
}

fn dispatch(ctx: &Ctx) -> Result<RecipeResult, String> {
    match ctx.r.command.as_str() {
        "simulate" => run_simulate(ctx),
        "classify" => run_classify(ctx),
        "curve" => run_curve(ctx),
        "mle" => run_mle(ctx),
        "cycles" => run_cycles(ctx),
        "attractor" => run_attractor(ctx),
        other => Err(format!("unknown command {other:?}")),
    }
}

fn maybe_write_csv(ctx: &Ctx, traj: &Trajectory) -> Result<(), String> {
    if let Some(path) = ctx.get("out") {
        let path = resolve_out(std::path::Path::new(path));
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
            }
        }
        let f = std::fs::File::create(&path).map_err(|e| e.to_string())?;
        traj.write_csv(std::io::BufWriter::new(f))
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn run_simulate(ctx: &Ctx) -> Result<RecipeResult, String> {
    let flags = ctx.sim_flags()?;
    let mut checks = Checks::default();
    let expects_divergence = matches!(ctx.get("expect.diverges"), Some("true") | Some("1"));
    let traj = match flags.run() {
        Ok(t) => {
            if expects_divergence {
                checks.require("diverges", false, "run stayed bounded but divergence expected");
            }
            t
        }
        Err(CoreError::Diverged { step, partial, .. }) => {
            checks.require(
                "diverges",
                expects_divergence,
                format!("diverged at step {step}"),
            );
            *partial
        }
        Err(e) => return Err(e.to_string()),
    };
    maybe_write_csv(ctx, &traj)?;
    if let Some(center) = ctx.num("expect.final_distance_to")? {
        let last = *traj.values().last().unwrap();
        let dist = (last - center).abs();
        if let Some(max) = ctx.num("expect.final_distance_max")? {
            checks.require(
                "final_distance_max",
                dist <= max,
                format!("|x(T) - {center}| = {dist:.4} (max {max})"),
            );
        }
        if let Some(min) = ctx.num("expect.final_distance_min")? {
            checks.require(
                "final_distance_min",
                dist >= min,
                format!("|x(T) - {center}| = {dist:.4} (min {min})"),
            );
        }
    }
    Ok(checks.summary(&ctx.r.name))
}

fn run_classify(ctx: &Ctx) -> Result<RecipeResult, String> {
    let l = ctx.num_req("l")?;
    let m = ctx.num_req("m")?;
    let alpha = ctx.num_req("alpha")?;
    let scan = ScanConfig {
        horizon: ctx.num_or("tmax", stability::DEFAULT_SCAN_HORIZON)?,
        grid_points: ctx.usize_or("grid_points", stability::DEFAULT_GRID_POINTS)?,
    };
    let mut checks = Checks::default();
    match ctx.get("equilibrium").unwrap_or("x1") {
        "x1" => {
            let v = stability::classify_x1(l, m, alpha, &scan).map_err(|e| e.to_string())?;
            let got = serde_json::to_value(v.classification).unwrap();
            let got = got.as_str().unwrap().to_string();
            if let Some(want) = ctx.get("expect.classification") {
                checks.require(
                    "classification",
                    got == want,
                    format!("classification={got}"),
                );
            }
            for (i, field) in ["tau1", "tau2"].iter().enumerate() {
                if ctx.get(&format!("expect.{field}")).is_some() {
                    match v.critical_delays.get(i) {
                        Some(&actual) => ctx.check_close(field, actual, &mut checks)?,
                        None => checks.require(
                            field,
                            false,
                            format!("{field} expected but only {} delays found", v.critical_delays.len()),
                        ),
                    }
                }
            }
        }
        "x2" => {
            let tau = ctx.num_req("tau")?;
            let params = sunflower_core::SystemParams::new(l, m, alpha, tau)
                .map_err(|e| e.to_string())?;
            let v = stability::classify_x2(&params).map_err(|e| e.to_string())?;
            if let Some(want) = ctx.get("expect.classification") {
                checks.require(
                    "classification",
                    want == "always-unstable",
                    "classification=always-unstable",
                );
            }
            if matches!(ctx.get("expect.witness_positive"), Some("true") | Some("1")) {
                checks.require(
                    "witness_positive",
                    v.witness_root > 0.0 && v.residual < 1e-12,
                    format!("witness={:.6e} residual={:.2e}", v.witness_root, v.residual),
                );
            }
        }
        other => return Err(format!("equilibrium must be x1 or x2, got {other:?}")),
    }
    Ok(checks.summary(&ctx.r.name))
}

fn run_curve(ctx: &Ctx) -> Result<RecipeResult, String> {
    let alpha = ctx.num_req("alpha")?;
    let which = match ctx.get("which").ok_or("missing key \"which\"")? {
        "h1" => CurveKind::H1,
        "h2" => CurveKind::H2,
        other => return Err(format!("which must be h1 or h2, got {other:?}")),
    };
    let range = ctx.get("lrange").ok_or("missing key \"lrange\"")?;
    let (lo, hi) = {
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 2 {
            return Err(format!("lrange must be lo:hi, got {range:?}"));
        }
        (
            parts[0].parse::<f64>().map_err(|_| "bad lrange")?,
            parts[1].parse::<f64>().map_err(|_| "bad lrange")?,
        )
    };
    let points = ctx.usize_or("points", 8)?;
    let scan = ScanConfig {
        horizon: ctx.num_or("tmax", stability::DEFAULT_SCAN_HORIZON)?,
        grid_points: ctx.usize_or("grid_points", stability::DEFAULT_GRID_POINTS)?,
    };
    let curve = bifurcation::trace_curve(alpha, (lo, hi), points, which, &scan, false)
        .map_err(|e| e.to_string())?;
    if let Some(path) = ctx.get("out") {
        let path = resolve_out(std::path::Path::new(path));
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
            }
        }
        let mut f = std::io::BufWriter::new(std::fs::File::create(&path).map_err(|e| e.to_string())?);
        writeln!(f, "l,m").map_err(|e| e.to_string())?;
        for s in &curve.samples {
            match s.m {
                Some(m) => writeln!(f, "{},{}", s.l, m).map_err(|e| e.to_string())?,
                None => writeln!(f, "{},", s.l).map_err(|e| e.to_string())?,
            }
        }
    }
    let mut checks = Checks::default();
    if let Some(at_l) = ctx.num("expect.at_l")? {
        let nearest = curve
            .samples
            .iter()
            .min_by(|a, b| {
                (a.l - at_l)
                    .abs()
                    .partial_cmp(&(b.l - at_l).abs())
                    .unwrap()
            })
            .ok_or("empty curve")?;
        match nearest.m {
            Some(m_val) => ctx.check_close("m", m_val, &mut checks)?,
            None => checks.require("m", false, format!("gap at l={}", nearest.l)),
        }
    }
    Ok(checks.summary(&ctx.r.name))
}

fn run_mle(ctx: &Ctx) -> Result<RecipeResult, String> {
    let sim = ctx.sim_flags()?;
    let args = MleArgs {
        sim: sim.clone(),
        tail: ctx.num_or("tail", 0.5)?,
        dim: ctx.usize_or("dim", 3)?,
        lag: ctx.num("lag")?.map(|v| v as usize),
        theiler: ctx.num("theiler")?.map(|v| v as usize),
        evolve: ctx.usize_or("evolve", 5)?,
        replace_threshold: ctx.num_or("replace_threshold", 0.1)?,
        max_pair_age: ctx.usize_or("max_pair_age", 16)?,
        out: None,
    };
    let traj = sim.run().map_err(|e| e.to_string())?;
    let cfg = mle_config(&args);
    let r = chaos::mle(&traj, &cfg).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    if let Some(min) = ctx.num("expect.exponent_min")? {
        checks.require(
            "exponent_min",
            r.exponent >= min,
            format!("exponent={:.4} (min {min})", r.exponent),
        );
    }
    if let Some(max) = ctx.num("expect.exponent_max")? {
        checks.require(
            "exponent_max",
            r.exponent <= max,
            format!("exponent={:.4} (max {max})", r.exponent),
        );
    }
    Ok(checks.summary(&ctx.r.name))
}

fn run_cycles(ctx: &Ctx) -> Result<RecipeResult, String> {
    let sim = ctx.sim_flags()?;
    let traj = sim.run().map_err(|e| e.to_string())?;
    let kept = solver::tail(&traj, ctx.num_or("tail", 0.5)?).map_err(|e| e.to_string())?;
    let c = chaos::count_cycles(&kept, ctx.num("cluster_tol")?).map_err(|e| e.to_string())?;
    let mut checks = Checks::default();
    if let Some(want) = ctx.get("expect.multiplicity") {
        let got = match c.multiplicity {
            Multiplicity::Cycle(n) => n.to_string(),
            Multiplicity::Aperiodic => "aperiodic".to_string(),
        };
        checks.require(
            "multiplicity",
            got == want,
            format!("multiplicity={got} (want {want})"),
        );
    }
    Ok(checks.summary(&ctx.r.name))
}

fn run_attractor(ctx: &Ctx) -> Result<RecipeResult, String> {
    let sim = ctx.sim_flags()?;
    let traj = sim.run().map_err(|e| e.to_string())?;
    let pairs = solver::delayed_pairs(&traj).map_err(|e| e.to_string())?;
    if let Some(path) = ctx.get("out") {
        let path = resolve_out(std::path::Path::new(path));
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| e.to_string())?;
            }
        }
        let f = std::fs::File::create(&path).map_err(|e| e.to_string())?;
        solver::write_pairs_csv(std::io::BufWriter::new(f), &traj, &pairs)
            .map_err(|e| e.to_string())?;
    }
    let mut checks = Checks::default();
    if let Some(min) = ctx.num("expect.range_min")? {
        let (lo, hi) = traj
            .values()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        checks.require(
            "range_min",
            hi - lo >= min,
            format!("x range = {:.3} (min {min})", hi - lo),
        );
    }
    Ok(checks.summary(&ctx.r.name))
}
