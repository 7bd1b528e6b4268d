//! `hullwalk` command-line front end.
//!
//! Every subcommand that writes files also writes a run manifest whose
//! `parameters` table can be passed back through `--config` to reproduce the
//! outputs byte for byte (only `wall_clock_seconds` in the manifest differs).

pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use hullwalk::asymptotics::{drift_geometry, limit_shape, sigma_d2, sigma_l2, DriftGeometry};
use hullwalk::geometry::{area, convex_hull, diameter, perimeter};
use hullwalk::io::{self as hio, GridDoc, RunManifest, SampleSummaryDoc};
use hullwalk::montecarlo::{run_experiment, with_workers, ExperimentConfig, Functional};
use hullwalk::oracle::{enumerate_exact, mds_check, DiscreteEnsembleSpec, ExactMoments, MdsReport};
use hullwalk::stats::{pvalue_grid, Averaging, GridSpec, NormalityTest, DEFAULT_SIGMAS};
use hullwalk::walks::{Covariance, Ensemble, StepDistribution};
use hullwalk::Point2;

use config::{CovArg, FloatList, PointArg, Resolver};

/// Default output directory when neither `--out` nor the config sets one.
pub const OUT_DIR_ENV: &str = "HULLWALK_OUT_DIR";
const FALLBACK_OUT_DIR: &str = "hullwalk-out";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or config; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Failure while running; exit code 1.
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Core(#[from] hullwalk::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Core domain errors raised while building a configuration are flag errors.
fn usage(e: hullwalk::Error) -> CliError {
    match e {
        hullwalk::Error::Domain(m) => CliError::Usage(m),
        other => CliError::Core(other),
    }
}

#[derive(Parser, Debug)]
#[command(name = "hullwalk", version, about = "Convex hulls of planar random walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hull of a point list (`x y` per line; `#` starts a comment).
    Hull {
        /// Input file; `-` or absent reads standard input.
        input: Option<PathBuf>,
    },
    /// Replicate the two-walk hull and record its perimeter and diameter.
    Simulate(SimulateArgs),
    /// Normality p-value grid over pairs of variance multipliers.
    Grid(GridArgs),
    /// Drift geometry, assumptions, limit shape and variance constants.
    Verify(VerifyArgs),
    /// Render a grid CSV as an SVG heatmap.
    Plot(PlotArgs),
    /// Exact enumeration check of the martingale-difference decompositions.
    Oracle(OracleArgs),
    /// Export one replication's walk paths as CSV (`step,k,x,y`).
    Walk(WalkArgs),
}

/// Drift and covariance flags shared by several commands.
#[derive(Args, Debug)]
struct WalkFlags {
    /// Drift of walk 1 as `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    mu1: Option<String>,
    /// Drift of walk 2 as `x,y`.
    #[arg(long, allow_hyphen_values = true)]
    mu2: Option<String>,
    /// Walk 1 covariance is `sigma1 * I` (default 1).
    #[arg(long)]
    sigma1: Option<String>,
    /// Walk 2 covariance is `sigma2 * I` (default 1).
    #[arg(long)]
    sigma2: Option<String>,
    /// Full covariance of walk 1 as `xx,xy,yy`; overrides --sigma1.
    #[arg(long, allow_hyphen_values = true)]
    cov1: Option<String>,
    /// Full covariance of walk 2 as `xx,xy,yy`; overrides --sigma2.
    #[arg(long, allow_hyphen_values = true)]
    cov2: Option<String>,
    /// `key = value` file (keys are long flag names) or a run manifest.
    #[arg(long)]
    config: Option<PathBuf>,
}

const WALK_KEYS: [&str; 6] = ["mu1", "mu2", "sigma1", "sigma2", "cov1", "cov2"];

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    walk: WalkFlags,
    /// Steps per walk (default 10000).
    #[arg(long)]
    steps: Option<String>,
    /// Replications (default 1000).
    #[arg(long)]
    reps: Option<String>,
    /// Master seed (default 0).
    #[arg(long)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu2: Option<String>,
    /// Comma-separated variance multipliers (default 0.1,0.5,1,5,10,50,100,500).
    #[arg(long)]
    sigmas: Option<String>,
    /// Replications per repeat (default 1000).
    #[arg(long)]
    reps: Option<String>,
    /// Steps per walk (default 10000).
    #[arg(long)]
    steps: Option<String>,
    /// Independent repeats averaged per cell (default 5).
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// `mean-then-log` (default) or `log-then-mean`.
    #[arg(long)]
    averaging: Option<String>,
    /// `anderson-darling` (default) or `lilliefors`.
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    walk: WalkFlags,
}

#[derive(Args, Debug)]
struct PlotArgs {
    /// Grid CSV written by `hullwalk grid`.
    #[arg(long)]
    input: Option<String>,
    /// `L` (perimeter) or `D` (diameter).
    #[arg(long)]
    functional: Option<String>,
    /// SVG path; the manifest goes next to it as `<stem>.manifest.json`.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// JSON ensemble: `{"n": 2, "walks": [{"support": [[[1,0],0.5], ...]}, ...]}`.
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct WalkArgs {
    #[command(flatten)]
    walk: WalkFlags,
    #[arg(long)]
    steps: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Replication index (default 0); matches row `rep` of `simulate`.
    #[arg(long)]
    rep: Option<String>,
    /// CSV path; standard output when absent.
    #[arg(long)]
    out: Option<String>,
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command) -> CliResult<()> {
    let mut stdout = std::io::stdout().lock();
    match cmd {
        Command::Hull { input } => {
            let text = read_input(input.as_deref())?;
            let report = hull_report(&text)?;
            stdout.write_all(hio::to_json_string(&report)?.as_bytes())?;
        }
        Command::Simulate(a) => simulate(a)?,
        Command::Grid(a) => grid(a)?,
        Command::Verify(a) => {
            let mut r = Resolver::new(a.walk.config.as_deref(), &WALK_KEYS)?;
            let (d1, d2) = walk_pair(&mut r, &a.walk)?;
            let report = verify_report(&d1, &d2)?;
            stdout.write_all(hio::to_json_string(&report)?.as_bytes())?;
        }
        Command::Plot(a) => plot(a)?,
        Command::Oracle(a) => {
            let text = fs::read_to_string(&a.spec)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", a.spec.display())))?;
            let spec = DiscreteEnsembleSpec::from_json(&text).map_err(usage)?;
            let report = with_workers(workers(a.workers), || oracle_report(&spec))??;
            stdout.write_all(hio::to_json_string(&report)?.as_bytes())?;
        }
        Command::Walk(a) => walk(a, &mut stdout)?,
    }
    Ok(())
}

fn workers(flag: Option<usize>) -> usize {
    flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn read_input(path: Option<&Path>) -> CliResult<String> {
    match path {
        None => read_stdin(),
        Some(p) if p == Path::new("-") => read_stdin(),
        Some(p) => fs::read_to_string(p)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display()))),
    }
}

fn read_stdin() -> CliResult<String> {
    let mut s = String::new();
    std::io::stdin().read_to_string(&mut s)?;
    Ok(s)
}

/// Points from `x y` lines; commas also separate. Blank and `#` lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Point2>, hullwalk::Error> {
    let mut pts = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| hullwalk::Error::Parse { line: idx + 1, message };
        let fields: Vec<&str> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .collect();
        if fields.len() != 2 {
            return Err(err(format!("expected two coordinates, found `{line}`")));
        }
        let mut xy = [0.0; 2];
        for (slot, t) in xy.iter_mut().zip(&fields) {
            *slot = t
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| err(format!("`{t}` is not a finite number")))?;
        }
        pts.push(Point2::new(xy[0], xy[1]));
    }
    Ok(pts)
}

#[derive(Debug, Serialize)]
pub struct HullReport {
    pub vertices: Vec<[f64; 2]>,
    pub perimeter: f64,
    pub diameter: f64,
    pub area: f64,
}

pub fn hull_report(text: &str) -> CliResult<HullReport> {
    let pts = parse_points(text)?;
    if pts.is_empty() {
        return Err(CliError::Runtime("no points in input".into()));
    }
    let hull = convex_hull(&pts)?;
    Ok(HullReport {
        vertices: hull.vertices().iter().map(|p| [p.x, p.y]).collect(),
        perimeter: perimeter(&hull),
        diameter: diameter(&hull),
        area: area(&hull),
    })
}

fn covariance(r: &mut Resolver, sigma_key: &str, sigma: Option<&str>, cov_key: &str, cov: Option<&str>) -> CliResult<Covariance> {
    if let Some(c) = r.get_opt::<CovArg>(cov_key, cov)? {
        c.0.check_psd()
            .map_err(|e| CliError::Usage(format!("--{cov_key}: {e}")))?;
        return Ok(c.0);
    }
    let s: f64 = r.get(sigma_key, sigma, Some(1.0))?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(CliError::Usage(format!("--{sigma_key} must be a finite number >= 0, got {s}")));
    }
    Ok(Covariance::isotropic(s))
}

fn walk_pair(r: &mut Resolver, f: &WalkFlags) -> CliResult<(StepDistribution, StepDistribution)> {
    let mu1 = r.get::<PointArg>("mu1", f.mu1.as_deref(), None)?.0;
    let mu2 = r.get::<PointArg>("mu2", f.mu2.as_deref(), None)?.0;
    let c1 = covariance(r, "sigma1", f.sigma1.as_deref(), "cov1", f.cov1.as_deref())?;
    let c2 = covariance(r, "sigma2", f.sigma2.as_deref(), "cov2", f.cov2.as_deref())?;
    Ok((
        StepDistribution::gaussian(mu1, c1).map_err(usage)?,
        StepDistribution::gaussian(mu2, c2).map_err(usage)?,
    ))
}

fn positive(r: &mut Resolver, key: &str, flag: Option<&str>, default: usize) -> CliResult<usize> {
    let v: usize = r.get(key, flag, Some(default))?;
    if v == 0 {
        return Err(CliError::Usage(format!("--{key} must be at least 1")));
    }
    Ok(v)
}

/// Flag, then config, then `$HULLWALK_OUT_DIR`, then `hullwalk-out`. Not
/// echoed in the manifest, so a manifest reproduces into any directory.
fn out_dir(r: &Resolver, flag: Option<&str>) -> PathBuf {
    flag.map(PathBuf::from)
        .or_else(|| r.peek("out").map(PathBuf::from))
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUT_DIR))
}

fn finish_manifest(
    command: &str,
    r: &Resolver,
    seed: Option<u64>,
    outputs: &[&str],
    started: Instant,
) -> RunManifest {
    let mut m = RunManifest::new(command);
    m.parameters = r.resolved();
    m.master_seed = seed;
    m.outputs = outputs.iter().map(|s| s.to_string()).collect();
    m.wall_clock_seconds = started.elapsed().as_secs_f64();
    m
}

const SIMULATE_KEYS: [&str; 10] = ["mu1", "mu2", "sigma1", "sigma2", "cov1", "cov2", "steps", "reps", "seed", "out"];

fn simulate(a: SimulateArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut r = Resolver::new(a.walk.config.as_deref(), &SIMULATE_KEYS)?;
    let (d1, d2) = walk_pair(&mut r, &a.walk)?;
    let steps = positive(&mut r, "steps", a.steps.as_deref(), 10_000)?;
    let reps = positive(&mut r, "reps", a.reps.as_deref(), 1000)?;
    let seed: u64 = r.get("seed", a.seed.as_deref(), Some(0))?;
    let dir = out_dir(&r, a.out.as_deref());

    let cfg = ExperimentConfig::new(vec![d1, d2], steps, reps, seed);
    cfg.validate().map_err(usage)?;
    let samples = with_workers(workers(a.workers), || run_experiment(&cfg))??;

    fs::create_dir_all(&dir)?;
    fs::write(dir.join("samples.csv"), hio::samples_csv_string(&samples)?)?;
    hio::write_json(&dir.join("summary.json"), &SampleSummaryDoc::new(&samples))?;
    let m = finish_manifest("simulate", &r, Some(seed), &["samples.csv", "summary.json"], started);
    hio::write_json(&dir.join("manifest.json"), &m)?;
    Ok(())
}

/// `mean-then-log` / `log-then-mean`.
#[derive(Clone, Copy, Debug)]
struct AveragingArg(Averaging);

impl FromStr for AveragingArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "mean-then-log" => Ok(AveragingArg(Averaging::MeanThenLog)),
            "log-then-mean" => Ok(AveragingArg(Averaging::LogThenMean)),
            _ => Err("expected `mean-then-log` or `log-then-mean`".into()),
        }
    }
}

impl Display for AveragingArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self.0 {
            Averaging::MeanThenLog => "mean-then-log",
            Averaging::LogThenMean => "log-then-mean",
        })
    }
}

#[derive(Clone, Copy, Debug)]
struct TestArg(NormalityTest);

impl FromStr for TestArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "anderson-darling" => Ok(TestArg(NormalityTest::AndersonDarling)),
            "lilliefors" => Ok(TestArg(NormalityTest::Lilliefors)),
            _ => Err("expected `anderson-darling` or `lilliefors`".into()),
        }
    }
}

impl Display for TestArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self.0 {
            NormalityTest::AndersonDarling => "anderson-darling",
            NormalityTest::Lilliefors => "lilliefors",
        })
    }
}

const GRID_KEYS: [&str; 10] = [
    "mu1", "mu2", "sigmas", "reps", "steps", "repeats", "seed", "averaging", "test", "out",
];

fn grid(a: GridArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut r = Resolver::new(a.config.as_deref(), &GRID_KEYS)?;
    let mu1 = r.get::<PointArg>("mu1", a.mu1.as_deref(), None)?.0;
    let mu2 = r.get::<PointArg>("mu2", a.mu2.as_deref(), None)?.0;
    let sigmas = r
        .get("sigmas", a.sigmas.as_deref(), Some(FloatList(DEFAULT_SIGMAS.to_vec())))?
        .0;
    let reps = positive(&mut r, "reps", a.reps.as_deref(), 1000)?;
    let steps = positive(&mut r, "steps", a.steps.as_deref(), 10_000)?;
    let repeats = positive(&mut r, "repeats", a.repeats.as_deref(), 5)?;
    let seed: u64 = r.get("seed", a.seed.as_deref(), Some(0))?;
    let averaging = r
        .get("averaging", a.averaging.as_deref(), Some(AveragingArg(Averaging::default())))?
        .0;
    let test = r.get("test", a.test.as_deref(), Some(TestArg(NormalityTest::default())))?.0;
    let dir = out_dir(&r, a.out.as_deref());

    let spec = GridSpec {
        sigma_values: sigmas,
        n: steps,
        reps,
        repeats,
        master_seed: seed,
        averaging,
        test,
        ..GridSpec::new(mu1, mu2)
    };
    spec.validate().map_err(usage)?;
    let g = with_workers(workers(a.workers), || pvalue_grid(&spec))??;

    fs::create_dir_all(&dir)?;
    fs::write(dir.join("grid.csv"), hio::grid_csv_string(&g)?)?;
    hio::write_json(&dir.join("grid.json"), &GridDoc::new(&g))?;
    let m = finish_manifest("grid", &r, Some(seed), &["grid.csv", "grid.json"], started);
    hio::write_json(&dir.join("manifest.json"), &m)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct AssumptionReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dominant: Option<hullwalk::asymptotics::Dominant>,
}

#[derive(Debug, Serialize)]
pub struct LimitReport {
    pub vertices: Vec<[f64; 2]>,
    pub per: f64,
    pub diam: f64,
}

/// A constant, or why it is undefined.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Constant {
    Value(f64),
    Unavailable { reason: String },
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub geometry: DriftGeometry,
    pub a1: AssumptionReport,
    pub a2: AssumptionReport,
    pub limit: LimitReport,
    pub sigma_l2: Constant,
    pub sigma_d2: Constant,
}

fn constant(v: hullwalk::Result<f64>) -> CliResult<Constant> {
    match v {
        Ok(v) => Ok(Constant::Value(v)),
        Err(hullwalk::Error::AssumptionViolated(reason)) => Ok(Constant::Unavailable { reason }),
        Err(e) => Err(e.into()),
    }
}

pub fn verify_report(d1: &StepDistribution, d2: &StepDistribution) -> CliResult<VerifyReport> {
    let g = drift_geometry(d1.mean(), d2.mean()).map_err(usage)?;
    let shape = limit_shape(&[g.mu1, g.mu2])?;
    Ok(VerifyReport {
        a1: AssumptionReport { holds: g.a1_holds, dominant: None },
        a2: AssumptionReport { holds: g.dominant().is_some(), dominant: g.dominant() },
        limit: LimitReport {
            vertices: shape.polygon.vertices().iter().map(|p| [p.x, p.y]).collect(),
            per: shape.per,
            diam: shape.diam,
        },
        sigma_l2: constant(sigma_l2(d1, d2, &g))?,
        sigma_d2: constant(sigma_d2(d1, d2, &g))?,
        geometry: g,
    })
}

const GRID_HEADER: [&str; 6] = ["sigma1", "sigma2", "avg_p_L", "neglog_L", "avg_p_D", "neglog_D"];

/// Row values, column values and `-ln(avg p)` matrix of one functional.
pub type GridMatrix = (Vec<f64>, Vec<f64>, Vec<Vec<Option<f64>>>);

pub fn read_grid_csv(text: &str, f: Functional) -> CliResult<GridMatrix> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header = rd.headers().map_err(|e| CliError::Runtime(format!("grid CSV: {e}")))?;
    if header.iter().ne(GRID_HEADER) {
        return Err(CliError::Runtime(format!(
            "grid CSV header must be `{}`, found `{}`",
            GRID_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let col = match f {
        Functional::Perimeter => 3,
        Functional::Diameter => 5,
    };
    let mut rows = Vec::new();
    for (k, rec) in rd.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| CliError::Runtime(format!("grid CSV line {line}: {e}")))?;
        let num = |i: usize| -> CliResult<Option<f64>> {
            let t = rec.get(i).unwrap_or("").trim();
            if t.is_empty() {
                return Ok(None);
            }
            t.parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Runtime(format!("grid CSV line {line}: `{t}` is not a number")))
        };
        let (Some(s1), Some(s2)) = (num(0)?, num(1)?) else {
            return Err(CliError::Runtime(format!("grid CSV line {line}: missing sigma")));
        };
        rows.push((s1, s2, num(col)?));
    }
    if rows.is_empty() {
        return Err(CliError::Runtime("grid CSV has no rows".into()));
    }
    let axis = |pick: fn(&(f64, f64, Option<f64>)) -> f64| {
        let mut v: Vec<f64> = rows.iter().map(pick).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let r_vals = axis(|r| r.0);
    let c_vals = axis(|r| r.1);
    let mut cells = vec![vec![None; c_vals.len()]; r_vals.len()];
    for (s1, s2, v) in rows {
        let i = r_vals.iter().position(|&x| x == s1).expect("row value present");
        let j = c_vals.iter().position(|&x| x == s2).expect("column value present");
        cells[i][j] = v;
    }
    Ok((r_vals, c_vals, cells))
}

fn parse_functional(s: &str) -> Result<Functional, String> {
    match s {
        "L" => Ok(Functional::Perimeter),
        "D" => Ok(Functional::Diameter),
        _ => Err("expected `L` or `D`".into()),
    }
}

#[derive(Clone, Debug)]
struct FunctionalArg(Functional);

impl FromStr for FunctionalArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        parse_functional(s).map(FunctionalArg)
    }
}

impl Display for FunctionalArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.0.name())
    }
}

fn plot(a: PlotArgs) -> CliResult<()> {
    let started = Instant::now();
    let mut r = Resolver::new(a.config.as_deref(), &["input", "functional", "out"])?;
    let input: String = r.get("input", a.input.as_deref(), None)?;
    let f = r.get::<FunctionalArg>("functional", a.functional.as_deref(), Some(FunctionalArg(Functional::Perimeter)))?.0;
    let out = PathBuf::from(r.get::<String>("out", a.out.as_deref(), None)?);

    let text = fs::read_to_string(&input)
        .map_err(|e| CliError::Usage(format!("cannot read {input}: {e}")))?;
    let (rows, cols, cells) = read_grid_csv(&text, f)?;
    let title = format!("-ln(avg p) of {}", f.name());
    let image = svg::render(&svg::Heatmap {
        title: &title,
        row_values: &rows,
        col_values: &cols,
        cells: &cells,
    });
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(&out, image)?;
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let name = out.file_name().and_then(|s| s.to_str()).unwrap_or("plot.svg");
    let m = finish_manifest("plot", &r, None, &[name], started);
    hio::write_json(&out.with_file_name(format!("{stem}.manifest.json")), &m)?;
    Ok(())
}

#[derive(Debug, Serialize)]
pub struct OracleReport {
    pub exact: ExactMoments,
    pub decomposition: MdsReport,
}

pub fn oracle_report(spec: &DiscreteEnsembleSpec) -> CliResult<OracleReport> {
    Ok(OracleReport {
        exact: enumerate_exact(spec)?,
        decomposition: mds_check(spec)?,
    })
}

const WALK_CMD_KEYS: [&str; 10] = ["mu1", "mu2", "sigma1", "sigma2", "cov1", "cov2", "steps", "seed", "rep", "out"];

fn walk(a: WalkArgs, stdout: &mut impl Write) -> CliResult<()> {
    let mut r = Resolver::new(a.walk.config.as_deref(), &WALK_CMD_KEYS)?;
    let (d1, d2) = walk_pair(&mut r, &a.walk)?;
    let steps = positive(&mut r, "steps", a.steps.as_deref(), 1000)?;
    let seed: u64 = r.get("seed", a.seed.as_deref(), Some(0))?;
    let rep: u64 = r.get("rep", a.rep.as_deref(), Some(0))?;
    let out = r.get_opt::<String>("out", a.out.as_deref())?;

    let ens = Ensemble::generate(&[d1, d2], steps, seed, rep)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["step", "k", "x", "y"]).map_err(hullwalk::Error::from)?;
    for (k, path) in ens.walks().iter().enumerate() {
        for (step, p) in path.partial_sums().iter().enumerate() {
            w.serialize((step, k + 1, p.x, p.y)).map_err(hullwalk::Error::from)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    match out {
        Some(path) => fs::write(path, bytes)?,
        None => stdout.write_all(&bytes)?,
    }
    Ok(())
}
