use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use proframe_core::frames::{bidual_report, duality_residuals, BidualReport};
use proframe_core::oracle::{cross_validate, sampled_order_check, CrossValidationReport};
use proframe_core::random::{random_frame, random_module_element, seeded_rng, truncating_chain};
use proframe_core::{Frame, FrameBounds, LevelBounds, ModuleSpace};
use serde::Serialize;

use crate::error::CliError;
use crate::report::render;
use crate::scenario::{self, chain_spec, frame_spec, load_scenario, matrix_spec, ElementSpec, ScenarioSpec, VectorSpec};

/// Tolerance used when neither the scenario nor `--tol` sets one.
pub const DEFAULT_CLI_TOL: f64 = 1e-9;
/// Minimum bound ratio `C/D` of generated frames.
const GENERATED_MIN_RATIO: f64 = 1e-2;

#[derive(Debug, Parser)]
#[command(name = "proframe", version, about = "Frames of multipliers over inverse chains of matrix algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal bounds, frame and normalization verdicts, sampled inequality check.
    Verify(FrameArgs),
    /// Optimal bounds per level.
    Bounds(FrameArgs),
    /// Frame transform, gram operator and its inverse.
    Transform(FrameArgs),
    /// Reconstruction operator and sampled reconstruction residuals.
    Reconstruct(FrameArgs),
    /// Normalized frame.
    Normalize(FrameArgs),
    /// Canonical dual frame.
    Dual(FrameArgs),
    /// Whether two frames are dual to each other.
    CheckDuality(PairArgs),
    /// Whether the dual of the canonical dual is the frame itself.
    Bidual(FrameArgs),
    /// Engine bounds against classical bounds on commutative levels.
    CrossValidate(FrameArgs),
    /// Seeded random scenario.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Overrides the scenario tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include wall time in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    pub scenario: PathBuf,
    /// Frame to use; optional when the scenario has exactly one.
    #[arg(long)]
    pub frame: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    pub scenario: PathBuf,
    #[arg(long)]
    pub frame1: String,
    #[arg(long)]
    pub frame2: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub levels: usize,
    /// Top-level block sizes.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub blocks: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// A rendered report and whether the checked property holds.
#[derive(Debug)]
pub struct Outcome {
    pub body: String,
    pub holds: bool,
    pub output: Option<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.holds {
            0
        } else {
            1
        }
    }
}

#[derive(Serialize)]
struct Report<'a, T> {
    command: &'a str,
    frames: Vec<&'a str>,
    tolerance: f64,
    holds: bool,
    result: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_seconds: Option<f64>,
}

#[derive(Serialize)]
struct NotAFrame {
    is_frame: bool,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum FrameOr<T> {
    Frame(T),
    NotAFrame(NotAFrame),
}

#[derive(Serialize)]
struct LevelVerdict {
    level: usize,
    lower: f64,
    upper: f64,
    normalized: bool,
}

#[derive(Serialize)]
struct SampleSummary {
    trials: usize,
    seed: u64,
    holds: bool,
}

#[derive(Serialize)]
struct VerifyResult {
    lower: f64,
    upper: f64,
    is_frame: bool,
    normalized: bool,
    levels: Vec<LevelVerdict>,
    membership_bounds: Vec<f64>,
    sampled_order_check: SampleSummary,
}

#[derive(Serialize)]
struct BoundsResult {
    lower: f64,
    upper: f64,
    is_frame: bool,
    levels: Vec<LevelBounds>,
}

type MatrixSpec = Vec<Vec<ElementSpec>>;

#[derive(Serialize)]
struct TransformResult {
    lower: f64,
    upper: f64,
    theta: MatrixSpec,
    gram: MatrixSpec,
    inverse_gram: MatrixSpec,
}

#[derive(Serialize)]
struct ReconstructResult {
    trials: usize,
    seed: u64,
    reconstruction_operator: MatrixSpec,
    max_direct_residual: f64,
    max_dual_residual: f64,
    direct_exact: bool,
    dual_exact: bool,
}

#[derive(Serialize)]
struct NormalizeResult {
    lower: f64,
    upper: f64,
    normalized: bool,
    frame: Vec<VectorSpec>,
}

#[derive(Serialize)]
struct LevelResidual {
    level: usize,
    residual: f64,
}

#[derive(Serialize)]
struct DualResult {
    lower: f64,
    upper: f64,
    residuals: Vec<LevelResidual>,
    dual: bool,
    frame: Vec<VectorSpec>,
}

#[derive(Serialize)]
struct DualityResult {
    residuals: Vec<LevelResidual>,
    max_residual: f64,
    dual: bool,
}

struct Context {
    start: Instant,
    timing: bool,
    output: Option<PathBuf>,
}

impl Context {
    fn new(common: &CommonArgs) -> Self {
        Context { start: Instant::now(), timing: common.timing, output: common.output.clone() }
    }

    fn finish<T: Serialize>(self, command: &str, frames: Vec<&str>, tolerance: f64, holds: bool, result: T) -> Outcome {
        let wall_time_seconds = self.timing.then(|| self.start.elapsed().as_secs_f64());
        let report = Report { command, frames, tolerance, holds, result, wall_time_seconds };
        Outcome { body: render(&report), holds, output: self.output }
    }
}

fn tolerance(common: &CommonArgs, scenario: &scenario::Scenario) -> Result<f64, CliError> {
    let tol = common.tol.or(scenario.tolerance).unwrap_or(DEFAULT_CLI_TOL);
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::Usage("--tol must be positive and finite".into()))
    }
}

fn residuals(values: Vec<f64>) -> Vec<LevelResidual> {
    values.into_iter().enumerate().map(|(i, residual)| LevelResidual { level: i + 1, residual }).collect()
}

fn not_a_frame<T>(bounds: &FrameBounds) -> (FrameOr<T>, bool) {
    (FrameOr::NotAFrame(NotAFrame { is_frame: false, lower: bounds.lower, upper: bounds.upper }), false)
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Verify(a) => single(a, "verify", verify),
        Command::Bounds(a) => single(a, "bounds", bounds),
        Command::Transform(a) => single(a, "transform", transform),
        Command::Reconstruct(a) => single(a, "reconstruct", reconstruct),
        Command::Normalize(a) => single(a, "normalize", normalize),
        Command::Dual(a) => single(a, "dual", dual),
        Command::Bidual(a) => single(a, "bidual", bidual),
        Command::CrossValidate(a) => single(a, "cross-validate", cross),
        Command::CheckDuality(a) => check_duality(a),
        Command::Gen(a) => generate(a),
    }
}

fn single<T: Serialize>(
    args: &FrameArgs,
    command: &str,
    op: impl FnOnce(&Frame, f64, &CommonArgs) -> Result<(T, bool), CliError>,
) -> Result<Outcome, CliError> {
    let ctx = Context::new(&args.common);
    let scenario = load_scenario(&args.scenario)?;
    let tol = tolerance(&args.common, &scenario)?;
    let (name, frame) = scenario.frame(args.frame.as_deref())?;
    let (result, holds) = op(frame, tol, &args.common)?;
    Ok(ctx.finish(command, vec![name], tol, holds, result))
}

fn verify(frame: &Frame, tol: f64, common: &CommonArgs) -> Result<(VerifyResult, bool), CliError> {
    let b = frame.optimal_bounds();
    let levels = b
        .per_level
        .iter()
        .map(|l| LevelVerdict { level: l.level, lower: l.lower, upper: l.upper, normalized: b.level_is_normalized(l.level, tol) })
        .collect();
    let sampled = sampled_order_check(frame, &b, common.trials, common.seed);
    let holds = b.is_frame() && sampled;
    let result = VerifyResult {
        lower: b.lower,
        upper: b.upper,
        is_frame: b.is_frame(),
        normalized: b.is_normalized(tol),
        levels,
        membership_bounds: frame.membership_bounds(),
        sampled_order_check: SampleSummary { trials: common.trials.max(1), seed: common.seed, holds: sampled },
    };
    Ok((result, holds))
}

fn bounds(frame: &Frame, _tol: f64, _common: &CommonArgs) -> Result<(BoundsResult, bool), CliError> {
    let b = frame.optimal_bounds();
    let is_frame = b.is_frame();
    Ok((BoundsResult { lower: b.lower, upper: b.upper, is_frame, levels: b.per_level }, is_frame))
}

fn transform(frame: &Frame, _tol: f64, _common: &CommonArgs) -> Result<(FrameOr<TransformResult>, bool), CliError> {
    let b = frame.optimal_bounds();
    if !b.is_frame() {
        return Ok(not_a_frame(&b));
    }
    let bundle = frame.transform()?;
    let result = TransformResult {
        lower: b.lower,
        upper: b.upper,
        theta: matrix_spec(bundle.theta.matrix()),
        gram: matrix_spec(bundle.gram.matrix()),
        inverse_gram: matrix_spec(bundle.inv_gram.matrix()),
    };
    Ok((FrameOr::Frame(result), true))
}

fn reconstruct(frame: &Frame, tol: f64, common: &CommonArgs) -> Result<(FrameOr<ReconstructResult>, bool), CliError> {
    let b = frame.optimal_bounds();
    if !b.is_frame() {
        return Ok(not_a_frame(&b));
    }
    let s = frame.reconstruction_operator()?;
    let dual = frame.canonical_dual()?;
    let mut rng = seeded_rng(common.seed);
    let (mut direct, mut mixed) = (0.0_f64, 0.0_f64);
    let trials = common.trials.max(1);
    for _ in 0..trials {
        let xi = random_module_element(frame.space(), &mut rng);
        let scale = 1.0 + xi.bounded_norm();
        direct = direct.max(frame.reconstruct(&xi)?.sub(&xi)?.bounded_norm() / scale);
        mixed = mixed.max(frame.mixed_reconstruct(&dual, &xi)?.sub(&xi)?.bounded_norm() / scale);
    }
    let result = ReconstructResult {
        trials,
        seed: common.seed,
        reconstruction_operator: matrix_spec(s.matrix()),
        max_direct_residual: direct,
        max_dual_residual: mixed,
        direct_exact: direct <= tol,
        dual_exact: mixed <= tol,
    };
    Ok((FrameOr::Frame(result), mixed <= tol))
}

fn normalize(frame: &Frame, tol: f64, _common: &CommonArgs) -> Result<(FrameOr<NormalizeResult>, bool), CliError> {
    let b = frame.optimal_bounds();
    if !b.is_frame() {
        return Ok(not_a_frame(&b));
    }
    let n = frame.normalize()?;
    let nb = n.optimal_bounds();
    let normalized = nb.is_normalized(tol);
    let result = NormalizeResult { lower: nb.lower, upper: nb.upper, normalized, frame: frame_spec(&n) };
    Ok((FrameOr::Frame(result), normalized))
}

fn dual(frame: &Frame, tol: f64, _common: &CommonArgs) -> Result<(FrameOr<DualResult>, bool), CliError> {
    let b = frame.optimal_bounds();
    if !b.is_frame() {
        return Ok(not_a_frame(&b));
    }
    let d = frame.canonical_dual()?;
    let db = d.optimal_bounds();
    let values = duality_residuals(frame, &d)?;
    let is_dual = values.iter().all(|&r| r <= tol);
    let result = DualResult { lower: db.lower, upper: db.upper, residuals: residuals(values), dual: is_dual, frame: frame_spec(&d) };
    Ok((FrameOr::Frame(result), is_dual))
}

fn bidual(frame: &Frame, tol: f64, _common: &CommonArgs) -> Result<(FrameOr<BidualReport>, bool), CliError> {
    let b = frame.optimal_bounds();
    if !b.is_frame() {
        return Ok(not_a_frame(&b));
    }
    let report = bidual_report(frame, tol)?;
    let holds = report.holds;
    Ok((FrameOr::Frame(report), holds))
}

fn cross(frame: &Frame, _tol: f64, _common: &CommonArgs) -> Result<(CrossValidationReport, bool), CliError> {
    let report = cross_validate(frame)?;
    let agrees = report.agrees;
    Ok((report, agrees))
}

fn check_duality(args: &PairArgs) -> Result<Outcome, CliError> {
    let ctx = Context::new(&args.common);
    let scenario = load_scenario(&args.scenario)?;
    let tol = tolerance(&args.common, &scenario)?;
    let (n1, f1) = scenario.frame(Some(&args.frame1))?;
    let (n2, f2) = scenario.frame(Some(&args.frame2))?;
    let values = duality_residuals(f1, f2)?;
    let max_residual = values.iter().cloned().fold(0.0, f64::max);
    let is_dual = max_residual <= tol;
    let result = DualityResult { residuals: residuals(values), max_residual, dual: is_dual };
    Ok(ctx.finish("check-duality", vec![n1, n2], tol, is_dual, result))
}

fn generate(args: &GenArgs) -> Result<Outcome, CliError> {
    if args.levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    if args.blocks.is_empty() || args.blocks.contains(&0) {
        return Err(CliError::Usage("--blocks must list positive sizes".into()));
    }
    if args.rank == 0 || args.count < args.rank {
        return Err(CliError::Usage("need --rank >= 1 and --count >= --rank".into()));
    }
    let chain = Arc::new(truncating_chain(args.levels, &args.blocks)?);
    let space = Arc::new(ModuleSpace::free(Arc::clone(&chain), args.rank)?);
    let mut rng = seeded_rng(args.seed);
    let frame = random_frame(&space, args.count, GENERATED_MIN_RATIO, &mut rng);
    let spec = ScenarioSpec {
        algebra: chain_spec(&chain),
        module: scenario::ModuleSpec { rank: args.rank, projection: None },
        frames: [("f".to_string(), frame_spec(&frame))].into_iter().collect(),
        tolerances: None,
    };
    Ok(Outcome { body: render(&spec), holds: true, output: args.output.clone() })
}
