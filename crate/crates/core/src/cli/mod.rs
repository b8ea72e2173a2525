//! Command-line front end.
//!
//! Exit codes: 0 success, 1 replay checksum mismatch, 2 usage, 3 I/O,
//! 4 model-contract violation. A violated Bell inequality is a successful run.
//!
//! Every subcommand accepts `--out PATH`; the result is then written to `PATH`
//! together with a `PATH.manifest.json` sidecar that records the arguments and
//! a SHA-256 checksum of the output. `replay` re-runs a manifest and compares
//! checksums.

pub mod output;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bell::{violation_scan_with, BellTriple};
use crate::error::Error;
use crate::experiment::{
    bell_experiment, estimate_correlation, run_experiment, simulate_correlation, BellExperimentConfig,
    ExperimentConfig, PairSummary, SettingsPolicy, Source, TrialOrder,
};
use crate::furry::{compare, furry_mixture};
use crate::lhv::{lhv_bell_check, lhv_correlation_chunked, BuiltinModel, LhvModel};
use crate::measure::{joint_correlation, run_sequential, single_particle_correlation};
use crate::qstate::{singlet, spin_eigenstate, tensor_product, Direction, QubitKet, TwoQubitKet, C64};
use crate::rng::Stream;
use crate::separation::{no_signaling_check, no_signaling_check_mc};

use output::{manifest_path, sha256_hex, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MODEL: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "spinlab", version, about = "Spin-singlet correlation laboratory")]
#[command(args_conflicts_with_subcommands = true, allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Analytic (and optionally sampled) correlation ⟨(â·σ)⊗(b̂·σ)⟩.
    Correlate(CorrelateArgs),
    /// Bell inequality margins on a θ grid in the symmetric geometry (CSV).
    BellScan(BellScanArgs),
    /// Hidden variable model correlation, optionally Bell-checked on random triples.
    LhvRun(LhvRunArgs),
    /// Quantum versus product-mixture correlations and their difference.
    FurryCompare(FurryCompareArgs),
    /// Local marginals across remote settings.
    NosignalCheck(NosignalArgs),
    /// Seeded Monte Carlo run producing trial records (CSV) and pair summaries.
    EprRun(EprRunArgs),
    /// Double Stern-Gerlach sequence statistics.
    SgSequential(SgArgs),
    /// Re-run a manifest and verify the output checksum.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputArgs {
    /// Write the result here (plus a manifest sidecar) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StateArgs {
    /// singlet | product-up-down | product-down-up | schmidt:W | custom-ket
    #[arg(long, default_value = "singlet")]
    pub state: String,
    /// Amplitudes for custom-ket: 4 reals or 8 numbers (re,im pairs), ordered ↑↑,↑↓,↓↑,↓↓.
    #[arg(long)]
    pub ket: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CorrelateArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Axis for particle 1 as θ,φ in radians.
    #[arg(long, value_parser = parse_axis)]
    pub axis_a: Direction,
    /// Axis for particle 2 as θ,φ in radians.
    #[arg(long, value_parser = parse_axis)]
    pub axis_b: Direction,
    /// Also estimate by Monte Carlo with this many trials.
    #[arg(long)]
    pub mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OrderArg::Simultaneous)]
    pub order: OrderArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationArg {
    /// Singlet correlation −cos θ.
    Singlet,
    /// Single-particle correlation cos θ.
    SingleParticle,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BellScanArgs {
    #[arg(long)]
    pub theta_min: f64,
    #[arg(long)]
    pub theta_max: f64,
    #[arg(long)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = CorrelationArg::Singlet)]
    pub correlation: CorrelationArg,
    /// Negate the single-particle correlation before evaluating the inequality.
    #[arg(long)]
    pub sign_flip: bool,
    #[arg(long, required = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LhvRunArgs {
    #[arg(long, default_value = "sign")]
    pub model: String,
    /// Angle between the axes: â = ẑ, b̂ at θ in the φ = 0 plane.
    #[arg(long, conflicts_with_all = ["axis_a", "axis_b"])]
    pub theta: Option<f64>,
    #[arg(long, value_parser = parse_axis, requires = "axis_b")]
    pub axis_a: Option<Direction>,
    #[arg(long, value_parser = parse_axis, requires = "axis_a")]
    pub axis_b: Option<Direction>,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also Bell-check the model on this many random triples (n trials per pair).
    #[arg(long)]
    pub bell_triples: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FurryCompareArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_parser = parse_axis, required_unless_present = "pairs")]
    pub axis_a: Option<Direction>,
    #[arg(long, value_parser = parse_axis, required_unless_present = "pairs")]
    pub axis_b: Option<Direction>,
    /// Compare on this many random axis pairs instead (CSV output).
    #[arg(long, conflicts_with_all = ["axis_a", "axis_b"])]
    pub pairs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct NosignalArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, value_parser = parse_axis)]
    pub local_axis: Direction,
    #[arg(long, value_parser = parse_axis, num_args = 1.., required = true)]
    pub remote_axes: Vec<Direction>,
    /// Sample each marginal with this many trials instead of computing it.
    #[arg(long)]
    pub mc: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceArg {
    Quantum,
    Lhv,
    Furry,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum OrderArg {
    #[value(name = "simultaneous")]
    Simultaneous,
    #[value(name = "A_first")]
    AFirst,
    #[value(name = "B_first")]
    BFirst,
}

impl From<OrderArg> for TrialOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Simultaneous => TrialOrder::Simultaneous,
            OrderArg::AFirst => TrialOrder::AFirst,
            OrderArg::BFirst => TrialOrder::BFirst,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EprRunArgs {
    #[arg(long, value_enum, default_value_t = SourceArg::Quantum)]
    pub source: SourceArg,
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value = "sign")]
    pub model: String,
    #[arg(long, value_parser = parse_axis)]
    pub axis_a: Option<Direction>,
    #[arg(long, value_parser = parse_axis)]
    pub axis_b: Option<Direction>,
    /// Per-trial setting choice among pairs written θa,φa:θb,φb.
    #[arg(long, value_parser = parse_pair, num_args = 1.., conflicts_with_all = ["axis_a", "axis_b", "bell_theta"])]
    pub settings: Vec<(Direction, Direction)>,
    /// Run a Bell test in the symmetric geometry at this θ instead (n trials per pair).
    #[arg(long, conflicts_with_all = ["axis_a", "axis_b"])]
    pub bell_theta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = OrderArg::Simultaneous)]
    pub order: OrderArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SgArgs {
    /// up-z | down-z | up-x | θ,φ (the +1 eigenstate along that axis)
    #[arg(long, default_value = "up-z")]
    pub input: String,
    /// Second apparatus axis θ,φ.
    #[arg(long, value_parser = parse_axis)]
    pub axis: Direction,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Also write the regenerated output here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    Model(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Model(_) => EXIT_MODEL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io { path, source } => write!(f, "I/O error on {}: {source}", path.display()),
            CliError::Model(m) => write!(f, "model contract violation: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ModelContract { .. } | Error::InvalidCorrelation { .. } => CliError::Model(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_error(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}")))
        .collect()
}

/// `θ,φ` in radians.
pub fn parse_axis(s: &str) -> Result<Direction, String> {
    match parse_floats(s)?.as_slice() {
        [theta, phi] => Direction::new(*theta, *phi).map_err(|e| e.to_string()),
        _ => Err(format!("expected θ,φ in radians, got '{s}'")),
    }
}

/// `θa,φa:θb,φb`.
pub fn parse_pair(s: &str) -> Result<(Direction, Direction), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected θa,φa:θb,φb, got '{s}'"))?;
    Ok((parse_axis(a)?, parse_axis(b)?))
}

pub fn parse_state(args: &StateArgs) -> CliResult<TwoQubitKet> {
    let up = QubitKet::up();
    let down = QubitKet::down();
    match args.state.as_str() {
        "singlet" => Ok(singlet()),
        "product" | "product-up-down" => Ok(tensor_product(&up, &down)),
        "product-down-up" => Ok(tensor_product(&down, &up)),
        "custom-ket" => {
            let raw = args.ket.as_deref().ok_or_else(|| usage("custom-ket needs --ket"))?;
            let v = parse_floats(raw).map_err(usage)?;
            let amps: [C64; 4] = match v.len() {
                4 => [0, 1, 2, 3].map(|i| C64::new(v[i], 0.0)),
                8 => [0, 1, 2, 3].map(|i| C64::new(v[2 * i], v[2 * i + 1])),
                n => return Err(usage(format!("--ket needs 4 or 8 numbers, got {n}"))),
            };
            Ok(TwoQubitKet::new(amps)?)
        }
        other => match other.strip_prefix("schmidt:") {
            Some(w) => {
                let w: f64 = w.parse().map_err(|e| usage(format!("schmidt weight '{w}': {e}")))?;
                if !(0.0..=1.0).contains(&w) {
                    return Err(usage(format!("schmidt weight must lie in [0, 1], got {w}")));
                }
                Ok(TwoQubitKet::from_real([w.sqrt(), 0.0, 0.0, (1.0 - w).sqrt()])?)
            }
            None => Err(usage(format!("unknown state '{other}'"))),
        },
    }
}

fn parse_input_ket(s: &str) -> CliResult<QubitKet> {
    match s {
        "up-z" => Ok(QubitKet::up()),
        "down-z" => Ok(QubitKet::down()),
        "up-x" => Ok(spin_eigenstate(&Direction::x(), 1)),
        other => Ok(spin_eigenstate(&parse_axis(other).map_err(usage)?, 1)),
    }
}

/// Result of a subcommand: the output file body and an optional stdout
/// summary shown when the body goes to a file.
pub struct Rendered {
    pub body: Vec<u8>,
    pub summary: Option<String>,
    pub seed: Option<u64>,
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s.into_bytes()
}

fn json_rendered<T: Serialize>(value: &T, seed: Option<u64>) -> Rendered {
    Rendered {
        body: json_bytes(value),
        summary: None,
        seed,
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Correlate(_) => "correlate",
            Command::BellScan(_) => "bell-scan",
            Command::LhvRun(_) => "lhv-run",
            Command::FurryCompare(_) => "furry-compare",
            Command::NosignalCheck(_) => "nosignal-check",
            Command::EprRun(_) => "epr-run",
            Command::SgSequential(_) => "sg-sequential",
            Command::Replay(_) => "replay",
        }
    }

    pub fn out(&self) -> Option<&Path> {
        match self {
            Command::Correlate(a) => a.output.out.as_deref(),
            Command::BellScan(a) => a.out.as_deref(),
            Command::LhvRun(a) => a.output.out.as_deref(),
            Command::FurryCompare(a) => a.output.out.as_deref(),
            Command::NosignalCheck(a) => a.output.out.as_deref(),
            Command::EprRun(a) => a.output.out.as_deref(),
            Command::SgSequential(a) => a.output.out.as_deref(),
            Command::Replay(a) => a.out.as_deref(),
        }
    }

    fn set_out(&mut self, path: Option<PathBuf>) {
        match self {
            Command::Correlate(a) => a.output.out = path,
            Command::BellScan(a) => a.out = path,
            Command::LhvRun(a) => a.output.out = path,
            Command::FurryCompare(a) => a.output.out = path,
            Command::NosignalCheck(a) => a.output.out = path,
            Command::EprRun(a) => a.output.out = path,
            Command::SgSequential(a) => a.output.out = path,
            Command::Replay(a) => a.out = path,
        }
    }

    /// Runs the command and renders its output without touching the filesystem.
    pub fn render(&self) -> CliResult<Rendered> {
        match self {
            Command::Correlate(a) => correlate(a),
            Command::BellScan(a) => bell_scan(a),
            Command::LhvRun(a) => lhv_run(a),
            Command::FurryCompare(a) => furry_compare(a),
            Command::NosignalCheck(a) => nosignal_check(a),
            Command::EprRun(a) => epr_run(a),
            Command::SgSequential(a) => sg_sequential(a),
            Command::Replay(_) => Err(usage("replay cannot be rendered")),
        }
    }
}

fn correlate(a: &CorrelateArgs) -> CliResult<Rendered> {
    let psi = parse_state(&a.state)?;
    let analytic = joint_correlation(&psi, &a.axis_a, &a.axis_b);
    let value = match a.mc {
        None => json!({ "analytic": analytic }),
        Some(n) => {
            let e = simulate_correlation(&Source::Quantum(psi), &a.axis_a, &a.axis_b, n, a.seed, a.order.into())?;
            json!({ "analytic": analytic, "mc": { "mean": e.mean, "stderr": e.stderr, "n": e.n } })
        }
    };
    Ok(json_rendered(&value, a.mc.map(|_| a.seed)))
}

fn bell_scan(a: &BellScanArgs) -> CliResult<Rendered> {
    let flip = if a.sign_flip { -1.0 } else { 1.0 };
    let scan = match a.correlation {
        CorrelationArg::Singlet => {
            if a.sign_flip {
                return Err(usage("--sign-flip applies to --correlation single-particle"));
            }
            violation_scan_with(crate::bell::singlet_correlation, a.theta_min, a.theta_max, a.steps)?
        }
        CorrelationArg::SingleParticle => violation_scan_with(
            |x: &Direction, y: &Direction| flip * single_particle_correlation(x, y),
            a.theta_min,
            a.theta_max,
            a.steps,
        )?,
    };
    let summary = json!({
        "points": scan.points.len(),
        "violated": scan.violation_count(),
        "violated_interval": scan.violated_interval().map(|(lo, hi)| [lo, hi]),
    });
    Ok(Rendered {
        body: output::scan_csv(&scan).into_bytes(),
        summary: Some(serde_json::to_string_pretty(&summary).expect("json")),
        seed: None,
    })
}

fn lhv_run(a: &LhvRunArgs) -> CliResult<Rendered> {
    let model = BuiltinModel::by_name(&a.model)?;
    let (axis_a, axis_b) = match (a.theta, a.axis_a, a.axis_b) {
        (Some(theta), _, _) => (Direction::z(), Direction::in_xz_plane(theta)?),
        (None, Some(x), Some(y)) => (x, y),
        _ => (Direction::z(), Direction::z()),
    };
    let e = lhv_correlation_chunked(&model, &axis_a, &axis_b, a.n, a.seed)?;
    let mut value = json!({
        "model": model.name(),
        "axis_a": axis_a,
        "axis_b": axis_b,
        "mean": e.mean,
        "stderr": e.stderr,
        "n": e.n,
        "quantum": joint_correlation(&singlet(), &axis_a, &axis_b),
    });
    if let Some(k) = a.bell_triples {
        let mut stream = Stream::new(a.seed);
        let triples: Vec<BellTriple> = (0..k).map(|_| BellTriple::random(&mut stream)).collect();
        let checks = lhv_bell_check(&model, &triples, a.n, &mut stream)?;
        let violations = checks.iter().filter(|c| c.report.violated).count();
        let worst = checks
            .iter()
            .map(|c| c.report.margin)
            .fold(f64::INFINITY, f64::min);
        value["bell_check"] = json!({
            "triples": k,
            "n_per_pair": a.n,
            "violations": violations,
            "min_margin": if worst.is_finite() { Some(worst) } else { None },
        });
    }
    Ok(json_rendered(&value, Some(a.seed)))
}

fn furry_compare(a: &FurryCompareArgs) -> CliResult<Rendered> {
    let psi = parse_state(&a.state)?;
    let mix = furry_mixture(&psi);
    match (a.pairs, a.axis_a, a.axis_b) {
        (Some(k), _, _) => {
            let mut stream = Stream::new(a.seed);
            let rows: Vec<_> = (0..k)
                .map(|_| {
                    let x = Direction::random(&mut stream);
                    let y = Direction::random(&mut stream);
                    compare(&psi, &mix, &x, &y)
                })
                .collect();
            let max_delta = rows.iter().map(|r| r.delta.abs()).fold(0.0, f64::max);
            let summary = json!({ "pairs": k, "basis": mix.basis_label(), "max_abs_delta": max_delta });
            Ok(Rendered {
                body: output::comparison_csv(&rows).into_bytes(),
                summary: Some(serde_json::to_string_pretty(&summary).expect("json")),
                seed: Some(a.seed),
            })
        }
        (None, Some(x), Some(y)) => {
            let c = compare(&psi, &mix, &x, &y);
            let value = json!({
                "qm": c.qm,
                "furry": c.furry,
                "delta": c.delta,
                "basis": mix.basis_label(),
                "branches": mix.branches(),
            });
            Ok(json_rendered(&value, None))
        }
        _ => Err(usage("furry-compare needs --axis-a and --axis-b, or --pairs")),
    }
}

fn nosignal_check(a: &NosignalArgs) -> CliResult<Rendered> {
    let psi = parse_state(&a.state)?;
    let report = match a.mc {
        None => no_signaling_check(&psi, &a.local_axis, &a.remote_axes)?,
        Some(n) => no_signaling_check_mc(&psi, &a.local_axis, &a.remote_axes, n, &mut Stream::new(a.seed))?,
    };
    Ok(json_rendered(&report, a.mc.map(|_| a.seed)))
}

fn epr_source(a: &EprRunArgs) -> CliResult<Source> {
    Ok(match a.source {
        SourceArg::Quantum => Source::Quantum(parse_state(&a.state)?),
        SourceArg::Lhv => {
            BuiltinModel::by_name(&a.model)?;
            Source::Lhv(a.model.clone())
        }
        SourceArg::Furry => Source::Furry(furry_mixture(&parse_state(&a.state)?)),
    })
}

fn epr_run(a: &EprRunArgs) -> CliResult<Rendered> {
    let source = epr_source(a)?;
    if let Some(theta) = a.bell_theta {
        let report = bell_experiment(&BellExperimentConfig {
            source,
            triple: BellTriple::symmetric(theta)?,
            n_per_pair: a.n,
            seed: a.seed,
            order: a.order.into(),
        })?;
        return Ok(json_rendered(&report, Some(a.seed)));
    }
    let settings = if !a.settings.is_empty() {
        SettingsPolicy::PerTrial(a.settings.clone())
    } else {
        SettingsPolicy::Fixed(
            a.axis_a.unwrap_or_else(Direction::z),
            a.axis_b.unwrap_or_else(Direction::z),
        )
    };
    let config = ExperimentConfig {
        source,
        settings: settings.clone(),
        n_trials: a.n,
        seed: a.seed,
        order: a.order.into(),
    };
    let records = run_experiment(&config)?;
    let pairs = match settings {
        SettingsPolicy::Fixed(x, y) => vec![(x, y)],
        SettingsPolicy::PerTrial(list) => list,
    };
    let mut summaries = Vec::new();
    for (x, y) in &pairs {
        match estimate_correlation(&records, (x, y)) {
            Ok(e) => summaries.push(PairSummary::new(*x, *y, &e)),
            Err(Error::EmptySelection) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Rendered {
        body: output::records_csv(&records).into_bytes(),
        summary: Some(serde_json::to_string_pretty(&summaries).expect("json")),
        seed: Some(a.seed),
    })
}

fn sg_sequential(a: &SgArgs) -> CliResult<Rendered> {
    let input = parse_input_ket(&a.input)?;
    let summary = run_sequential(&input, &a.axis, a.n, &mut Stream::new(a.seed))?;
    let value = json!({
        "input": input,
        "axis": a.axis,
        "summary": summary,
        "analytic": {
            "p_enter": input.c_up().norm_sqr(),
            "p_d1": (a.axis.theta() / 2.0).cos().powi(2),
            "correlation": a.axis.theta().cos(),
        },
    });
    Ok(json_rendered(&value, Some(a.seed)))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| io_error(path, e))
}

fn write_with_manifest(command: &Command, args: &[String], out: &Path, rendered: &Rendered) -> CliResult<()> {
    write_file(out, &rendered.body)?;
    let manifest = RunManifest {
        command: command.name().to_string(),
        args: args.to_vec(),
        parameters: serde_json::to_value(command).expect("serializable parameters"),
        seed: rendered.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        output: out.display().to_string(),
        checksum: sha256_hex(&rendered.body),
    };
    write_file(&manifest_path(out), &json_bytes(&manifest))
}

fn replay(r: &ReplayArgs) -> CliResult<(String, bool)> {
    let raw = fs::read(&r.manifest).map_err(|e| io_error(&r.manifest, e))?;
    let manifest: RunManifest =
        serde_json::from_slice(&raw).map_err(|e| usage(format!("bad manifest {}: {e}", r.manifest.display())))?;
    let argv = std::iter::once("spinlab".to_string()).chain(manifest.args.iter().cloned());
    let mut cli = Cli::try_parse_from(argv).map_err(|e| usage(format!("manifest arguments: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(usage("a manifest cannot replay another replay"));
    }
    cli.command.set_out(None);
    let rendered = cli.command.render()?;
    let checksum = sha256_hex(&rendered.body);
    if let Some(out) = &r.out {
        write_file(out, &rendered.body)?;
    }
    let matched = checksum == manifest.checksum;
    let report = json!({
        "command": manifest.command,
        "expected": manifest.checksum,
        "checksum": checksum,
        "match": matched,
    });
    Ok((serde_json::to_string_pretty(&report).expect("json"), matched))
}

/// Runs the CLI on `args` (without the program name), printing to stdout and
/// stderr, and returns the process exit code.
pub fn run(args: &[String]) -> i32 {
    let argv = std::iter::once("spinlab".to_string()).chain(args.iter().cloned());
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command, args) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("spinlab: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: &Command, args: &[String]) -> CliResult<i32> {
    if let Command::Replay(r) = command {
        let (report, matched) = replay(r)?;
        println!("{report}");
        return Ok(if matched { EXIT_OK } else { EXIT_MISMATCH });
    }
    let rendered = command.render()?;
    match command.out() {
        Some(out) => {
            write_with_manifest(command, args, out, &rendered)?;
            if let Some(s) = &rendered.summary {
                println!("{s}");
            }
        }
        None => match &rendered.summary {
            Some(s) if matches!(command, Command::EprRun(_)) => println!("{s}"),
            _ => print!("{}", String::from_utf8_lossy(&rendered.body)),
        },
    }
    Ok(EXIT_OK)
}

pub fn main_exit_code() -> i32 {
    let args: Vec<String> = std::env::args().skip(1).collect();
    run(&args)
}
