//! Command-line surface: flag and config-file parsing, sweep and
//! reproduction orchestration, and CSV/manifest emission.
//!
//! Every command resolves its run-level settings from flags, the optional
//! `key = value` config file, and the `ICDYN_SEED` environment variable, in
//! that precedence order, with built-in defaults last. The CLI itself is
//! single-threaded orchestration over the library's parallel sweeps; output
//! files are written atomically (temp file + rename) and are fully
//! determined by (config, seed, code version) — manifests carry no
//! timestamps, so a re-run with the same inputs is byte-identical.
//!
//! Exit codes: 0 success, 1 I/O failure or a failed reproduction gate,
//! 2 invalid or missing parameters (including unknown config keys),
//! 3 a sweep in which more than half the trials at some grid point were
//! invalid.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::error::Error;
use crate::montecarlo::{
    self, Motif, Scenario, SweepAxis, SweepResult, TolerancePoint, TrialFit,
};
use crate::presets::{self, CrossoverRow};
use crate::signal_models::{ChaosScale, DecayParams, LorenzParams, NoiseParams, ShoParams};
use crate::theory::{self, CrossoverPrediction, DimensionCase, DimensionScenario, Variant};

const DEFAULT_SEED: u64 = 42;
const DEFAULT_OUT: &str = "icdyn-out";
/// Keys a config file may set. These are run-level settings only; scenario
/// parameters stay on the command line, where each subcommand documents its
/// own defaults.
const CONFIG_KEYS: [&str; 6] = ["seed", "trials", "out", "variant", "threads", "trial-fit"];

/// Parses the process arguments, runs the requested command, and returns
/// the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            2
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32, CliError> {
    let settings = resolve_settings(&cli.common)?;
    if let Some(n) = settings.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("--threads: {e}")))?;
    }
    match &cli.command {
        Command::Predict { kind } => cmd_predict(kind),
        Command::Sweep { motif } => cmd_sweep(motif, &settings),
        Command::Reproduce { figure } => cmd_reproduce(*figure, &settings),
        Command::Lyapunov => cmd_lyapunov(),
    }
}

#[derive(Debug)]
enum CliError {
    /// Bad flags, config keys, or parameter values: exit 2.
    Usage(String),
    /// Library-level validation failures, which name the offending
    /// parameter: exit 2.
    Domain(Error),
    /// Filesystem failures: exit 1.
    Io(std::io::Error),
}

fn usage(msg: String) -> CliError {
    CliError::Usage(msg)
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "icdyn",
    version,
    about = "Information-criterion model selection for noisy dynamical signals"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Master seed for all pseudo-randomness; default 42, or ICDYN_SEED
    /// when that variable is set.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per grid point (each command documents its own default).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output directory for CSV files and the run manifest
    /// [default: icdyn-out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Featured closed-form variant, echoed in run manifests; predictions
    /// always print every applicable variant [default: appendix].
    #[arg(long, global = true, value_parser = parse_variant)]
    variant: Option<Variant>,
    /// Worker threads: a number, or "auto" for one per core [default: auto].
    #[arg(long, global = true)]
    threads: Option<String>,
    /// How sweep trials fit their candidate models; reproduction presets
    /// pin their own mode [default: known-shape].
    #[arg(long = "trial-fit", global = true, value_parser = parse_trial_fit)]
    trial_fit: Option<TrialFit>,
    /// Flat `key = value` config file; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the theoretical selection boundaries for a scenario.
    Predict {
        #[command(subcommand)]
        kind: PredictKind,
    },
    /// Run a Monte Carlo model-selection sweep and write its CSV artifacts.
    Sweep {
        #[command(subcommand)]
        motif: SweepMotif,
    },
    /// Re-run a reference experiment and gate it against theory.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
    },
    /// Estimate the largest Lyapunov exponent of the chaotic test system
    /// and gate it against the reference value.
    Lyapunov,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Debug)]
enum Figure {
    Fig1,
    Fig2,
    Fig3,
    ChaosExponent,
}

#[derive(Subcommand, Debug)]
enum PredictKind {
    /// Frequency and sample-count boundaries for the exponential decay
    /// (defaults: the reference frequency-sweep parameters).
    Decay {
        /// Initial amplitude.
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        /// Decay rate.
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        /// Noise standard deviation.
        #[arg(long, default_value_t = 2.5)]
        sigma: f64,
        /// Samples per record; adds the upper-frequency boundary rows.
        #[arg(long)]
        m: Option<usize>,
        /// Sampling frequency; adds the critical-sample-count rows.
        #[arg(long)]
        f: Option<f64>,
    },
    /// Critical noise-to-amplitude ratio for the sampled oscillator.
    Sho {
        /// Sampling frequency.
        #[arg(long, default_value_t = 1.0)]
        f: f64,
        /// Observation window length.
        #[arg(long, default_value_t = 1000.0)]
        t_max: f64,
    },
    /// Critical dimension counts for concatenated decay records
    /// (defaults: the reference dimension-sweep parameters).
    Dimension {
        /// Record-length constraint tying samples per record to the count.
        #[arg(value_enum)]
        case: CaseArg,
        /// Constraint constant (M, M*N, or M/N); defaults 100, 1250, 10
        /// per case.
        #[arg(long)]
        c: Option<f64>,
        /// Sample spacing.
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// Decay rate.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Initial amplitude.
        #[arg(long, default_value_t = 2.0)]
        x0: f64,
        /// Noise standard deviation.
        #[arg(long, default_value_t = 8.0)]
        sigma: f64,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum, Debug)]
enum CaseArg {
    Case1,
    Case2,
    Case3,
}

impl CaseArg {
    fn dimension_case(self) -> DimensionCase {
        match self {
            CaseArg::Case1 => DimensionCase::FixedM,
            CaseArg::Case2 => DimensionCase::FixedMn,
            CaseArg::Case3 => DimensionCase::FixedMOverN,
        }
    }

    /// The reference scenario's constant for this constraint.
    fn default_c(self) -> f64 {
        match self {
            CaseArg::Case1 => 100.0,
            CaseArg::Case2 => 1250.0,
            CaseArg::Case3 => 10.0,
        }
    }
}

#[derive(Subcommand, Debug)]
enum SweepMotif {
    /// Exponential decay swept over sampling frequency.
    Decay {
        /// Initial amplitude.
        #[arg(long, default_value_t = 1.0)]
        x0: f64,
        /// Decay rate.
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        /// Noise mean.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// Noise standard deviation.
        #[arg(long, default_value_t = 2.5)]
        sigma: f64,
        /// Samples per record.
        #[arg(long, default_value_t = 2000)]
        m: usize,
        /// Frequency grid: `lo:hi:n` (log-spaced) or comma-separated values.
        #[arg(long, default_value = "0.1:1e5:26")]
        grid: String,
    },
    /// Harmonic oscillation swept over the noise-to-amplitude ratio.
    Sho {
        /// Amplitude.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Angular frequency.
        #[arg(long, default_value_t = std::f64::consts::TAU)]
        omega: f64,
        /// Phase.
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        /// Observation window length.
        #[arg(long, default_value_t = 1000.0)]
        t_max: f64,
        /// Sampling frequency.
        #[arg(long, default_value_t = 1.0)]
        f: f64,
        /// Noise-ratio grid: `lo:hi:n` (log-spaced) or comma-separated.
        #[arg(long, default_value = "1:100:30")]
        grid: String,
    },
    /// Chaotic trajectory (standard parameters) swept over the
    /// noise-to-attractor-scale ratio.
    Chaos {
        /// Observation window length.
        #[arg(long, default_value_t = 50.0)]
        t_max: f64,
        /// Sampling frequency.
        #[arg(long, default_value_t = 20.0)]
        f: f64,
        /// Noise-ratio grid: `lo:hi:n` (log-spaced) or comma-separated.
        #[arg(long, default_value = "0.5:50:30")]
        grid: String,
    },
    /// Concatenated decay records swept over the dimension count.
    Dimension {
        /// Record-length constraint tying samples per record to the count.
        #[arg(value_enum)]
        case: CaseArg,
        /// Constraint constant (M, M*N, or M/N); defaults 100, 1250, 10
        /// per case.
        #[arg(long)]
        c: Option<f64>,
        /// Sample spacing.
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        /// Decay rate.
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
        /// Initial amplitude.
        #[arg(long, default_value_t = 2.0)]
        x0: f64,
        /// Noise mean.
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        /// Noise standard deviation.
        #[arg(long, default_value_t = 8.0)]
        sigma: f64,
        /// Dimension grid: `lo:hi` (unit steps) or comma-separated counts.
        #[arg(long, default_value = "1:30")]
        grid: String,
    },
}

/// Run-level settings after merging flags, config file, environment, and
/// defaults.
#[derive(Debug, Clone, PartialEq)]
struct RunSettings {
    seed: u64,
    trials: Option<usize>,
    out: PathBuf,
    variant: Variant,
    threads: Option<usize>,
    trial_fit: TrialFit,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    match s {
        "main-text" => Ok(Variant::MainText),
        "appendix" => Ok(Variant::Appendix),
        _ => Err(format!("unknown variant {s:?}; choose main-text or appendix")),
    }
}

fn parse_trial_fit(s: &str) -> Result<TrialFit, String> {
    TrialFit::from_str(s).map_err(|e| e.to_string())
}

fn parse_threads(s: &str) -> Result<Option<usize>, CliError> {
    if s == "auto" {
        return Ok(None);
    }
    let n: usize = s
        .trim()
        .parse()
        .map_err(|_| usage(format!("threads {s:?}: expected a positive integer or \"auto\"")))?;
    if n == 0 {
        return Err(usage("threads 0: need at least one worker".into()));
    }
    Ok(Some(n))
}

/// Parses a flat `key = value` config file. Blank lines and `#` comments
/// are skipped, later keys overwrite earlier ones, and any key outside
/// [`CONFIG_KEYS`] is a hard error.
fn parse_config(text: &str, origin: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(usage(format!(
                "config {} line {}: expected key = value, got {line:?}",
                origin.display(),
                i + 1
            )));
        };
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(usage(format!(
                "config {} line {}: unknown key {key:?} (known keys: {})",
                origin.display(),
                i + 1,
                CONFIG_KEYS.join(", ")
            )));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn resolve_settings(common: &CommonArgs) -> Result<RunSettings, CliError> {
    let cfg = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| usage(format!("config {}: {e}", path.display())))?;
            parse_config(&text, path)?
        }
        None => BTreeMap::new(),
    };

    let seed = match (common.seed, cfg.get("seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => v
            .parse()
            .map_err(|_| usage(format!("config seed {v:?} is not an unsigned integer")))?,
        (None, None) => match std::env::var("ICDYN_SEED") {
            Ok(v) => v
                .parse()
                .map_err(|_| usage(format!("ICDYN_SEED {v:?} is not an unsigned integer")))?,
            Err(std::env::VarError::NotPresent) => DEFAULT_SEED,
            Err(e) => return Err(usage(format!("ICDYN_SEED: {e}"))),
        },
    };
    let trials = match (common.trials, cfg.get("trials")) {
        (Some(t), _) => Some(t),
        (None, Some(v)) => Some(
            v.parse()
                .map_err(|_| usage(format!("config trials {v:?} is not an unsigned integer")))?,
        ),
        (None, None) => None,
    };
    let out = common
        .out
        .clone()
        .or_else(|| cfg.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    let variant = match (common.variant, cfg.get("variant")) {
        (Some(v), _) => v,
        (None, Some(s)) => parse_variant(s).map_err(usage)?,
        (None, None) => Variant::Appendix,
    };
    let threads = match (&common.threads, cfg.get("threads")) {
        (Some(s), _) => parse_threads(s)?,
        (None, Some(s)) => parse_threads(s)?,
        (None, None) => None,
    };
    let trial_fit = match (common.trial_fit, cfg.get("trial-fit")) {
        (Some(t), _) => t,
        (None, Some(s)) => parse_trial_fit(s).map_err(usage)?,
        (None, None) => TrialFit::default(),
    };

    Ok(RunSettings { seed, trials, out, variant, threads, trial_fit })
}

/// `lo:hi:n` -> `n` log-spaced points; otherwise comma-separated values.
fn parse_float_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        3 => {
            let lo = parse_num(parts[0], "grid low endpoint")?;
            let hi = parse_num(parts[1], "grid high endpoint")?;
            let n: usize = parts[2].trim().parse().map_err(|_| {
                usage(format!("grid point count {:?} is not an unsigned integer", parts[2]))
            })?;
            Ok(montecarlo::log_grid(lo, hi, n)?)
        }
        1 => spec.split(',').map(|s| parse_num(s, "grid value")).collect(),
        _ => Err(usage(format!("grid {spec:?}: expected lo:hi:n or v1,v2,..."))),
    }
}

/// `lo:hi` -> unit-step inclusive range; otherwise comma-separated counts.
fn parse_dim_grid(spec: &str) -> Result<Vec<usize>, CliError> {
    let parse_count = |s: &str| -> Result<usize, CliError> {
        s.trim()
            .parse()
            .map_err(|_| usage(format!("dimension count {s:?} is not an unsigned integer")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.len() {
        2 => {
            let lo = parse_count(parts[0])?;
            let hi = parse_count(parts[1])?;
            if lo < 1 || lo > hi {
                return Err(usage(format!("dimension grid {spec:?}: need 1 <= lo <= hi")));
            }
            Ok((lo..=hi).collect())
        }
        1 => spec.split(',').map(parse_count).collect(),
        _ => Err(usage(format!("dimension grid {spec:?}: expected lo:hi or n1,n2,..."))),
    }
}

fn parse_num(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| usage(format!("{what} {s:?} is not a number")))
}

/// Prints the table of every applicable boundary prediction. Exit 0; any
/// invalid or missing parameter surfaces as a named-parameter diagnostic
/// with exit 2.
fn cmd_predict(kind: &PredictKind) -> Result<i32, CliError> {
    let all = [Variant::MainText, Variant::Appendix, Variant::ExactNumeric];
    let mut rows: Vec<CrossoverPrediction> = Vec::new();
    match *kind {
        PredictKind::Decay { x0, lambda, sigma, m, f } => {
            rows.push(theory::fc1(lambda, sigma, x0)?);
            if let Some(m) = m {
                for v in all {
                    rows.push(theory::fc2(m, lambda, x0, sigma, v)?);
                }
            }
            if let Some(f) = f {
                for v in all {
                    rows.push(theory::mc_critical(sigma, f, lambda, x0, v)?);
                }
            }
        }
        PredictKind::Sho { f, t_max } => rows.push(theory::sho_noise_crit(f, t_max)?),
        PredictKind::Dimension { case, c, dt, lambda, x0, sigma } => {
            let scenario = DimensionScenario::new(
                case.dimension_case(),
                c.unwrap_or_else(|| case.default_c()),
                dt,
                lambda,
                x0,
                sigma,
                (1, 1000),
            )?;
            rows.extend(scenario.predictions()?);
        }
    }
    print!("{}", prediction_table(&rows));
    Ok(0)
}

fn prediction_table(rows: &[CrossoverPrediction]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<22} {:<14} {:>14}  {:<10} {}",
        "kind", "variant", "value", "in-regime", "value (full)"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<22} {:<14} {:>14.4}  {:<10} {}",
            r.kind,
            r.variant.label(),
            r.value,
            if r.in_regime { "yes" } else { "no" },
            fmt_f64(r.value)
        );
    }
    out
}

/// Runs one Monte Carlo sweep and writes `<motif>_sweep.csv` plus the run
/// manifest. Exit 3 when more than half the trials at any grid point were
/// invalid (the files are still written for diagnosis).
fn cmd_sweep(motif_args: &SweepMotif, settings: &RunSettings) -> Result<i32, CliError> {
    let (motif, axis, name, scenario_echo) = build_sweep(motif_args)?;
    let trials = settings.trials.unwrap_or(match axis {
        SweepAxis::Dimension(_) => montecarlo::DEFAULT_TRIALS_DIMENSION_SWEEP,
        _ => montecarlo::DEFAULT_TRIALS_SWEEP,
    });
    let grid_policy = motif.grid_policy();
    let scenario =
        Scenario::new(motif, axis, trials, settings.seed)?.with_trial_fit(settings.trial_fit);
    let result = montecarlo::sweep(&scenario)?;

    fs::create_dir_all(&settings.out)?;
    let csv_name = format!("{name}_sweep.csv");
    write_atomic(&settings.out.join(&csv_name), &sweep_csv(&result))?;
    let manifest = json!({
        "command": {"name": "sweep", "motif": name},
        "version": env!("CARGO_PKG_VERSION"),
        "run": run_echo(settings),
        "trials": trials,
        "grid_policy": grid_policy,
        "scenario": scenario_echo,
        "outputs": [csv_name],
    });
    write_atomic(&settings.out.join("manifest.json"), &manifest_text(&manifest))?;
    println!("wrote {csv_name} and manifest.json to {}", settings.out.display());

    let bad: Vec<f64> = result
        .points
        .iter()
        .filter(|p| 2 * p.n_invalid > p.n_trials)
        .map(|p| p.axis_value)
        .collect();
    if !bad.is_empty() {
        eprintln!(
            "error: more than half the trials were invalid at {} of {} grid points (first at {} = {})",
            bad.len(),
            result.points.len(),
            result.axis_name,
            bad[0]
        );
        return Ok(3);
    }
    Ok(0)
}

fn build_sweep(
    args: &SweepMotif,
) -> Result<(Motif, SweepAxis, &'static str, serde_json::Value), CliError> {
    match args {
        SweepMotif::Decay { x0, lambda, mu, sigma, m, grid } => {
            let fs = parse_float_grid(grid)?;
            let echo = json!({
                "x0": x0, "lambda": lambda, "mu": mu, "sigma": sigma, "m": m, "grid": &fs,
            });
            let motif = Motif::Decay {
                params: DecayParams::new(*x0, *lambda)?,
                noise: NoiseParams::new(*mu, *sigma)?,
                m: *m,
            };
            Ok((motif, SweepAxis::Frequency(fs), "decay", echo))
        }
        SweepMotif::Sho { a, omega, phi, t_max, f, grid } => {
            let rs = parse_float_grid(grid)?;
            let echo = json!({
                "a": a, "omega": omega, "phi": phi, "t_max": t_max, "f": f, "grid": &rs,
            });
            let motif =
                Motif::Sho { params: ShoParams::new(*a, *omega, *phi)?, t_max: *t_max, f: *f };
            Ok((motif, SweepAxis::NoiseRatio(rs), "sho", echo))
        }
        SweepMotif::Chaos { t_max, f, grid } => {
            let rs = parse_float_grid(grid)?;
            let echo = json!({
                "system": "lorenz-standard", "t_max": t_max, "f": f, "grid": &rs,
            });
            let motif = Motif::Chaos {
                params: LorenzParams::default(),
                scale: ChaosScale::default(),
                t_max: *t_max,
                f: *f,
            };
            Ok((motif, SweepAxis::NoiseRatio(rs), "chaos", echo))
        }
        SweepMotif::Dimension { case, c, dt, lambda, x0, mu, sigma, grid } => {
            let ns = parse_dim_grid(grid)?;
            let lo = *ns.iter().min().ok_or_else(|| usage("empty dimension grid".into()))?;
            let hi = *ns.iter().max().expect("nonempty");
            let c_val = c.unwrap_or_else(|| case.default_c());
            let scenario = DimensionScenario::new(
                case.dimension_case(),
                c_val,
                *dt,
                *lambda,
                *x0,
                *sigma,
                (lo, hi),
            )?;
            let echo = json!({
                "case": scenario.case.label(), "c": c_val, "dt": dt, "lambda": lambda,
                "x0": x0, "mu": mu, "sigma": sigma, "grid": &ns,
            });
            let motif = Motif::DimensionDecay { scenario, noise_mu: *mu };
            Ok((motif, SweepAxis::Dimension(ns), "dimension", echo))
        }
    }
}

/// Runs a canned reproduction, writes its CSVs, crossover table, and
/// manifest, prints one line per check, and exits 1 if any check failed.
fn cmd_reproduce(figure: Figure, settings: &RunSettings) -> Result<i32, CliError> {
    let report = match figure {
        Figure::Fig1 => {
            presets::fig1(settings.seed, settings.trials.unwrap_or(presets::FIG1_TRIALS))?
        }
        Figure::Fig2 => {
            presets::fig2(settings.seed, settings.trials.unwrap_or(presets::FIG2_TRIALS))?
        }
        Figure::Fig3 => presets::fig3(settings.seed, settings.trials)?,
        Figure::ChaosExponent => {
            presets::chaos_exponent(settings.seed, settings.trials.unwrap_or(presets::CHAOS_TRIALS))?
        }
    };

    fs::create_dir_all(&settings.out)?;
    let mut outputs = Vec::new();
    for (name, sweep) in &report.sweeps {
        let file = format!("{name}.csv");
        write_atomic(&settings.out.join(&file), &sweep_csv(sweep))?;
        outputs.push(file);
    }
    for (name, curve) in &report.curves {
        let file = format!("{name}.csv");
        write_atomic(&settings.out.join(&file), &tolerance_csv(curve))?;
        outputs.push(file);
    }
    if !report.crossovers.is_empty() {
        let file = format!("{}_crossovers.csv", report.name.replace('-', "_"));
        write_atomic(&settings.out.join(&file), &crossover_csv(&report.crossovers))?;
        outputs.push(file);
    }

    let manifest = json!({
        "command": {"name": "reproduce", "figure": report.name},
        "version": env!("CARGO_PKG_VERSION"),
        "run": run_echo(settings),
        "scalars": report.scalars.iter().cloned().collect::<BTreeMap<_, _>>(),
        "checks": report
            .checks
            .iter()
            .map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail}))
            .collect::<Vec<_>>(),
        "outputs": outputs,
    });
    write_atomic(&settings.out.join("manifest.json"), &manifest_text(&manifest))?;

    for c in &report.checks {
        println!(
            "[{}] {}/{}: {}",
            if c.pass { "PASS" } else { "FAIL" },
            report.name,
            c.name,
            c.detail
        );
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_lyapunov() -> Result<i32, CliError> {
    let (lambda, check) = presets::lyapunov_check()?;
    println!("largest Lyapunov exponent: {}", fmt_f64(lambda));
    println!("[{}] {}: {}", if check.pass { "PASS" } else { "FAIL" }, check.name, check.detail);
    Ok(if check.pass { 0 } else { 1 })
}

fn run_echo(settings: &RunSettings) -> serde_json::Value {
    json!({
        "seed": settings.seed,
        "trials": settings.trials,
        "out": settings.out.display().to_string(),
        "variant": settings.variant.label(),
        "threads": settings.threads,
        "trial_fit": settings.trial_fit.label(),
    })
}

/// 17 significant digits, locale-independent: round-trips every f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Long-format sweep table: one row per (grid point, model).
fn sweep_csv(r: &SweepResult) -> String {
    let mut out =
        String::from("axis_name,axis_value,model,mean_aic,selection_proportion,n_trials,n_invalid\n");
    for p in &r.points {
        for ((model, aic), (_, prop)) in p.mean_aic.iter().zip(&p.selection) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.axis_name,
                fmt_f64(p.axis_value),
                model,
                fmt_f64(*aic),
                fmt_f64(*prop),
                p.n_trials,
                p.n_invalid
            );
        }
    }
    out
}

/// Critical noise-ratio curve; frequencies flagged without a crossing leave
/// the ratio field empty.
fn tolerance_csv(points: &[TolerancePoint]) -> String {
    let mut out = String::from("f,critical_ratio\n");
    for p in points {
        let ratio = p.critical_ratio.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(out, "{},{}", fmt_f64(p.f), ratio);
    }
    out
}

fn crossover_csv(rows: &[CrossoverRow]) -> String {
    let mut out = String::from("kind,empirical_value,theory_value,variant,relative_gap\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.kind,
            fmt_f64(r.empirical_value),
            fmt_f64(r.theory_value),
            r.variant,
            fmt_f64(r.relative_gap)
        );
    }
    out
}

fn manifest_text(manifest: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    text
}

/// Writes through a temp file in the same directory and renames into
/// place, so a crash never leaves a half-written artifact.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp_name = path.as_os_str().to_os_string();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}
