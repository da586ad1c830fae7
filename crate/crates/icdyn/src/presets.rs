//! Canned reproduction experiments: the frequency-sweep, noise-tolerance,
//! and dimension-sweep scenarios with their reference parameters, theory
//! comparisons, and pass/fail gates.
//!
//! Each preset returns a [`FigureReport`] bundling the raw sweep data (for
//! CSV emission), the empirical-vs-theory crossover table, and named checks
//! with their tolerances. The CLI `reproduce` subcommand serializes reports
//! and exits nonzero when any check fails; the acceptance test suite runs
//! the same presets and asserts each check individually.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::estimation::ModelKind;
use crate::montecarlo::{
    self, find_crossover, fit_scaling_exponent, log_grid, noise_tolerance_curve, Motif, Scenario,
    SweepAxis, SweepResult, TolerancePoint,
};
use crate::rng::absorb;
use crate::signal_models::{
    estimate_lyapunov, ChaosScale, DecayParams, LorenzParams, NoiseParams, ShoParams,
};
use crate::theory::{self, DimensionCase, DimensionScenario, Variant};

/// Trials per grid point for the frequency-sweep reproduction.
pub const FIG1_TRIALS: usize = 200;
/// Trials per noise-ratio point for the oscillator tolerance curves.
pub const FIG2_TRIALS: usize = 200;
/// Trials per dimension point for the fixed-record case.
pub const FIG3_CASE1_TRIALS: usize = 200;
/// Trials per dimension point for the fixed-budget and growing-record cases,
/// whose upper boundary moves only ~2% per grid step and needs the tighter
/// binomial error.
pub const FIG3_CASE23_TRIALS: usize = 500;
/// Trials per noise-ratio point for the chaos tolerance curve.
pub const CHAOS_TRIALS: usize = 100;

/// Reference value and band for the largest Lorenz Lyapunov exponent.
pub const LYAPUNOV_REFERENCE: f64 = 0.906;
pub const LYAPUNOV_TOLERANCE: f64 = 0.05;

/// One named pass/fail gate with a human-readable account of the numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        Check { name, pass, detail }
    }
}

/// One row of the empirical-vs-theory crossover table.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverRow {
    pub kind: &'static str,
    pub empirical_value: f64,
    pub theory_value: f64,
    pub variant: &'static str,
    pub relative_gap: f64,
}

impl CrossoverRow {
    fn new(kind: &'static str, empirical: f64, theory: f64, variant: &'static str) -> Self {
        CrossoverRow {
            kind,
            empirical_value: empirical,
            theory_value: theory,
            variant,
            relative_gap: empirical / theory - 1.0,
        }
    }
}

/// Everything a reproduction run produces: named sweeps and tolerance curves
/// for CSV emission, the crossover table, scalar summaries (fitted
/// exponents, measured ratios), and the pass/fail checks.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureReport {
    pub name: &'static str,
    pub sweeps: Vec<(String, SweepResult)>,
    pub curves: Vec<(String, Vec<TolerancePoint>)>,
    pub crossovers: Vec<CrossoverRow>,
    pub scalars: Vec<(&'static str, f64)>,
    pub checks: Vec<Check>,
}

impl FigureReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// 26-point frequency grid for the decay sweep: 25 log-spaced points on
/// [0.1, 1e5] plus f = 50, which the regime-shape check probes but the log
/// grid does not contain.
fn fig1_grid() -> Result<Vec<f64>> {
    let mut fs = log_grid(0.1, 1e5, 25)?;
    let pos = fs.partition_point(|&f| f < 50.0);
    fs.insert(pos, 50.0);
    Ok(fs)
}

/// All 50% crossings of the motif's selection curve, empty when there are
/// none (the checks then fail with an explanation, rather than erroring).
fn crossings_of(r: &SweepResult, model: ModelKind) -> Result<Vec<f64>> {
    match find_crossover(r, model) {
        Ok(xs) => Ok(xs),
        Err(Error::NoCrossing) => Ok(Vec::new()),
        Err(e) => Err(e),
    }
}

fn selection_at(r: &SweepResult, axis_value: f64, model: ModelKind) -> f64 {
    r.points
        .iter()
        .find(|p| p.axis_value == axis_value)
        .and_then(|p| p.selection.iter().find(|(k, _)| *k == model))
        .map(|(_, v)| *v)
        .unwrap_or(f64::NAN)
}

/// Frequency sweep of the decay motif at (x0, lambda, mu, sigma, M) =
/// (1, 0.1, 0, 2.5, 2000): locates both selection boundaries and gates them
/// against the closed-form and exact-numeric predictions.
pub fn fig1(seed: u64, trials: usize) -> Result<FigureReport> {
    let motif = Motif::Decay {
        params: DecayParams::new(1.0, 0.1)?,
        noise: NoiseParams::new(0.0, 2.5)?,
        m: 2000,
    };
    let s = Scenario::new(motif, SweepAxis::Frequency(fig1_grid()?), trials, seed)?;
    let r = montecarlo::sweep(&s)?;

    let lower_theory = theory::fc1(0.1, 2.5, 1.0)?;
    let upper_exact = theory::fc2(2000, 0.1, 1.0, 2.5, Variant::ExactNumeric)?;
    let upper_appendix = theory::fc2(2000, 0.1, 1.0, 2.5, Variant::Appendix)?;
    let upper_main = theory::fc2(2000, 0.1, 1.0, 2.5, Variant::MainText)?;

    let crossings = crossings_of(&r, ModelKind::Decay)?;
    let lower = crossings.first().copied();
    let upper = if crossings.len() >= 2 { crossings.last().copied() } else { None };

    let mut crossovers = Vec::new();
    if let Some(x) = lower {
        crossovers.push(CrossoverRow::new(
            lower_theory.kind,
            x,
            lower_theory.value,
            lower_theory.variant.label(),
        ));
    }
    if let Some(x) = upper {
        for p in [&upper_main, &upper_appendix, &upper_exact] {
            crossovers.push(CrossoverRow::new(p.kind, x, p.value, p.variant.label()));
        }
    }

    let lower_check = match lower {
        Some(x) => Check::new(
            "lower-crossover",
            x / lower_theory.value <= 2.0 && x / lower_theory.value >= 0.5,
            format!(
                "noise-to-decay boundary at f = {x:.3}, predicted {:.3} (factor {:.3}, gate: within 2x)",
                lower_theory.value,
                x / lower_theory.value
            ),
        ),
        None => Check::new("lower-crossover", false, "selection curve never crosses 50%".into()),
    };

    let p_lo = selection_at(&r, 0.1, ModelKind::Noise);
    let p_hi = selection_at(&r, 1e5, ModelKind::Noise);
    let p_mid = selection_at(&r, 50.0, ModelKind::Decay);
    let regime_check = Check::new(
        "regime-shape",
        p_lo >= 0.85 && p_hi >= 0.85 && p_mid >= 0.85,
        format!(
            "noise selected {:.1}% at f = 0.1 and {:.1}% at f = 1e5, decay {:.1}% at f = 50 (gate: each >= 85%)",
            100.0 * p_lo,
            100.0 * p_hi,
            100.0 * p_mid
        ),
    );

    let upper_check = match upper {
        Some(x) => {
            let factor = x / upper_exact.value;
            Check::new(
                "upper-crossover",
                (300.0..=4000.0).contains(&x) && (1.0 / 1.5..=1.5).contains(&factor),
                format!(
                    "decay-to-noise boundary at f = {x:.1}; exact-numeric {:.1} (factor {factor:.3}, \
                     gate: in [300, 4000] and within 1.5x); closed forms predict {:.1}, a factor \
                     {:.2} below the ~2000 the original figure annotates (reported, not gated)",
                    upper_exact.value,
                    upper_appendix.value,
                    2000.0 / upper_appendix.value
                ),
            )
        }
        None => Check::new("upper-crossover", false, "no second 50% crossing found".into()),
    };

    Ok(FigureReport {
        name: "fig1",
        sweeps: vec![("fig1_sweep".into(), r)],
        curves: Vec::new(),
        crossovers,
        scalars: Vec::new(),
        checks: vec![lower_check, regime_check, upper_check],
    })
}

/// Two-standard-error half-width of the fitted log-log slope, from the
/// regression residuals of the measured points.
fn slope_half_width(curve: &[TolerancePoint], alpha: f64, intercept: f64) -> f64 {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|p| p.critical_ratio.map(|r| (p.f.ln(), r.ln())))
        .collect();
    let n = pts.len() as f64;
    let x_mean = pts.iter().map(|(x, _)| x).sum::<f64>() / n;
    let ss_res: f64 = pts.iter().map(|(x, y)| (y - intercept - alpha * x).powi(2)).sum();
    let ss_x: f64 = pts.iter().map(|(x, _)| (x - x_mean).powi(2)).sum();
    2.0 * (ss_res / (n - 2.0) / ss_x).sqrt()
}

/// Builds the scaling-exponent check shared by the oscillator and chaos
/// tolerance curves.
fn exponent_check(
    name: &'static str,
    curve: &[TolerancePoint],
    band: (f64, f64),
) -> (Option<(f64, f64, f64)>, Check) {
    let flagged = curve.iter().filter(|p| p.critical_ratio.is_none()).count();
    match fit_scaling_exponent(curve) {
        Ok((alpha, intercept)) => {
            let half = slope_half_width(curve, alpha, intercept);
            let pass = (band.0..=band.1).contains(&alpha);
            let detail = format!(
                "alpha = {alpha:.4} +- {half:.4} (2 s.e.) over {} frequencies \
                 ({flagged} flagged without a crossing), prefactor {:.4} \
                 (gate: alpha in [{}, {}])",
                curve.len() - flagged,
                intercept.exp(),
                band.0,
                band.1
            );
            (Some((alpha, intercept, half)), Check::new(name, pass, detail))
        }
        Err(e) => (None, Check::new(name, false, format!("scaling fit unavailable: {e}"))),
    }
}

/// Noise-tolerance curve of the unit-amplitude oscillator (omega = 2*pi)
/// over 1000 time units: fits the sqrt(f) law on 6 log-spaced frequencies in
/// [0.1, 10] and gates the f = 0.67 critical ratio against the closed form.
///
/// f = 0.1 samples the oscillator exactly once per 10 periods, so its clean
/// record is constant and the curve flags it; the exponent fit uses the
/// remaining frequencies.
pub fn fig2(seed: u64, trials: usize) -> Result<FigureReport> {
    let base = Scenario::new(
        Motif::Sho { params: ShoParams::new(1.0, TAU, 0.0)?, t_max: 1000.0, f: 1.0 },
        SweepAxis::NoiseRatio(vec![1.0]),
        trials,
        seed,
    )?;

    let mut curve = noise_tolerance_curve(&base, &log_grid(0.1, 10.0, 6)?)?;
    let (scaling, alpha_check) = exponent_check("sqrt-f-exponent", &curve, (0.45, 0.55));

    // Dedicated curve for the marked crossover point; 0.67 lies on no
    // 6-point log grid of [0.1, 10].
    let ratio_point = noise_tolerance_curve(&base, &[0.67])?[0];
    let predicted = theory::sho_noise_crit(0.67, 1000.0)?;
    let ratio_check = match ratio_point.critical_ratio {
        Some(ratio) => Check::new(
            "marked-crossover-ratio",
            (ratio / predicted.value - 1.0).abs() <= 0.25,
            format!(
                "critical sigma/A = {ratio:.3} at f = 0.67, predicted {:.3} (gap {:+.1}%, gate: within 25%)",
                predicted.value,
                100.0 * (ratio / predicted.value - 1.0)
            ),
        ),
        None => Check::new(
            "marked-crossover-ratio",
            false,
            "selection never crosses 50% at f = 0.67".into(),
        ),
    };

    let mut crossovers = Vec::new();
    for p in curve.iter().chain(std::iter::once(&ratio_point)) {
        if let Some(ratio) = p.critical_ratio {
            let pred = theory::sho_noise_crit(p.f, 1000.0)?;
            crossovers.push(CrossoverRow::new(pred.kind, ratio, pred.value, pred.variant.label()));
        }
    }

    let mut scalars = Vec::new();
    if let Some((alpha, intercept, half)) = scaling {
        scalars.push(("alpha", alpha));
        scalars.push(("alpha_half_width", half));
        scalars.push(("intercept", intercept));
    }
    if let Some(ratio) = ratio_point.critical_ratio {
        scalars.push(("critical_ratio_at_0.67", ratio));
    }

    let pos = curve.partition_point(|p| p.f < ratio_point.f);
    curve.insert(pos, ratio_point);

    Ok(FigureReport {
        name: "fig2",
        sweeps: Vec::new(),
        curves: vec![("fig2_tolerance".into(), curve)],
        crossovers,
        scalars,
        checks: vec![alpha_check, ratio_check],
    })
}

/// Dimension grid for the fixed-budget case: unit steps through 9, then
/// 15%-geometric up to 460. The geometric points straddle the region around
/// N ~ 150 where the rounded per-record length jumps between 8 and 9 samples
/// and the selection staircase is steepest, instead of sampling inside it.
fn case2_grid() -> Vec<usize> {
    let mut ns: Vec<usize> = (1..=9).collect();
    let mut x = 10.0f64;
    while x <= 460.0 {
        let n = x.round() as usize;
        if ns.last() != Some(&n) {
            ns.push(n);
        }
        x *= 1.15;
    }
    ns
}

/// One dimension case: sweeps the scenario, pairs each theoretical boundary
/// with the matching empirical crossing, and appends the case's gate.
struct DimensionOutcome {
    sweep: SweepResult,
    crossings: Vec<f64>,
    rows: Vec<CrossoverRow>,
}

fn run_dimension_case(
    scenario: DimensionScenario,
    grid: Vec<usize>,
    trials: usize,
    seed: u64,
) -> Result<DimensionOutcome> {
    let predictions = scenario.predictions()?;
    let s = Scenario::new(
        Motif::DimensionDecay { scenario, noise_mu: 1.0 },
        SweepAxis::Dimension(grid),
        trials,
        seed,
    )?;
    let sweep = montecarlo::sweep(&s)?;
    let crossings = crossings_of(&sweep, ModelKind::Decay)?;
    let mut rows = Vec::new();
    for p in &predictions {
        // The low boundary pairs with the first crossing, the high boundary
        // with the last; single-boundary cases have one crossing for both.
        let empirical = if p.kind.ends_with("-high") {
            if crossings.len() >= 2 { crossings.last().copied() } else { None }
        } else {
            crossings.first().copied()
        };
        if let Some(x) = empirical {
            rows.push(CrossoverRow::new(p.kind, x, p.value, p.variant.label()));
        }
    }
    Ok(DimensionOutcome { sweep, crossings, rows })
}

/// Dimension sweeps of the concatenated decay at x0 = 2 (known), lambda = 1,
/// mu = 1, sigma = 8, dt = 0.1, under all three record-length constraints:
/// fixed records (M = 100), fixed budget (M*N = 1250), growing records
/// (M/N = 10). `trials` overrides every case; the defaults are 200 for the
/// fixed-record case and 500 for the other two.
pub fn fig3(seed: u64, trials: Option<usize>) -> Result<FigureReport> {
    let (dt, lambda, x0, sigma) = (0.1, 1.0, 2.0, 8.0);

    let case1 = run_dimension_case(
        DimensionScenario::new(DimensionCase::FixedM, 100.0, dt, lambda, x0, sigma, (1, 30))?,
        (1..=30).collect(),
        trials.unwrap_or(FIG3_CASE1_TRIALS),
        absorb(seed, 1),
    )?;
    let case2 = run_dimension_case(
        DimensionScenario::new(DimensionCase::FixedMn, 1250.0, dt, lambda, x0, sigma, (1, 460))?,
        case2_grid(),
        trials.unwrap_or(FIG3_CASE23_TRIALS),
        absorb(seed, 2),
    )?;
    let case3 = run_dimension_case(
        DimensionScenario::new(DimensionCase::FixedMOverN, 10.0, dt, lambda, x0, sigma, (1, 30))?,
        (1..=30).collect(),
        trials.unwrap_or(FIG3_CASE23_TRIALS),
        absorb(seed, 3),
    )?;

    let c1 = match case1.crossings.first() {
        Some(&x) => Check::new(
            "case1-boundary",
            (5.0..=11.0).contains(&x),
            format!("fixed records: decay preferred above N = {x:.2} (gate: in [5, 11])"),
        ),
        None => Check::new("case1-boundary", false, "no 50% crossing found".into()),
    };
    let c2 = if case2.crossings.len() >= 2 {
        let (lo, hi) = (case2.crossings[0], *case2.crossings.last().unwrap());
        Check::new(
            "case2-window",
            (4.0..=10.0).contains(&lo) && (150.0..=330.0).contains(&hi),
            format!(
                "fixed budget: decay preferred on N in [{lo:.2}, {hi:.1}] \
                 (gates: lower in [4, 10], upper in [150, 330])"
            ),
        )
    } else {
        Check::new(
            "case2-window",
            false,
            format!("expected two 50% crossings, found {}", case2.crossings.len()),
        )
    };
    let c3 = if case3.crossings.len() == 1 {
        let x = case3.crossings[0];
        Check::new(
            "case3-boundary",
            (4.0..=12.0).contains(&x),
            format!("growing records: decay preferred above N = {x:.2} (gate: in [4, 12])"),
        )
    } else {
        Check::new(
            "case3-boundary",
            false,
            format!("expected a single 50% crossing, found {}", case3.crossings.len()),
        )
    };

    let mut crossovers = case1.rows;
    crossovers.extend(case2.rows);
    crossovers.extend(case3.rows);

    Ok(FigureReport {
        name: "fig3",
        sweeps: vec![
            ("fig3_case1_sweep".into(), case1.sweep),
            ("fig3_case2_sweep".into(), case2.sweep),
            ("fig3_case3_sweep".into(), case3.sweep),
        ],
        curves: Vec::new(),
        crossovers,
        scalars: Vec::new(),
        checks: vec![c1, c2, c3],
    })
}

/// Noise-tolerance curve of the Lorenz x-component over 50 time units at 5
/// log-spaced frequencies in [2, 200]: gates the fitted exponent against the
/// sqrt(f)-law band. The critical ratio has no closed form here, so the
/// gate is property-based (exponent only).
pub fn chaos_exponent(seed: u64, trials: usize) -> Result<FigureReport> {
    let base = Scenario::new(
        Motif::Chaos {
            params: LorenzParams::default(),
            scale: ChaosScale::default(),
            t_max: 50.0,
            f: 1.0,
        },
        SweepAxis::NoiseRatio(vec![1.0]),
        trials,
        seed,
    )?;
    let curve = noise_tolerance_curve(&base, &log_grid(2.0, 200.0, 5)?)?;
    let (scaling, check) = exponent_check("chaos-exponent", &curve, (0.41, 0.61));

    let mut scalars = Vec::new();
    if let Some((alpha, intercept, half)) = scaling {
        scalars.push(("alpha", alpha));
        scalars.push(("alpha_half_width", half));
        scalars.push(("intercept", intercept));
    }

    Ok(FigureReport {
        name: "chaos-exponent",
        sweeps: Vec::new(),
        curves: vec![("chaos_tolerance".into(), curve)],
        crossovers: Vec::new(),
        scalars,
        checks: vec![check],
    })
}

/// Largest Lyapunov exponent of the standard Lorenz system, gated against
/// the reference 0.906 +- 0.05.
pub fn lyapunov_check() -> Result<(f64, Check)> {
    let lam = estimate_lyapunov(&LorenzParams::default(), 1000.0, 0.5)?;
    let gap = (lam - LYAPUNOV_REFERENCE).abs();
    let check = Check::new(
        "lyapunov-exponent",
        gap <= LYAPUNOV_TOLERANCE,
        format!(
            "largest exponent {lam:.4} vs reference {LYAPUNOV_REFERENCE} \
             (|gap| = {gap:.4}, gate: <= {LYAPUNOV_TOLERANCE})"
        ),
    );
    Ok((lam, check))
}
