//! Closed-form and numeric predictors for where information-criterion model
//! selection flips between a structured model and plain noise: frequency
//! crossovers for exponential decay, the critical sample count, the SHO
//! noise-tolerance boundary, and the critical embedding dimension under
//! three data-budget constraints.

use crate::error::{Error, Result};

/// Which published form of a crossover expression to evaluate.
///
/// `MainText` and `Appendix` differ only in the power of the initial
/// amplitude (`x0²` vs `x0`); `ExactNumeric` solves the underlying
/// selection-boundary equation by bracketing bisection instead of using an
/// asymptotic closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    MainText,
    Appendix,
    ExactNumeric,
}

impl Variant {
    /// Stable label used in CLI output and CSV files.
    pub fn label(self) -> &'static str {
        match self {
            Variant::MainText => "main-text",
            Variant::Appendix => "appendix",
            Variant::ExactNumeric => "exact-numeric",
        }
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "main-text" => Ok(Variant::MainText),
            "appendix" => Ok(Variant::Appendix),
            "exact-numeric" => Ok(Variant::ExactNumeric),
            other => Err(Error::InvalidParameter(format!(
                "unknown variant {other:?}; expected main-text, appendix, or exact-numeric"
            ))),
        }
    }
}

/// A predicted model-selection crossover with enough metadata to print or
/// compare against a Monte Carlo estimate.
///
/// `in_regime` records whether the asymptotic expansion behind a closed-form
/// value is trusted at these inputs (factor-of-10 margin on the expansion
/// parameter); numeric solutions always set it unless the operation defines
/// its own sampling-regime condition.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverPrediction {
    /// What boundary this is, e.g. "lower-frequency" or "dimension-case3".
    pub kind: &'static str,
    /// The predicted crossover location (a frequency, sample count,
    /// noise-to-amplitude ratio, or dimension count).
    pub value: f64,
    pub variant: Variant,
    /// Named inputs the prediction was evaluated at, for reporting.
    pub inputs: Vec<(&'static str, f64)>,
    pub in_regime: bool,
}

impl CrossoverPrediction {
    fn build(
        kind: &'static str,
        value: f64,
        variant: Variant,
        inputs: Vec<(&'static str, f64)>,
        in_regime: bool,
    ) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{kind} crossover evaluated to {value}, which is not a usable boundary"
            )));
        }
        Ok(CrossoverPrediction { kind, value, variant, inputs, in_regime })
    }
}

fn ensure_positive(op: &str, pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in pairs {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{op}: {name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(())
}

fn ensure_nonnegative(op: &str, pairs: &[(&str, f64)]) -> Result<()> {
    for &(name, v) in pairs {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{op}: {name} must be nonnegative and finite, got {v}"
            )));
        }
    }
    Ok(())
}

/// Number of scan points for bracketing roots on a logarithmic grid.
const GRID_POINTS: usize = 200;
/// Relative interval width at which bisection stops.
const BISECT_REL_TOL: f64 = 1e-13;
/// Asymptotic expansions are trusted when their expansion parameter carries
/// at least this factor-of-10 margin.
const REGIME_MARGIN: f64 = 10.0;

/// Shrinks a sign-changing bracket `[lo, hi]` by bisection. `flo` is the
/// already-computed value at `lo`.
fn bisect(h: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECT_REL_TOL * mid.abs() {
            return mid;
        }
        let fm = h(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All roots of `h` bracketed by sign changes on a `GRID_POINTS`-point
/// logarithmic grid over `[lo, hi]`, in increasing order. Derivative-free
/// and deterministic; grid points where `h` is exactly zero count as roots.
fn roots_on_log_grid(h: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let step = (lhi - llo) / (GRID_POINTS - 1) as f64;
    let mut roots = Vec::new();
    let mut prev_x = lo;
    let mut prev_f = h(lo);
    for i in 1..GRID_POINTS {
        let x = if i == GRID_POINTS - 1 { hi } else { (llo + step * i as f64).exp() };
        let fx = h(x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f.is_finite() && fx.is_finite() && fx != 0.0 && (prev_f > 0.0) != (fx > 0.0)
        {
            roots.push(bisect(h, prev_x, x, prev_f));
        }
        prev_x = x;
        prev_f = fx;
    }
    if prev_f == 0.0 {
        roots.push(prev_x);
    }
    roots
}

/// Residual power a least-squares decay fit removes relative to a constant
/// fit, in expectation over noise realizations: `M·x0²·Var_j[e^{-jλ/f}]`
/// with the variance taken over the sample indices `j = 0..M-1`.
///
/// Evaluated through the pairwise identity
/// `Var = (1/M²) Σ_{d=1}^{M-1} expm1(-ad)² · expm1(-2a(M-d)) / expm1(-2a)`
/// (`a = λ/f`), whose terms are all positive, so no cancellation occurs at
/// any frequency.
pub fn delta_rss_decay(x0: f64, lambda: f64, f: f64, m: usize) -> Result<f64> {
    ensure_positive("delta_rss_decay", &[("lambda", lambda), ("f", f)])?;
    if !x0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta_rss_decay: x0 must be finite, got {x0}"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "delta_rss_decay: need at least 2 samples, got {m}"
        )));
    }
    let a = lambda / f;
    let denom = (-2.0 * a).exp_m1();
    let mut sum = 0.0;
    for d in 1..m {
        let t = (-a * d as f64).exp_m1();
        let w = (-2.0 * a * (m - d) as f64).exp_m1();
        sum += t * t * (w / denom);
    }
    Ok(x0 * x0 * sum / m as f64)
}

/// `delta_rss_decay` continued to real-valued sample counts via the
/// geometric partial sums `S_p = expm1(-p·a·m)/expm1(-p·a)`:
/// `ΔRSS = x0²(S₂ - S₁²/m)`. Coincides with the index-variance sum at
/// integer `m`; used when solving for a critical sample count.
fn delta_rss_decay_real_m(x0: f64, a: f64, m: f64) -> f64 {
    let s1 = (-a * m).exp_m1() / (-a).exp_m1();
    let s2 = (-2.0 * a * m).exp_m1() / (-2.0 * a).exp_m1();
    x0 * x0 * (s2 - s1 * s1 / m)
}

/// Maclaurin coefficients of `g(α)/α²`; exact rationals of the closed form
/// below, through total order `α^14`.
const G_SERIES: [f64; 13] = [
    1.0 / 12.0,
    -1.0 / 12.0,
    17.0 / 360.0,
    -7.0 / 360.0,
    43.0 / 6720.0,
    -107.0 / 60480.0,
    769.0 / 1_814_400.0,
    -163.0 / 1_814_400.0,
    4097.0 / 239_500_800.0,
    -709.0 / 239_500_800.0,
    6827.0 / 14_529_715_200.0,
    -15019.0 / 217_945_728_000.0,
    19661.0 / 2_092_278_988_800.0,
];

/// Below this argument the truncated series is exact to well under 1e-13
/// relative, while the closed form has already lost digits to cancellation.
const G_SERIES_CUTOFF: f64 = 0.25;

/// Normalized variance of a continuously observed exponential decay,
/// `g(α) = (1 - e^{-2α})/(2α) - ((1 - e^{-α})/α)²`, where `α` is the decay
/// rate times the observation window. The signal variance of a decay from
/// amplitude `x0` is `S = x0²·g(α)`.
///
/// The two closed-form terms agree to `O(α²)` as `α → 0`, so their f64
/// difference is catastrophically cancelled for small arguments; below
/// `α = 1/4` the value comes from the Maclaurin series instead, keeping
/// full precision over the whole domain (the two branches agree to ~1e-13
/// at the seam).
pub fn g_alpha(alpha: f64) -> Result<f64> {
    ensure_positive("g_alpha", &[("alpha", alpha)])?;
    if alpha <= G_SERIES_CUTOFF {
        let mut p = 0.0;
        for &c in G_SERIES.iter().rev() {
            p = p * alpha + c;
        }
        Ok(alpha * alpha * p)
    } else {
        let ratio = (-alpha).exp_m1() / alpha;
        Ok((-2.0 * alpha).exp_m1() / (-2.0 * alpha) - ratio * ratio)
    }
}

/// Lower crossover frequency `8λσ²/x0²`: below it, so few samples land on
/// the transient that the two extra decay parameters cost more than the
/// removed residual power. Noiseless data (`σ = 0`) give 0 — the decay
/// model is then justified at any sampling frequency.
///
/// The main-text and appendix derivations agree on this expression, so the
/// operation takes no variant argument.
pub fn fc1(lambda: f64, sigma: f64, x0: f64) -> Result<CrossoverPrediction> {
    ensure_positive("fc1", &[("lambda", lambda), ("x0", x0)])?;
    ensure_nonnegative("fc1", &[("sigma", sigma)])?;
    let value = 8.0 * lambda * sigma * sigma / (x0 * x0);
    CrossoverPrediction::build(
        "lower-frequency",
        value,
        Variant::MainText,
        vec![("lambda", lambda), ("sigma", sigma), ("x0", x0)],
        true,
    )
}

const FOUR_SQRT3: f64 = 6.928_203_230_275_509;

/// Upper crossover frequency for a decay sampled `m` times: past it the
/// observation window is so short that the transient no longer separates
/// from noise.
///
/// `MainText` evaluates `M^{3/2}λx0²/(4√3σ)`, `Appendix` the same with `x0`
/// to the first power, and `ExactNumeric` solves the linearized selection
/// boundary `ΔRSS(f) = 4σ²` with the exact finite-sum `ΔRSS`, returning the
/// largest root. Closed forms are flagged out-of-regime when the expansion
/// parameter `λM/f_c` exceeds 0.1.
pub fn fc2(m: usize, lambda: f64, x0: f64, sigma: f64, variant: Variant) -> Result<CrossoverPrediction> {
    ensure_positive("fc2", &[("lambda", lambda), ("x0", x0), ("sigma", sigma)])?;
    if m < 2 {
        return Err(Error::InvalidParameter(format!("fc2: need at least 2 samples, got {m}")));
    }
    let mf = m as f64;
    let inputs = vec![("m", mf), ("lambda", lambda), ("x0", x0), ("sigma", sigma)];
    let (value, in_regime) = match variant {
        Variant::MainText | Variant::Appendix => {
            let amp = if variant == Variant::MainText { x0 * x0 } else { x0 };
            let value = mf.powf(1.5) * lambda * amp / (FOUR_SQRT3 * sigma);
            (value, lambda * mf / value <= 1.0 / REGIME_MARGIN)
        }
        Variant::ExactNumeric => {
            let threshold = 4.0 * sigma * sigma;
            let h = |f: f64| {
                delta_rss_decay(x0, lambda, f, m).expect("inputs validated") - threshold
            };
            let roots = roots_on_log_grid(&h, lambda * mf * 1e-5, lambda * mf * 1e5);
            let value = *roots.last().ok_or(Error::NoRoot)?;
            (value, true)
        }
    };
    CrossoverPrediction::build("upper-frequency", value, variant, inputs, in_regime)
}

/// Critical sample count at fixed sampling frequency: the fewest samples at
/// which the decay model beats noise. Inverts `fc2` for the closed
/// variants, `M_c = (4√3σf/(λ·amp))^{2/3}`; `ExactNumeric` solves
/// `ΔRSS(M) = 4σ²` in a real-valued `M` (the exact `ΔRSS` is increasing in
/// `M`, so the boundary is the first root).
pub fn mc_critical(sigma: f64, f: f64, lambda: f64, x0: f64, variant: Variant) -> Result<CrossoverPrediction> {
    ensure_positive(
        "mc_critical",
        &[("sigma", sigma), ("f", f), ("lambda", lambda), ("x0", x0)],
    )?;
    let inputs = vec![("sigma", sigma), ("f", f), ("lambda", lambda), ("x0", x0)];
    let (value, in_regime) = match variant {
        Variant::MainText | Variant::Appendix => {
            let amp = if variant == Variant::MainText { x0 * x0 } else { x0 };
            let value = (FOUR_SQRT3 * sigma * f / (lambda * amp)).powf(2.0 / 3.0);
            (value, lambda * value / f <= 1.0 / REGIME_MARGIN)
        }
        Variant::ExactNumeric => {
            let a = lambda / f;
            let threshold = 4.0 * sigma * sigma;
            let h = |m: f64| delta_rss_decay_real_m(x0, a, m) - threshold;
            let roots = roots_on_log_grid(&h, 2.0, 1e9);
            let value = *roots.first().ok_or(Error::NoRoot)?;
            (value, true)
        }
    };
    CrossoverPrediction::build("critical-M", value, variant, inputs, in_regime)
}

/// Noise-to-amplitude ratio `√(t_max·f/8)` above which a sampled harmonic
/// oscillation is no longer preferred over noise. Flagged out-of-regime
/// when the record holds fewer than ~10 samples (`f·t_max < 10`), where the
/// continuum approximation behind the formula breaks down.
pub fn sho_noise_crit(f: f64, t_max: f64) -> Result<CrossoverPrediction> {
    ensure_positive("sho_noise_crit", &[("f", f), ("t_max", t_max)])?;
    let value = (t_max * f / 8.0).sqrt();
    CrossoverPrediction::build(
        "sho-noise",
        value,
        Variant::Appendix,
        vec![("f", f), ("t_max", t_max)],
        f * t_max >= 10.0,
    )
}

/// Expected AIC difference (structured minus noise) for `n` pooled decay
/// dimensions of `m` samples each with per-dimension signal variance `s`:
/// `2 - n·m·ln(1 + s/σ²)`. Negative values mean the decay model wins.
/// Real-valued `n` and `m` so crossover equations can be solved
/// continuously.
pub fn delta_aic_dimension(n: f64, m: f64, s: f64, sigma: f64) -> Result<f64> {
    ensure_positive("delta_aic_dimension", &[("n", n), ("m", m), ("sigma", sigma)])?;
    ensure_nonnegative("delta_aic_dimension", &[("s", s)])?;
    Ok(2.0 - n * m * (s / (sigma * sigma)).ln_1p())
}

/// Critical dimension count when each dimension contributes a fixed `m`
/// samples: `N_c = 2/[m·ln(1 + S/σ²)]` with `S = x0²·g(λ·m·Δt)`. Exact for
/// the pooled-AIC model, so always in regime.
pub fn n_crit_case1(m: usize, dt: f64, lambda: f64, x0: f64, sigma: f64) -> Result<CrossoverPrediction> {
    ensure_positive(
        "n_crit_case1",
        &[("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)],
    )?;
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "n_crit_case1: need at least 2 samples per dimension, got {m}"
        )));
    }
    let mf = m as f64;
    let s = x0 * x0 * g_alpha(lambda * mf * dt)?;
    let value = 2.0 / (mf * (s / (sigma * sigma)).ln_1p());
    CrossoverPrediction::build(
        "dimension-case1",
        value,
        Variant::Appendix,
        vec![("m", mf), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)],
        true,
    )
}

/// Closed-form window of preferred dimension counts under a fixed total
/// sample budget `C = N·M`: between `low = 2/[C·ln(1 + x0²/(2λCΔtσ²))]`
/// (few long records, deep-decay limit of `g`) and
/// `high = λCΔt·x0·√C/(2√6σ)` (many short records, short-window limit).
///
/// Each bound carries its own regime flag from the `g` expansion it uses;
/// the window must be nonempty.
///
/// # Errors
/// `NoWindow` when `low ≥ high` — the decay model is never preferred.
pub fn n_crit_case2(c: f64, dt: f64, lambda: f64, x0: f64, sigma: f64) -> Result<(CrossoverPrediction, CrossoverPrediction)> {
    ensure_positive(
        "n_crit_case2",
        &[("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)],
    )?;
    let inputs = vec![("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)];
    let alpha_total = lambda * c * dt;
    let low = 2.0 / (c * (x0 * x0 / (2.0 * alpha_total * sigma * sigma)).ln_1p());
    let high = alpha_total * x0 * c.sqrt() / (2.0 * 6f64.sqrt() * sigma);
    if !(low < high) {
        return Err(Error::NoWindow);
    }
    let low_pred = CrossoverPrediction::build(
        "dimension-case2-low",
        low,
        Variant::Appendix,
        inputs.clone(),
        alpha_total / low >= REGIME_MARGIN,
    )?;
    let high_pred = CrossoverPrediction::build(
        "dimension-case2-high",
        high,
        Variant::Appendix,
        inputs,
        alpha_total / high <= 1.0 / REGIME_MARGIN,
    )?;
    Ok((low_pred, high_pred))
}

/// Numeric counterpart of `n_crit_case2`: the first and last roots of
/// `2 - C·ln(1 + x0²·g(λCΔt/N)/σ²)` in `N`, bracketed on a 200-point
/// logarithmic grid over `[1e-3, 1e6]` and refined by bisection.
///
/// # Errors
/// `NoWindow` when no root exists in the scanned range.
pub fn n_crit_case2_exact(c: f64, dt: f64, lambda: f64, x0: f64, sigma: f64) -> Result<(CrossoverPrediction, CrossoverPrediction)> {
    ensure_positive(
        "n_crit_case2_exact",
        &[("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)],
    )?;
    let inputs = vec![("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)];
    let alpha_total = lambda * c * dt;
    let h = |n: f64| {
        let g = g_alpha(alpha_total / n).expect("positive by construction");
        2.0 - c * (x0 * x0 * g / (sigma * sigma)).ln_1p()
    };
    let roots = roots_on_log_grid(&h, 1e-3, 1e6);
    let (&first, &last) = match (roots.first(), roots.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(Error::NoWindow),
    };
    let low = CrossoverPrediction::build(
        "dimension-case2-low",
        first,
        Variant::ExactNumeric,
        inputs.clone(),
        true,
    )?;
    let high = CrossoverPrediction::build(
        "dimension-case2-high",
        last,
        Variant::ExactNumeric,
        inputs,
        true,
    )?;
    Ok((low, high))
}

/// Critical dimension count when samples per dimension grow with the
/// count, `M = C·N`: solves the implicit equation
/// `N = √(2/[C·ln(1 + x0²·g(λCNΔt)/σ²)])` by damped fixed-point iteration
/// seeded at `N = 1` (relative tolerance 1e-10), falling back to bisection
/// of `2 - CN²·ln(1 + x0²·g(λCNΔt)/σ²)` over `N ∈ [1e-3, 1e6]` if the
/// iteration fails to settle.
///
/// # Errors
/// `NoRoot` when neither route locates a solution.
pub fn n_crit_case3(c: f64, dt: f64, lambda: f64, x0: f64, sigma: f64) -> Result<CrossoverPrediction> {
    ensure_positive(
        "n_crit_case3",
        &[("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)],
    )?;
    let inputs = vec![("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)];
    let rate = lambda * c * dt;
    let log_snr = |n: f64| -> Option<f64> {
        let g = g_alpha(rate * n).ok()?;
        let l = (x0 * x0 * g / (sigma * sigma)).ln_1p();
        (l > 0.0).then_some(l)
    };

    let mut n = 1.0_f64;
    let mut settled = false;
    for _ in 0..500 {
        let Some(l) = log_snr(n) else { break };
        let next = (2.0 / (c * l)).sqrt();
        if !next.is_finite() {
            break;
        }
        let damped = 0.5 * (n + next);
        if (damped - n).abs() <= 1e-10 * damped {
            n = damped;
            settled = true;
            break;
        }
        n = damped;
    }
    if !settled {
        let h = |n: f64| match log_snr(n) {
            Some(l) => 2.0 - c * n * n * l,
            None => f64::NAN,
        };
        let roots = roots_on_log_grid(&h, 1e-3, 1e6);
        n = *roots.first().ok_or(Error::NoRoot)?;
    }
    CrossoverPrediction::build("dimension-case3", n, Variant::ExactNumeric, inputs, true)
}

/// How the per-dimension record length is tied to the dimension count in a
/// multi-dimensional decay experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DimensionCase {
    /// Every dimension contributes the same `C` samples regardless of `N`.
    FixedM,
    /// The total budget is fixed: `M·N = C`, so records shrink as `1/N`.
    FixedMn,
    /// Records grow with the count: `M/N = C`.
    FixedMOverN,
}

impl DimensionCase {
    /// Stable label used in CLI output and CSV files.
    pub fn label(self) -> &'static str {
        match self {
            DimensionCase::FixedM => "fixed-M",
            DimensionCase::FixedMn => "fixed-MN",
            DimensionCase::FixedMOverN => "fixed-M-over-N",
        }
    }
}

impl std::fmt::Display for DimensionCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A multi-dimensional decay experiment: `n` independent dimensions, each a
/// decay from amplitude `x0` at rate `lambda` sampled every `dt`, observed
/// in Gaussian noise of scale `sigma`, with record lengths tied to the
/// dimension count through `case` and the constraint constant `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionScenario {
    pub case: DimensionCase,
    /// Constraint constant: `M` itself for `FixedM`, the total budget `N·M`
    /// for `FixedMn`, and the ratio `M/N` for `FixedMOverN`.
    pub c: f64,
    pub dt: f64,
    pub lambda: f64,
    pub x0: f64,
    pub sigma: f64,
    /// Inclusive range of dimension counts to scan.
    pub n_range: (usize, usize),
}

impl DimensionScenario {
    pub fn new(
        case: DimensionCase,
        c: f64,
        dt: f64,
        lambda: f64,
        x0: f64,
        sigma: f64,
        n_range: (usize, usize),
    ) -> Result<Self> {
        ensure_positive(
            "DimensionScenario",
            &[("c", c), ("dt", dt), ("lambda", lambda), ("x0", x0), ("sigma", sigma)],
        )?;
        if n_range.0 < 1 || n_range.0 > n_range.1 {
            return Err(Error::InvalidParameter(format!(
                "DimensionScenario: dimension range must satisfy 1 <= low <= high, got {n_range:?}"
            )));
        }
        Ok(DimensionScenario { case, c, dt, lambda, x0, sigma, n_range })
    }

    /// Samples per dimension at dimension count `n`: the constraint solved
    /// for `M`, rounded to the nearest integer and clamped to at least 2 so
    /// every record supports a variance estimate.
    pub fn samples_per_dim(&self, n: usize) -> usize {
        let m = match self.case {
            DimensionCase::FixedM => self.c,
            DimensionCase::FixedMn => self.c / n as f64,
            DimensionCase::FixedMOverN => self.c * n as f64,
        };
        (m.round() as usize).max(2)
    }

    /// The theoretical crossover(s) for this constraint: one boundary for
    /// the fixed-record cases, and for the fixed-budget case the closed
    /// low/high pair followed by their numeric counterparts.
    pub fn predictions(&self) -> Result<Vec<CrossoverPrediction>> {
        match self.case {
            DimensionCase::FixedM => Ok(vec![n_crit_case1(
                self.samples_per_dim(1),
                self.dt,
                self.lambda,
                self.x0,
                self.sigma,
            )?]),
            DimensionCase::FixedMn => {
                let (low, high) = n_crit_case2(self.c, self.dt, self.lambda, self.x0, self.sigma)?;
                let (low_exact, high_exact) =
                    n_crit_case2_exact(self.c, self.dt, self.lambda, self.x0, self.sigma)?;
                Ok(vec![low, high, low_exact, high_exact])
            }
            DimensionCase::FixedMOverN => {
                Ok(vec![n_crit_case3(self.c, self.dt, self.lambda, self.x0, self.sigma)?])
            }
        }
    }
}
