//! Maximum-likelihood fits of each candidate model (noise-only, decay, SHO,
//! known-trajectory chaos) under i.i.d. Gaussian observation noise.
//!
//! All fits profile the noise variance analytically: with `sigma2 = RSS/M`
//! (the biased MLE form, never M-1) the negative log-likelihood reduces to
//! `NLL = (M/2) ln(2 pi sigma2) + M/2`, so fitting is RSS minimization.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::signal_models::TimeSeries;

/// Candidate model identity; the tag doubles as the CSV label and the
/// lexicographic tie-break key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModelKind {
    Chaos,
    Decay,
    Noise,
    Sho,
}

impl ModelKind {
    pub fn tag(&self) -> &'static str {
        match self {
            ModelKind::Chaos => "chaos",
            ModelKind::Decay => "decay",
            ModelKind::Noise => "noise",
            ModelKind::Sho => "sho",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// Model-specific parameter estimates.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedParams {
    Noise { mu: f64 },
    Decay { x0: f64, lambda: f64, mu: f64 },
    Sho { a: f64, omega: f64, phi: f64 },
    /// Shape known a priori; only the offset was estimated.
    KnownSignal { mu: f64 },
}

/// Outcome of one model fit on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: ModelKind,
    pub params: FittedParams,
    /// Parameter count charged by the information criteria (includes sigma).
    pub k: usize,
    /// Sample count.
    pub m: usize,
    /// Residual sum of squares at the optimum.
    pub rss: f64,
    /// MLE noise variance `RSS/M`.
    pub sigma2: f64,
    /// Profiled negative log-likelihood.
    pub nll: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Variance floor applied inside the likelihood logarithm only, so exactly
/// clean data still yields a finite (hugely negative) NLL.
const SIGMA2_FLOOR: f64 = 1e-300;

/// Profiled Gaussian NLL for `m` samples with residual sum of squares `rss`.
fn profiled_nll(m: usize, rss: f64) -> f64 {
    let sigma2 = (rss / m as f64).max(SIGMA2_FLOOR);
    0.5 * m as f64 * ((TAU * sigma2).ln() + 1.0)
}

impl FitResult {
    /// Builds a result from an optimized RSS, profiling the noise variance.
    fn from_rss(
        model: ModelKind,
        params: FittedParams,
        k: usize,
        m: usize,
        rss: f64,
        converged: bool,
        iterations: usize,
    ) -> Self {
        FitResult {
            model,
            params,
            k,
            m,
            rss,
            sigma2: rss / m as f64,
            nll: profiled_nll(m, rss),
            converged,
            iterations,
        }
    }

    /// Returns the same fit charged with a different parameter count.
    ///
    /// Sweeps use this to bill a known-shape or known-trajectory evaluation
    /// at the candidate model's nominal complexity (the likelihood is
    /// unchanged; only the criterion penalty moves).
    pub fn with_param_count(mut self, k: usize) -> Self {
        self.k = k;
        self
    }
}

/// Numerically-zero-RSS guard: residuals at the rounding floor of the data
/// scale count as zero, covering constant data whose mean does not round
/// exactly.
fn is_degenerate(rss: f64, scale: f64, m: usize) -> bool {
    rss <= (f64::EPSILON * scale.max(1.0)).powi(2) * m as f64
}

fn value_scale(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Noise-only model: `mu` is the sample mean, `k = 2` for (mu, sigma).
///
/// # Errors
/// `DegenerateVariance` when the residuals are numerically zero (constant
/// data), where the profiled likelihood is unbounded. Sweeps treat such
/// trials as invalid and resample once.
pub fn fit_noise(ts: &TimeSeries) -> Result<FitResult> {
    let m = ts.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!("fit_noise requires m >= 2, got {m}")));
    }
    let mu = ts.values.iter().sum::<f64>() / m as f64;
    let rss = ts.values.iter().map(|v| (v - mu).powi(2)).sum::<f64>();
    if is_degenerate(rss, value_scale(&ts.values), m) {
        return Err(Error::DegenerateVariance { rss });
    }
    Ok(FitResult::from_rss(ModelKind::Noise, FittedParams::Noise { mu }, 2, m, rss, true, 0))
}

/// Residuals against a fully known clean signal with a refitted offset:
/// `r_j = x_j - clean_j - mu_hat`. Charged `k = 2` for (mu, sigma); sweeps
/// re-charge via [`FitResult::with_param_count`] when the candidate's nominal
/// complexity differs.
///
/// # Errors
/// `GridMismatch` when the two series do not share times; `DegenerateVariance`
/// as for [`fit_noise`].
pub fn fit_known_signal(ts: &TimeSeries, clean: &TimeSeries, model: ModelKind) -> Result<FitResult> {
    if ts.times != clean.times {
        return Err(Error::GridMismatch);
    }
    let m = ts.len();
    if m < 2 {
        return Err(Error::InvalidParameter(format!("fit_known_signal requires m >= 2, got {m}")));
    }
    let mu = ts
        .values
        .iter()
        .zip(&clean.values)
        .map(|(x, c)| x - c)
        .sum::<f64>()
        / m as f64;
    let rss = ts
        .values
        .iter()
        .zip(&clean.values)
        .map(|(x, c)| (x - c - mu).powi(2))
        .sum::<f64>();
    if is_degenerate(rss, value_scale(&ts.values), m) {
        return Err(Error::DegenerateVariance { rss });
    }
    Ok(FitResult::from_rss(model, FittedParams::KnownSignal { mu }, 2, m, rss, true, 0))
}

/// Chaos candidate: the clean trajectory is known, only (mu, sigma) are
/// estimated, so the complexity penalty equals the noise model's and
/// selection reduces to likelihood.
pub fn fit_known_chaos(ts: &TimeSeries, clean: &TimeSeries) -> Result<FitResult> {
    fit_known_signal(ts, clean, ModelKind::Chaos)
}

/// Linear least squares for the decay amplitude/offset at a fixed rate:
/// minimizes over (x0, mu) on the basis {exp(-lambda t), 1}, or over mu alone
/// when `x0_known` is supplied. Returns (x0, mu, rss).
fn decay_linear_ls(times: &[f64], values: &[f64], lambda: f64, x0_known: Option<f64>) -> (f64, f64, f64) {
    let m = times.len() as f64;
    let basis: Vec<f64> = times.iter().map(|&t| (-lambda * t).exp()).collect();
    let (x0, mu) = match x0_known {
        Some(x0) => {
            let mu = values.iter().zip(&basis).map(|(y, e)| y - x0 * e).sum::<f64>() / m;
            (x0, mu)
        }
        None => {
            let see: f64 = basis.iter().map(|e| e * e).sum();
            let se: f64 = basis.iter().sum();
            let sy: f64 = values.iter().sum();
            let sey: f64 = values.iter().zip(&basis).map(|(y, e)| y * e).sum();
            let det = see * m - se * se;
            if det.abs() <= 1e-12 * see * m {
                // Basis nearly collinear with the constant (lambda ~ 0):
                // fall back to the nested noise solution.
                (0.0, sy / m)
            } else {
                let x0 = (sey * m - se * sy) / det;
                let mu = (see * sy - se * sey) / det;
                (x0, mu)
            }
        }
    };
    let rss = values
        .iter()
        .zip(&basis)
        .map(|(y, e)| (y - x0 * e - mu).powi(2))
        .sum::<f64>();
    (x0, mu, rss)
}

/// Decay model with the rate fixed at `lambda`: amplitude and offset by exact
/// linear least squares (offset alone when `x0_known` is supplied). Charged
/// the decay model's nominal complexity, `k = 4` (or 3 with x0 known).
pub fn fit_decay_at(ts: &TimeSeries, lambda: f64, x0_known: Option<f64>) -> Result<FitResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    let k = if x0_known.is_some() { 3 } else { 4 };
    let m = ts.len();
    if m < k + 1 {
        return Err(Error::InvalidParameter(format!("fit_decay_at requires m >= {}, got {m}", k + 1)));
    }
    let (x0, mu, rss) = decay_linear_ls(&ts.times, &ts.values, lambda, x0_known);
    Ok(FitResult::from_rss(
        ModelKind::Decay,
        FittedParams::Decay { x0, lambda, mu },
        k,
        m,
        rss,
        true,
        0,
    ))
}

/// Solves the symmetric system `a x = b` (n <= 3) by Gaussian elimination
/// with partial pivoting. Returns None when the pivot collapses.
fn solve_sym(n: usize, a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let mut aug = [[0.0f64; 4]; 3];
    for i in 0..n {
        aug[i][..n].copy_from_slice(&a[i][..n]);
        aug[i][3] = b[i];
    }
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))?;
        if aug[pivot][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot);
        for row in col + 1..n {
            let fac = aug[row][col] / aug[col][col];
            for c in col..=3 {
                if c < n || c == 3 {
                    aug[row][c] -= fac * aug[col][c];
                }
            }
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..n).rev() {
        let mut acc = aug[row][3];
        for c in row + 1..n {
            acc -= aug[row][c] * x[c];
        }
        x[row] = acc / aug[row][row];
    }
    if x[..n].iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

struct LmOutcome {
    x0: f64,
    lambda: f64,
    mu: f64,
    rss: f64,
    converged: bool,
    iterations: usize,
}

/// Damped Gauss-Newton (Levenberg-Marquardt) refinement of the decay model
/// from the given start. Optimizes (x0, ln lambda, mu), or (ln lambda, mu)
/// with x0 known, keeping the rate positive by construction. Converges when
/// the relative RSS change drops below 1e-10 — or when the RSS itself falls
/// to the rounding floor of the data, where further "improvements" only
/// chase noise in the last bits — capped at 200 iterations.
fn lm_refine_decay(
    times: &[f64],
    values: &[f64],
    x0_known: Option<f64>,
    mut x0: f64,
    lambda0: f64,
    mut mu: f64,
) -> LmOutcome {
    const REL_TOL: f64 = 1e-10;
    const MAX_ITER: usize = 200;

    let free_x0 = x0_known.is_none();
    if let Some(v) = x0_known {
        x0 = v;
    }
    let scale = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs())).max(1e-300);
    let rss_floor = (f64::EPSILON * scale) * (f64::EPSILON * scale) * times.len() as f64;
    let n_par = if free_x0 { 3 } else { 2 };
    let mut ell = lambda0.ln();
    let rss_at = |x0: f64, ell: f64, mu: f64| -> f64 {
        let lambda = ell.exp();
        times
            .iter()
            .zip(values)
            .map(|(&t, &y)| (y - x0 * (-lambda * t).exp() - mu).powi(2))
            .sum()
    };
    let mut rss = rss_at(x0, ell, mu);
    let mut nu = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..MAX_ITER {
        iterations += 1;
        let lambda = ell.exp();
        // Normal equations J^T J delta = -J^T r with residual r = y - model.
        // Parameter order: (x0 if free, ell, mu).
        let mut a = [[0.0f64; 3]; 3];
        let mut g = [0.0f64; 3];
        for (&t, &y) in times.iter().zip(values) {
            let e = (-lambda * t).exp();
            let r = y - x0 * e - mu;
            // d r / d theta
            let grad = if free_x0 {
                [-e, x0 * t * lambda * e, -1.0]
            } else {
                [x0 * t * lambda * e, -1.0, 0.0]
            };
            for i in 0..n_par {
                g[i] += grad[i] * r;
                for j in i..n_par {
                    a[i][j] += grad[i] * grad[j];
                }
            }
        }
        for i in 0..n_par {
            for j in 0..i {
                a[i][j] = a[j][i];
            }
        }

        let mut accepted = false;
        for _ in 0..25 {
            let mut damped = a;
            for (i, row) in damped.iter_mut().enumerate().take(n_par) {
                row[i] += nu * a[i][i].max(1e-30);
            }
            let rhs = [-g[0], -g[1], -g[2]];
            let Some(delta) = solve_sym(n_par, damped, rhs) else {
                nu *= 2.0;
                continue;
            };
            let (x0_new, ell_new, mu_new) = if free_x0 {
                (x0 + delta[0], (ell + delta[1]).clamp(-690.0, 690.0), mu + delta[2])
            } else {
                (x0, (ell + delta[0]).clamp(-690.0, 690.0), mu + delta[1])
            };
            let rss_new = rss_at(x0_new, ell_new, mu_new);
            if rss_new.is_finite() && rss_new <= rss {
                let rel = (rss - rss_new) / rss.max(f64::MIN_POSITIVE);
                x0 = x0_new;
                ell = ell_new;
                mu = mu_new;
                rss = rss_new;
                nu = (nu / 3.0).max(1e-12);
                accepted = true;
                if rel < REL_TOL || rss <= rss_floor {
                    converged = true;
                }
                break;
            }
            nu *= 2.0;
            if nu > 1e14 {
                break;
            }
        }
        if converged || !accepted {
            // A step that cannot be accepted even under heavy damping means
            // the current point is (numerically) a local minimum.
            converged = converged || rss.is_finite();
            break;
        }
    }
    LmOutcome { x0, lambda: ell.exp(), mu, rss, converged, iterations }
}

/// Smallest positive spacing between consecutive times; concatenated
/// multi-realization series carry repeated times, which are skipped.
fn min_positive_dt(times: &[f64]) -> f64 {
    times
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min)
}

fn decay_fit_from(outcome: LmOutcome, k: usize, m: usize) -> FitResult {
    FitResult::from_rss(
        ModelKind::Decay,
        FittedParams::Decay { x0: outcome.x0, lambda: outcome.lambda, mu: outcome.mu },
        k,
        m,
        outcome.rss,
        outcome.converged,
        outcome.iterations,
    )
}

/// Decay fit from a single rate seed: linear least squares for the amplitude
/// and offset at `lambda_init`, then local Levenberg-Marquardt refinement.
/// This is the truth-seeded local mode used by sweeps that opt out of the
/// global multi-start search.
pub fn fit_decay_seeded(ts: &TimeSeries, x0_known: Option<f64>, lambda_init: f64) -> Result<FitResult> {
    if !(lambda_init > 0.0 && lambda_init.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda_init must be positive, got {lambda_init}")));
    }
    let k = if x0_known.is_some() { 3 } else { 4 };
    let m = ts.len();
    if m < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "fit_decay_seeded requires m >= {}, got {m}",
            k + 1
        )));
    }
    let (x0, mu, _) = decay_linear_ls(&ts.times, &ts.values, lambda_init, x0_known);
    let outcome = lm_refine_decay(&ts.times, &ts.values, x0_known, x0, lambda_init, mu);
    let fit = decay_fit_from(outcome, k, m);
    if fit.converged {
        Ok(fit)
    } else {
        Err(Error::NonConvergence(Box::new(fit)))
    }
}

/// Global decay fit: 20 rate seeds log-spaced over [0.01/t_span, 100 f], each
/// initialized by linear least squares and refined by Levenberg-Marquardt;
/// the lowest RSS wins, with exact ties broken toward the smaller rate.
/// `k = 4` for (x0, lambda, mu, sigma), or 3 when `x0_known` is supplied.
///
/// # Errors
/// `NonConvergence` when no start converged; the error carries the best fit
/// found so sweeps can record the trial with its flag cleared.
pub fn fit_decay(ts: &TimeSeries, x0_known: Option<f64>) -> Result<FitResult> {
    const N_STARTS: usize = 20;
    let k = if x0_known.is_some() { 3 } else { 4 };
    let m = ts.len();
    if m < k + 1 {
        return Err(Error::InvalidParameter(format!("fit_decay requires m >= {}, got {m}", k + 1)));
    }
    let dt = min_positive_dt(&ts.times);
    if !dt.is_finite() {
        return Err(Error::InvalidParameter("times carry no positive spacing".into()));
    }
    let f_est = 1.0 / dt;
    let t_span = ts.times[m - 1] - ts.times[0] + dt;
    let lo = (0.01 / t_span).ln();
    let hi = (100.0 * f_est).ln();

    let mut best: Option<LmOutcome> = None;
    let mut any_converged = false;
    let mut total_iterations = 0;
    for i in 0..N_STARTS {
        let lambda0 = (lo + (hi - lo) * i as f64 / (N_STARTS - 1) as f64).exp();
        let (x0, mu, _) = decay_linear_ls(&ts.times, &ts.values, lambda0, x0_known);
        let outcome = lm_refine_decay(&ts.times, &ts.values, x0_known, x0, lambda0, mu);
        any_converged |= outcome.converged;
        total_iterations += outcome.iterations;
        let better = match &best {
            None => true,
            Some(b) => {
                outcome.rss < b.rss || (outcome.rss == b.rss && outcome.lambda < b.lambda)
            }
        };
        if better {
            best = Some(outcome);
        }
    }
    let mut outcome = best.expect("at least one start");
    outcome.iterations = total_iterations;
    let fit = decay_fit_from(outcome, k, m);
    if any_converged {
        Ok(fit)
    } else {
        Err(Error::NonConvergence(Box::new(fit)))
    }
}

/// Exact linear least squares on the basis {cos(omega t), sin(omega t)} via
/// Gram-Schmidt orthogonalization, which stays stable when the two columns
/// are nearly collinear (tiny omega). Returns (a, b, rss) for the model
/// `a cos + b sin`.
fn sho_linear_ls(times: &[f64], values: &[f64], omega: f64) -> (f64, f64, f64) {
    let c: Vec<f64> = times.iter().map(|&t| (omega * t).cos()).collect();
    let s: Vec<f64> = times.iter().map(|&t| (omega * t).sin()).collect();
    let nc = c.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ns = s.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (a, b);
    if nc < 1e-300 {
        // Cosine column vanished (only possible for degenerate grids).
        b = if ns < 1e-300 { 0.0 } else { values.iter().zip(&s).map(|(y, v)| y * v).sum::<f64>() / (ns * ns) };
        a = 0.0;
    } else {
        let proj = c.iter().zip(&s).map(|(ci, si)| ci * si).sum::<f64>() / nc;
        let v: Vec<f64> = c.iter().zip(&s).map(|(ci, si)| si - proj * ci / nc).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = values.iter().zip(&c).map(|(y, ci)| y * ci).sum::<f64>() / nc;
        if nv <= 1e-9 * ns.max(1e-300) {
            a = alpha / nc;
            b = 0.0;
        } else {
            let beta = values.iter().zip(&v).map(|(y, vi)| y * vi).sum::<f64>() / nv;
            b = beta / nv;
            a = alpha / nc - beta * proj / (nc * nv);
        }
    }
    let rss = times
        .iter()
        .zip(values)
        .map(|(&t, &y)| (y - a * (omega * t).cos() - b * (omega * t).sin()).powi(2))
        .sum();
    (a, b, rss)
}

/// Angular frequencies of the 5 largest periodogram local maxima.
fn periodogram_peaks(values: &[f64], dt: f64) -> Vec<f64> {
    let m = values.len();
    let mut buf: Vec<Complex<f64>> = values.iter().map(|&v| Complex::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let half = m / 2;
    let power: Vec<f64> = buf[..=half].iter().map(|z| z.norm_sqr()).collect();
    let mut peaks: Vec<(f64, usize)> = (1..half)
        .filter(|&k| power[k] >= power[k - 1] && power[k] >= power[k + 1])
        .map(|k| (power[k], k))
        .collect();
    peaks.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    peaks.iter().take(5).map(|&(_, k)| TAU * k as f64 / (m as f64 * dt)).collect()
}

/// Golden-section minimization of `f` on [lo, hi]; returns the abscissa.
fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, evals: &mut usize) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    *evals += 2;
    for _ in 0..80 {
        if hi - lo <= 1e-12 * hi.abs().max(1e-300) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        *evals += 1;
    }
    0.5 * (lo + hi)
}

/// SHO model at a fixed angular frequency: exact linear least squares for the
/// in-phase/quadrature amplitudes. Charged the SHO model's nominal `k = 4`.
pub fn fit_sho_at(ts: &TimeSeries, omega: f64) -> Result<FitResult> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
    }
    let m = ts.len();
    if m < 8 {
        return Err(Error::InvalidParameter(format!("fit_sho_at requires m >= 8, got {m}")));
    }
    let (a, b, rss) = sho_linear_ls(&ts.times, &ts.values, omega);
    Ok(FitResult::from_rss(
        ModelKind::Sho,
        FittedParams::Sho { a: a.hypot(b), omega, phi: (-b).atan2(a).rem_euclid(TAU) },
        4,
        m,
        rss,
        true,
        1,
    ))
}

/// SHO fit refined locally from a caller-supplied frequency seed: amplitudes
/// are solved exactly at each trial frequency and the frequency is polished
/// by golden-section search within one Fourier bin of the seed, mirroring
/// the refinement stage of [`fit_sho`] without its global scan. `k = 4` for
/// (A, omega, phi, sigma).
///
/// # Errors
/// `InvalidParameter` when `omega_init` is not positive and finite, when
/// `m < 8`, or when the time axis carries no positive spacing.
pub fn fit_sho_seeded(ts: &TimeSeries, omega_init: f64) -> Result<FitResult> {
    if !(omega_init > 0.0 && omega_init.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "omega_init must be positive, got {omega_init}"
        )));
    }
    let m = ts.len();
    if m < 8 {
        return Err(Error::InvalidParameter(format!("fit_sho_seeded requires m >= 8, got {m}")));
    }
    let dt = min_positive_dt(&ts.times);
    if !dt.is_finite() {
        return Err(Error::InvalidParameter("times carry no positive spacing".into()));
    }
    let t_span = ts.times[m - 1] - ts.times[0] + dt;
    let bin = TAU / t_span;
    let lo = (omega_init - bin).max(omega_init * 1e-3);
    let hi = omega_init + bin;
    let mut evals = 0usize;
    let omega = golden_min(|w| sho_linear_ls(&ts.times, &ts.values, w).2, lo, hi, &mut evals);
    // As in fit_sho, keep the seed if the polled bracket was not unimodal.
    let (mut a, mut b, mut rss) = sho_linear_ls(&ts.times, &ts.values, omega);
    let mut omega_hat = omega;
    let (a0, b0, rss0) = sho_linear_ls(&ts.times, &ts.values, omega_init);
    if rss0 < rss {
        (a, b, rss, omega_hat) = (a0, b0, rss0, omega_init);
    }
    Ok(FitResult::from_rss(
        ModelKind::Sho,
        FittedParams::Sho { a: a.hypot(b), omega: omega_hat, phi: (-b).atan2(a).rem_euclid(TAU) },
        4,
        m,
        rss,
        true,
        evals,
    ))
}

/// Global SHO fit. Candidate frequencies come from the 5 largest periodogram
/// local maxima, a 16-point log grid over [2 pi/(M dt), pi f] (one cycle per
/// window up to Nyquist), and 4 sub-fundamental frequencies 2 pi/(q t_span)
/// for q in {8, 64, 512, 4096} so near-constant signals remain representable
/// (this keeps the fit nested above the noise model on offset data). Each
/// candidate is solved exactly by linear least squares; the best is refined
/// by golden-section search on RSS within one Fourier bin. `k = 4` for
/// (A, omega, phi, sigma); ties break toward the smaller frequency.
pub fn fit_sho(ts: &TimeSeries) -> Result<FitResult> {
    let m = ts.len();
    if m < 8 {
        return Err(Error::InvalidParameter(format!("fit_sho requires m >= 8, got {m}")));
    }
    let dt = min_positive_dt(&ts.times);
    if !dt.is_finite() {
        return Err(Error::InvalidParameter("times carry no positive spacing".into()));
    }
    let f_est = 1.0 / dt;
    let t_span = ts.times[m - 1] - ts.times[0] + dt;

    let mut candidates = periodogram_peaks(&ts.values, dt);
    let lo = (TAU / (m as f64 * dt)).ln();
    let hi = (std::f64::consts::PI * f_est).ln();
    for i in 0..16 {
        candidates.push((lo + (hi - lo) * i as f64 / 15.0).exp());
    }
    for q in [8.0, 64.0, 512.0, 4096.0] {
        candidates.push(TAU / (q * t_span));
    }

    let mut evals = 0usize;
    let mut best: Option<(f64, f64)> = None; // (rss, omega)
    for &omega in &candidates {
        if !(omega > 0.0) {
            continue;
        }
        let (_, _, rss) = sho_linear_ls(&ts.times, &ts.values, omega);
        evals += 1;
        let better = match best {
            None => true,
            Some((brss, bomega)) => rss < brss || (rss == brss && omega < bomega),
        };
        if better {
            best = Some((rss, omega));
        }
    }
    let (_, omega0) = best.expect("candidate list is never empty");

    let bin = TAU / t_span;
    let lo = (omega0 - bin).max(omega0 * 1e-3);
    let hi = omega0 + bin;
    let omega = golden_min(
        |w| sho_linear_ls(&ts.times, &ts.values, w).2,
        lo,
        hi,
        &mut evals,
    );
    // Keep whichever of the refined and seed frequencies fits better; golden
    // section assumes unimodality, which holds only near the optimum.
    let (mut a, mut b, mut rss) = sho_linear_ls(&ts.times, &ts.values, omega);
    let mut omega_hat = omega;
    let (a0, b0, rss0) = sho_linear_ls(&ts.times, &ts.values, omega0);
    if rss0 < rss {
        (a, b, rss, omega_hat) = (a0, b0, rss0, omega0);
    }
    Ok(FitResult::from_rss(
        ModelKind::Sho,
        FittedParams::Sho { a: a.hypot(b), omega: omega_hat, phi: (-b).atan2(a).rem_euclid(TAU) },
        4,
        m,
        rss,
        true,
        evals,
    ))
}
