//! Clean and noisy trajectory generators for the three dynamical motifs
//! (exponential decay, simple harmonic oscillator, Lorenz chaos) and the
//! pure-noise null, on explicit uniform sampling grids.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::rng::GaussianStream;

/// Uniform observation grid: sampling frequency `f` and sample count `m`,
/// with derived spacing `dt = 1/f`, window `t_max = m/f`, and sample times
/// `t_j = j/f` for `j = 0..m-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingGrid {
    f: f64,
    m: usize,
}

impl SamplingGrid {
    /// Validates `f > 0` (finite) and `m >= 1`.
    pub fn new(f: f64, m: usize) -> Result<Self> {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sampling frequency f must be positive and finite, got {f}"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidParameter("sample count m must be >= 1".into()));
        }
        Ok(SamplingGrid { f, m })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Sample spacing `1/f`.
    pub fn dt(&self) -> f64 {
        1.0 / self.f
    }

    /// Observation window `m * dt`.
    pub fn t_max(&self) -> f64 {
        self.m as f64 / self.f
    }

    /// The sample times `j/f`, strictly increasing with uniform spacing.
    pub fn times(&self) -> Vec<f64> {
        (0..self.m).map(|j| j as f64 / self.f).collect()
    }
}

/// Exponential decay `x(t) = x0 * exp(-lambda * t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    pub x0: f64,
    pub lambda: f64,
}

impl DecayParams {
    /// Validates `lambda > 0` and `x0` finite.
    pub fn new(x0: f64, lambda: f64) -> Result<Self> {
        if !x0.is_finite() {
            return Err(Error::InvalidParameter(format!("x0 must be finite, got {x0}")));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "decay rate lambda must be positive and finite, got {lambda}"
            )));
        }
        Ok(DecayParams { x0, lambda })
    }
}

/// Additive observation noise `eta ~ N(mu, sigma^2)`.
///
/// `sigma = 0` is permitted for generation only; likelihood evaluation of
/// exactly clean data trips the degenerate-variance guard instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub mu: f64,
    pub sigma: f64,
}

impl NoiseParams {
    /// Validates `sigma >= 0` and both fields finite.
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("noise mean mu must be finite, got {mu}")));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise standard deviation sigma must be >= 0, got {sigma}"
            )));
        }
        Ok(NoiseParams { mu, sigma })
    }
}

/// Simple harmonic oscillator `x(t) = A * cos(omega * t + phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShoParams {
    pub a: f64,
    pub omega: f64,
    /// Initial phase, normalized to [0, 2*pi).
    pub phi: f64,
}

impl ShoParams {
    /// Validates `a >= 0`, `omega > 0`; normalizes `phi` into [0, 2*pi).
    pub fn new(a: f64, omega: f64, phi: f64) -> Result<Self> {
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("amplitude a must be >= 0, got {a}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "angular frequency omega must be positive, got {omega}"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phase phi must be finite, got {phi}")));
        }
        Ok(ShoParams { a, omega, phi: phi.rem_euclid(TAU) })
    }
}

/// Lorenz system coefficients, initial state, and integrator step.
///
/// The defaults are the standard chaotic parameters (10, 28, 8/3) with a
/// fixed internal Runge-Kutta step of 1e-3 and a 10-time-unit transient
/// discarded before observation so output starts on the attractor. The
/// initial state (1, 1, 1) is a declared default; after the transient the
/// attractor statistics do not depend on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    pub initial: [f64; 3],
    /// Internal integrator step; must divide the output spacing evenly.
    pub h: f64,
    /// Duration discarded before t = 0 of the output grid.
    pub transient: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            initial: [1.0, 1.0, 1.0],
            h: 1e-3,
            transient: 10.0,
        }
    }
}

/// Characteristic scales of the chaotic motif: largest Lyapunov exponent
/// (inverse time scale) and rough attractor amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaosScale {
    pub lambda_lyap: f64,
    pub a_attr: f64,
}

impl Default for ChaosScale {
    fn default() -> Self {
        ChaosScale { lambda_lyap: 0.906, a_attr: 38.0 }
    }
}

/// Ordered sample times plus observed values; the universal data carrier
/// between generators, fitters, and criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl TimeSeries {
    /// Validates equal lengths and finite values.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParameter(format!(
                "times ({}) and values ({}) must have equal length",
                times.len(),
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite observation {v}")));
        }
        Ok(TimeSeries { times, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Clean exponential decay sampled on `grid`: `values[j] = x0 * exp(-lambda * j / f)`.
pub fn gen_decay(p: &DecayParams, grid: &SamplingGrid) -> TimeSeries {
    let times = grid.times();
    let values = times.iter().map(|&t| p.x0 * (-p.lambda * t).exp()).collect();
    TimeSeries { times, values }
}

/// Clean oscillator sampled on `grid`: `values[j] = a * cos(omega * j / f + phi)`.
pub fn gen_sho(p: &ShoParams, grid: &SamplingGrid) -> TimeSeries {
    let times = grid.times();
    let values = times.iter().map(|&t| p.a * (p.omega * t + p.phi).cos()).collect();
    TimeSeries { times, values }
}

fn lorenz_deriv(p: &LorenzParams, s: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = s;
    [p.sigma * (y - x), x * (p.rho - z) - y, x * y - p.beta * z]
}

/// One classical fourth-order Runge-Kutta step of size `h`.
fn rk4_step(p: &LorenzParams, s: [f64; 3], h: f64) -> [f64; 3] {
    let k1 = lorenz_deriv(p, s);
    let k2 = lorenz_deriv(p, [s[0] + 0.5 * h * k1[0], s[1] + 0.5 * h * k1[1], s[2] + 0.5 * h * k1[2]]);
    let k3 = lorenz_deriv(p, [s[0] + 0.5 * h * k2[0], s[1] + 0.5 * h * k2[1], s[2] + 0.5 * h * k2[2]]);
    let k4 = lorenz_deriv(p, [s[0] + h * k3[0], s[1] + h * k3[1], s[2] + h * k3[2]]);
    [
        s[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        s[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

fn check_finite(s: [f64; 3], t: f64) -> Result<()> {
    if s.iter().all(|c| c.is_finite() && c.abs() < 1e6) {
        Ok(())
    } else {
        Err(Error::Diverged { t })
    }
}

/// Advances `steps` RK4 steps of size `h`, checking for divergence.
fn advance(p: &LorenzParams, mut s: [f64; 3], h: f64, steps: usize, t0: f64) -> Result<[f64; 3]> {
    for i in 0..steps {
        s = rk4_step(p, s, h);
        check_finite(s, t0 + (i + 1) as f64 * h)?;
    }
    Ok(s)
}

/// Number of internal steps per output sample, requiring `dt/h` to be a
/// positive integer (up to 1e-9 relative slack for decimal spacings).
fn substeps(dt: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidParameter(format!("integrator step h must be positive, got {h}")));
    }
    let ratio = dt / h;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
        return Err(Error::InvalidParameter(format!(
            "integrator step h = {h} must divide the sample spacing dt = {dt} evenly (dt/h = {ratio})"
        )));
    }
    Ok(n as usize)
}

/// Fixed-step RK4 trajectory of the Lorenz system, returning the x-component
/// at the grid times. A transient of `p.transient` time units is integrated
/// and discarded before t = 0 so output starts on the attractor.
///
/// # Errors
/// `InvalidParameter` when `dt/h` is not a positive integer; `Diverged` when
/// any state goes non-finite (or leaves a generous bounding box).
pub fn integrate_lorenz(p: &LorenzParams, grid: &SamplingGrid) -> Result<TimeSeries> {
    let n = substeps(grid.dt(), p.h)?;
    let h = grid.dt() / n as f64;
    if p.transient < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "transient duration must be >= 0, got {}",
            p.transient
        )));
    }

    let mut state = p.initial;
    check_finite(state, -p.transient)?;
    let trans_steps = (p.transient / h).round() as usize;
    state = advance(p, state, h, trans_steps, -p.transient)?;

    let times = grid.times();
    let mut values = Vec::with_capacity(grid.m());
    values.push(state[0]);
    for j in 1..grid.m() {
        state = advance(p, state, h, n, times[j - 1])?;
        values.push(state[0]);
    }
    Ok(TimeSeries { times, values })
}

/// Largest Lyapunov exponent by two-trajectory renormalization: a companion
/// trajectory offset by 1e-8 is integrated alongside the reference, rescaled
/// back to the offset norm every `renorm_interval`, and the log growth rates
/// are averaged. The attractor transient is discarded before perturbing, and
/// the first few renormalization intervals are excluded from the average so
/// the perturbation can align with the expanding direction.
///
/// # Errors
/// `InvalidParameter` when `duration` is not much larger than
/// `renorm_interval`; `Diverged` as for [`integrate_lorenz`].
pub fn estimate_lyapunov(p: &LorenzParams, duration: f64, renorm_interval: f64) -> Result<f64> {
    const D0: f64 = 1e-8;
    const ALIGN_DISCARD: usize = 10;

    if !(renorm_interval > 0.0) || duration < 10.0 * renorm_interval {
        return Err(Error::InvalidParameter(format!(
            "duration ({duration}) must be at least 10 renormalization intervals ({renorm_interval})"
        )));
    }
    let steps = (renorm_interval / p.h).round().max(1.0) as usize;
    let h = renorm_interval / steps as f64;

    let mut reference = p.initial;
    check_finite(reference, -p.transient)?;
    let trans_steps = (p.transient / h).round() as usize;
    reference = advance(p, reference, h, trans_steps, -p.transient)?;

    let mut companion = [reference[0] + D0, reference[1], reference[2]];
    let intervals = (duration / renorm_interval) as usize;
    let mut sum_log = 0.0;
    let mut kept = 0usize;
    for i in 0..intervals {
        let t0 = i as f64 * renorm_interval;
        reference = advance(p, reference, h, steps, t0)?;
        companion = advance(p, companion, h, steps, t0)?;
        let d = ((companion[0] - reference[0]).powi(2)
            + (companion[1] - reference[1]).powi(2)
            + (companion[2] - reference[2]).powi(2))
        .sqrt();
        if d == 0.0 {
            return Err(Error::DegenerateVariance { rss: 0.0 });
        }
        if i >= ALIGN_DISCARD {
            sum_log += (d / D0).ln();
            kept += 1;
        }
        let scale = D0 / d;
        for c in 0..3 {
            companion[c] = reference[c] + (companion[c] - reference[c]) * scale;
        }
    }
    Ok(sum_log / (kept as f64 * renorm_interval))
}

/// Adds independent Gaussian noise `N(mu, sigma^2)` to every sample,
/// deterministically for a given stream state.
pub fn add_noise(ts: &TimeSeries, n: &NoiseParams, rng: &mut GaussianStream) -> TimeSeries {
    let values = ts.values.iter().map(|&v| v + rng.next_normal(n.mu, n.sigma)).collect();
    TimeSeries { times: ts.times.clone(), values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn decay_matches_defining_exponential() {
        let p = DecayParams::new(1.0, 0.1).unwrap();
        let grid = SamplingGrid::new(1.0, 3).unwrap();
        let ts = gen_decay(&p, &grid);
        assert_relative_eq!(ts.values[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(ts.values[1], (-0.1f64).exp(), max_relative = 1e-15);
        assert_relative_eq!(ts.values[2], (-0.2f64).exp(), max_relative = 1e-15);
    }

    #[test]
    fn decay_zero_amplitude_is_identically_zero() {
        let p = DecayParams::new(0.0, 3.7).unwrap();
        let grid = SamplingGrid::new(2.0, 11).unwrap();
        assert!(gen_decay(&p, &grid).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn decay_long_tail_value() {
        // values[99] = 2 * exp(-9.9) for x0 = 2, lambda = 1, f = 10.
        let p = DecayParams::new(2.0, 1.0).unwrap();
        let grid = SamplingGrid::new(10.0, 100).unwrap();
        let ts = gen_decay(&p, &grid);
        assert_relative_eq!(ts.values[99], 1.003_493_641_123_506_0e-4, max_relative = 1e-12);
    }

    #[test]
    fn decay_is_strictly_decreasing_for_positive_amplitude() {
        let p = DecayParams::new(2.5, 0.3).unwrap();
        let grid = SamplingGrid::new(5.0, 50).unwrap();
        let ts = gen_decay(&p, &grid);
        assert!(ts.values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn sho_quarter_period_samples() {
        let p = ShoParams::new(1.0, TAU, 0.0).unwrap();
        let grid = SamplingGrid::new(4.0, 4).unwrap();
        let ts = gen_sho(&p, &grid);
        let expected = [1.0, 0.0, -1.0, 0.0];
        for (v, e) in ts.values.iter().zip(expected) {
            assert_relative_eq!(*v, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn sho_phase_shift_identity() {
        let p = ShoParams::new(1.0, TAU, std::f64::consts::FRAC_PI_2).unwrap();
        let grid = SamplingGrid::new(4.0, 2).unwrap();
        let ts = gen_sho(&p, &grid);
        assert_relative_eq!(ts.values[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(ts.values[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn sho_zero_amplitude_is_identically_zero() {
        let p = ShoParams::new(0.0, 1.0, 0.2).unwrap();
        let grid = SamplingGrid::new(3.0, 8).unwrap();
        assert!(gen_sho(&p, &grid).values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn sho_mean_over_exact_period_vanishes() {
        // One exact period sampled at 16 points: mean is O(eps) * a * m.
        let p = ShoParams::new(1.0, TAU, 0.0).unwrap();
        let grid = SamplingGrid::new(16.0, 16).unwrap();
        let ts = gen_sho(&p, &grid);
        let mean = ts.values.iter().sum::<f64>() / 16.0;
        assert!(mean.abs() < 1e-13);
    }

    #[test]
    fn phase_is_normalized() {
        let p = ShoParams::new(1.0, 1.0, -1.0).unwrap();
        assert!((0.0..TAU).contains(&p.phi));
        assert_relative_eq!(p.phi, TAU - 1.0, max_relative = 1e-15);
    }

    #[test]
    fn lorenz_fixed_point_stays_at_origin() {
        let p = LorenzParams { initial: [0.0, 0.0, 0.0], ..LorenzParams::default() };
        let grid = SamplingGrid::new(10.0, 20).unwrap();
        let ts = integrate_lorenz(&p, &grid).unwrap();
        assert!(ts.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lorenz_requires_commensurate_step() {
        let p = LorenzParams { h: 3e-4, ..LorenzParams::default() };
        let grid = SamplingGrid::new(1.0, 4).unwrap();
        assert!(matches!(integrate_lorenz(&p, &grid), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn lorenz_stays_in_attractor_bounding_box() {
        let p = LorenzParams::default();
        let grid = SamplingGrid::new(1.0, 1000).unwrap();
        let ts = integrate_lorenz(&p, &grid).unwrap();
        let max_abs = ts.values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(max_abs < 60.0, "x exceeded the attractor bounding box: {max_abs}");
        // Peak |x| on the attractor sits near 20, consistent with a rough
        // peak-to-peak amplitude of about 38.
        assert!((15.0..25.0).contains(&max_abs), "max |x| = {max_abs}");
    }

    #[test]
    fn lorenz_step_halving_is_fourth_order() {
        let grid = SamplingGrid::new(1.0, 2).unwrap();
        let x_at_1 = |h: f64| {
            let p = LorenzParams { h, transient: 0.0, ..LorenzParams::default() };
            integrate_lorenz(&p, &grid).unwrap().values[1]
        };
        let coarse = x_at_1(1e-3);
        let fine = x_at_1(5e-4);
        assert!((coarse - fine).abs() < 1e-8, "step halving moved x(1) by {:e}", coarse - fine);
    }

    #[test]
    fn lyapunov_standard_parameters() {
        let lam = estimate_lyapunov(&LorenzParams::default(), 500.0, 0.5).unwrap();
        assert!((0.85..=0.96).contains(&lam), "Lyapunov estimate {lam} outside [0.85, 0.96]");
    }

    #[test]
    fn lyapunov_stable_regime_is_negative() {
        let p = LorenzParams { rho: 0.5, ..LorenzParams::default() };
        let lam = estimate_lyapunov(&p, 200.0, 0.5).unwrap();
        assert!(lam < 0.0, "stable fixed point should contract, got {lam}");
    }

    #[test]
    fn lyapunov_estimate_is_converged_in_duration() {
        let a = estimate_lyapunov(&LorenzParams::default(), 500.0, 0.5).unwrap();
        let b = estimate_lyapunov(&LorenzParams::default(), 1000.0, 0.5).unwrap();
        assert!((a - b).abs() < 0.02, "duration doubling moved the estimate by {}", (a - b).abs());
    }

    #[test]
    fn add_noise_zero_sigma_shifts_by_mu() {
        let p = DecayParams::new(1.0, 0.5).unwrap();
        let grid = SamplingGrid::new(2.0, 10).unwrap();
        let clean = gen_decay(&p, &grid);
        let n = NoiseParams::new(0.25, 0.0).unwrap();
        let mut rng = GaussianStream::new(1);
        let noisy = add_noise(&clean, &n, &mut rng);
        for (c, v) in clean.values.iter().zip(&noisy.values) {
            assert_relative_eq!(c + 0.25, *v, max_relative = 1e-15);
        }
    }

    #[test]
    fn add_noise_is_deterministic_per_seed() {
        let clean = TimeSeries::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        let n = NoiseParams::new(0.0, 1.0).unwrap();
        let a = add_noise(&clean, &n, &mut GaussianStream::for_trial(9, 0, 0, 0));
        let b = add_noise(&clean, &n, &mut GaussianStream::for_trial(9, 0, 0, 0));
        assert_eq!(a.values, b.values);
    }

    #[test]
    fn add_noise_sample_mean_obeys_lln() {
        let m = 100_000;
        let clean = TimeSeries::new((0..m).map(|j| j as f64).collect(), vec![0.0; m]).unwrap();
        let n = NoiseParams::new(0.7, 2.5).unwrap();
        let noisy = add_noise(&clean, &n, &mut GaussianStream::new(42));
        let mean = noisy.values.iter().sum::<f64>() / m as f64;
        assert!((mean - 0.7).abs() < 3.0 * 2.5 / (m as f64).sqrt());
    }
}
