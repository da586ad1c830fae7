//! Counter-based random streams for reproducible parallel simulation.
//!
//! Every Monte Carlo trial owns an independent stream derived from
//! `(master seed, grid point, trial index, attempt)` by avalanche mixing, so
//! serial and parallel sweeps draw identical numbers regardless of execution
//! order. Gaussian variates use Box-Muller on top of a SplitMix64 core; the
//! algorithm is fixed so seeded runs replicate across machines.

use std::f64::consts::TAU;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 state advance and output finalizer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds one counter word into a seed with full avalanche.
pub(crate) fn absorb(seed: u64, word: u64) -> u64 {
    let mut s = seed ^ word.wrapping_mul(GOLDEN_GAMMA);
    splitmix64(&mut s)
}

/// A deterministic Gaussian/uniform stream.
///
/// Streams are cheap to construct; callers derive one per trial via
/// [`GaussianStream::for_trial`] rather than sharing or splitting live state.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    state: u64,
    spare: Option<f64>,
}

impl GaussianStream {
    /// Stream seeded directly from `seed`.
    pub fn new(seed: u64) -> Self {
        GaussianStream { state: absorb(0, seed), spare: None }
    }

    /// Independent stream for one trial, keyed by the full counter tuple.
    ///
    /// `attempt` distinguishes a flagged resample (attempt 1) from the
    /// original draw (attempt 0) after a degenerate or non-converged trial.
    pub fn for_trial(master: u64, point: u64, trial: u64, attempt: u64) -> Self {
        let mut s = absorb(0, master);
        s = absorb(s, point);
        s = absorb(s, trial);
        s = absorb(s, attempt);
        GaussianStream { state: s, spare: None }
    }

    /// Next raw 64-bit word.
    pub fn next_u64(&mut self) -> u64 {
        splitmix64(&mut self.state)
    }

    /// Uniform draw on the half-open interval [0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        // 53 high bits give the full double-precision lattice.
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via Box-Muller, caching the paired variate.
    pub fn next_standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 lies in (0, 1] so the log is always finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    /// Normal draw with mean `mu` and standard deviation `sigma`.
    pub fn next_normal(&mut self, mu: f64, sigma: f64) -> f64 {
        mu + sigma * self.next_standard_normal()
    }
}
