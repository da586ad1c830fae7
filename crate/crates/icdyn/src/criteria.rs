//! Information criteria (AIC, BIC) over fitted models, model comparison with
//! deterministic tie-breaking, and the linearized ΔAIC used by the crossover
//! predictors.

use crate::error::{Error, Result};
use crate::estimation::{FitResult, ModelKind};

/// Akaike information criterion, `2k + 2 NLL`. Lower is better.
pub fn aic(fit: &FitResult) -> f64 {
    2.0 * fit.k as f64 + 2.0 * fit.nll
}

/// Bayesian information criterion, `k ln M + 2 NLL`. Lower is better;
/// penalizes complexity more than AIC once `M > e^2`.
pub fn bic(fit: &FitResult) -> f64 {
    fit.k as f64 * (fit.m as f64).ln() + 2.0 * fit.nll
}

/// One model's scores within a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredModel {
    pub model: ModelKind,
    pub k: usize,
    pub rss: f64,
    pub aic: f64,
    pub bic: f64,
}

/// Outcome of comparing candidate fits on one dataset.
///
/// `delta_aic`/`delta_rss` reference the noise-only fit: the best non-noise
/// candidate's `AIC − AIC_noise` and `RSS_noise − RSS_candidate`. They are
/// `None` when the comparison includes no noise fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelComparison {
    pub scores: Vec<ScoredModel>,
    pub selected: ModelKind,
    pub delta_aic: Option<f64>,
    pub delta_rss: Option<f64>,
}

/// Ordering key implementing strict-minimum AIC selection with ties broken
/// toward the smaller parameter count, then the lexicographic model tag.
fn selection_key(s: &ScoredModel) -> (f64, usize, &'static str) {
    (s.aic, s.k, s.model.tag())
}

/// Compares fits of the same dataset by AIC.
///
/// Selection is the strict minimum; exact ties break toward smaller `k`
/// (parsimony), then the lexicographic model tag. No inconclusive band is
/// applied: every comparison selects exactly one model.
///
/// # Errors
/// `InvalidParameter` for fewer than two fits or mismatched sample counts.
pub fn compare(fits: &[FitResult]) -> Result<ModelComparison> {
    if fits.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "compare requires at least 2 fits, got {}",
            fits.len()
        )));
    }
    if fits.iter().any(|f| f.m != fits[0].m) {
        return Err(Error::InvalidParameter(
            "compare requires fits of the same dataset (equal sample counts)".into(),
        ));
    }
    let scores: Vec<ScoredModel> = fits
        .iter()
        .map(|f| ScoredModel { model: f.model, k: f.k, rss: f.rss, aic: aic(f), bic: bic(f) })
        .collect();
    let best = scores
        .iter()
        .min_by(|a, b| {
            let (ka, kb) = (selection_key(a), selection_key(b));
            ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.cmp(kb.2))
        })
        .expect("non-empty by precondition");
    let selected = best.model;

    let noise = scores.iter().find(|s| s.model == ModelKind::Noise);
    let candidate = scores
        .iter()
        .filter(|s| s.model != ModelKind::Noise)
        .min_by(|a, b| a.aic.total_cmp(&b.aic));
    let (delta_aic, delta_rss) = match (noise, candidate) {
        (Some(n), Some(c)) => (Some(c.aic - n.aic), Some(n.rss - c.rss)),
        _ => (None, None),
    };
    Ok(ModelComparison { scores, selected, delta_aic, delta_rss })
}

/// Linearized AIC difference `2 Δk − ΔRSS/σ²` for a candidate explaining
/// `delta_rss` of residual power with `delta_k` extra parameters at known
/// noise level `sigma`.
///
/// This approximation feeds the analytic crossover predictors only; Monte
/// Carlo selections always use exact AIC differences from fitted NLLs.
pub fn delta_aic_approx(delta_rss: f64, sigma: f64, delta_k: usize) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    Ok(2.0 * delta_k as f64 - delta_rss / (sigma * sigma))
}
