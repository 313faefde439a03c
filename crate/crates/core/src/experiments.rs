//! Monte Carlo tail estimates for Lipschitz observables, compared against
//! the concentration bounds.
//!
//! Samples come from each model's exact sampler. Work is split into fixed
//! chunks and chunk `k` draws from ChaCha stream `k` of the master seed, so
//! results do not depend on thread count or scheduling.

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bounds::{tail_bound, BoundVariant, TailBoundSpec};
use crate::error::{Error, Result};
use crate::geometrize::{model_json, Configuration, Model};
use crate::observables::{claimed_lipschitz_constant, PatternSpec};
use crate::scalar::{Rational, Scalar};

/// Samples per RNG stream.
pub const CHUNK_SIZE: usize = 4096;

/// Minimum sample count accepted by [`estimate_tail`].
pub const MIN_SAMPLES: usize = 10_000;

/// E_ν[f] = Σ ν(c)·f(c) over all configurations, exactly.
pub fn exact_expectation<F>(model: &Model, cap: u128, f: F) -> Result<Rational>
where
    F: Fn(&Configuration) -> Result<Rational> + Sync,
{
    let configs = model.enumerate(cap)?;
    let parts: Vec<Rational> = configs
        .par_chunks(1024)
        .map(|chunk| {
            chunk.iter().try_fold(Rational::zero(), |acc, c| Ok(acc + model.claimed_nu(c) * f(c)?))
        })
        .collect::<Result<_>>()?;
    Ok(parts.into_iter().fold(Rational::zero(), |a, b| a + b))
}

/// Wilson score interval for `successes` out of `trials` at two-sided level `confidence`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailRow {
    pub t: f64,
    pub exceedances: u64,
    /// Fraction of samples with |f/c − E[f/c]| ≥ t.
    pub empirical: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub bound_seven: f64,
    pub bound_five: f64,
    pub bound_exact: f64,
    /// Seven-variant bound evaluated at the exactly computed κ, when supplied.
    pub bound_seven_exact_kappa: Option<f64>,
    pub outside_theorem_hypothesis: bool,
    /// ci_hi ≤ bound_seven (only meaningful for t ≥ 1).
    pub within_envelope: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailReport {
    pub model: Value,
    pub observable: String,
    /// c such that f/c is 1-Lipschitz.
    pub lipschitz_c: f64,
    pub kappa: f64,
    pub kappa_source: String,
    pub exact_kappa: Option<f64>,
    /// E_ν[f] (unnormalized).
    pub mean: f64,
    pub mean_is_exact: bool,
    pub sample_mean: f64,
    /// Standard error of the sample mean of f.
    pub sample_std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub confidence: f64,
    pub rows: Vec<TailRow>,
    /// Every row with t ≥ 1 satisfies ci_hi ≤ 2·exp(−t²κ/7).
    pub envelope_satisfied: bool,
}

impl TailReport {
    /// Columns t, empirical, ci_lo, ci_hi, bound_seven, bound_five, bound_exact.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,empirical,ci_lo,ci_hi,bound_seven,bound_five,bound_exact\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.t, r.empirical, r.ci_lo, r.ci_hi, r.bound_seven, r.bound_five, r.bound_exact
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct TailOptions {
    /// Exact κ from a transport computation, reported beside the claimed bound.
    /// For models without a claimed bound this κ is used instead (and flagged).
    pub exact_kappa: Option<f64>,
    /// Use the exact mean when the model has at most this many states.
    pub exact_mean_cap: Option<u128>,
}

/// Draws `samples` configurations and tabulates the two-sided tail of f/c.
pub fn estimate_tail<F>(
    model: &Model,
    observable: &str,
    f: F,
    lipschitz_c: f64,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
    options: &TailOptions,
) -> Result<TailReport>
where
    F: Fn(&Configuration) -> Result<f64> + Sync,
{
    if samples < MIN_SAMPLES {
        return Err(Error::BadParams(format!("need at least {MIN_SAMPLES} samples, got {samples}")));
    }
    if !(lipschitz_c > 0.0 && lipschitz_c.is_finite()) {
        return Err(Error::BadParams(format!("Lipschitz constant {lipschitz_c} must be positive")));
    }
    let (kappa, kappa_source) = match (model.claimed_kappa_lb(), options.exact_kappa) {
        (Some(k), _) => (k.to_f64(), "claimed".to_string()),
        (None, Some(k)) if k > 0.0 => (k, "exact (no claimed bound)".to_string()),
        _ => {
            return Err(Error::MissingKappa(format!("{model} has no positive curvature bound to apply")));
        }
    };

    let chunks = samples.div_ceil(CHUNK_SIZE);
    let per_chunk: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let len = CHUNK_SIZE.min(samples - k * CHUNK_SIZE);
            (0..len).map(|_| f(&model.sample(&mut rng))).collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = per_chunk.into_iter().flatten().collect();

    let n = values.len() as f64;
    let sample_mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - sample_mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sample_std_error = (variance / n).sqrt();

    let exact_mean = match options.exact_mean_cap {
        Some(cap) if model.state_count() <= cap => {
            Some(exact_expectation(model, cap, |c| Ok(Rational::from_f64(f(c)?)))?.to_f64())
        }
        _ => None,
    };
    let mean = exact_mean.unwrap_or(sample_mean);
    let center = mean / lipschitz_c;
    let deviations: Vec<f64> = values.iter().map(|v| (v / lipschitz_c - center).abs()).collect();

    let confidence = 0.99;
    let bound = |kappa: f64, t: f64, variant| {
        tail_bound(&TailBoundSpec { kappa, t, variant, two_sided: true }).map(|b| b.value)
    };
    let mut rows = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let exceedances = deviations.iter().filter(|&&d| d >= t).count() as u64;
        let (ci_lo, ci_hi) = wilson_interval(exceedances, samples as u64, confidence);
        let bound_seven = bound(kappa, t, BoundVariant::Seven)?;
        let bound_seven_exact_kappa = match options.exact_kappa {
            Some(k) if k > 0.0 && k <= 1.0 => Some(bound(k, t, BoundVariant::Seven)?),
            _ => None,
        };
        rows.push(TailRow {
            t,
            exceedances,
            empirical: exceedances as f64 / samples as f64,
            ci_lo,
            ci_hi,
            bound_seven,
            bound_five: bound(kappa, t, BoundVariant::Five)?,
            bound_exact: bound(kappa, t, BoundVariant::Exact)?,
            bound_seven_exact_kappa,
            outside_theorem_hypothesis: t < 1.0,
            within_envelope: ci_hi <= bound_seven,
        });
    }
    let envelope_satisfied = rows.iter().filter(|r| r.t >= 1.0).all(|r| r.within_envelope);
    Ok(TailReport {
        model: model_json(model),
        observable: observable.to_string(),
        lipschitz_c,
        kappa,
        kappa_source,
        exact_kappa: options.exact_kappa,
        mean,
        mean_is_exact: exact_mean.is_some(),
        sample_mean,
        sample_std_error,
        samples,
        seed,
        confidence,
        rows,
        envelope_satisfied,
    })
}

/// [`estimate_tail`] for a pattern observable normalized by its claimed Lipschitz constant.
pub fn estimate_pattern_tail(
    model: &Model,
    obs: &PatternSpec,
    t_grid: &[f64],
    samples: usize,
    seed: u64,
    options: &TailOptions,
) -> Result<TailReport> {
    let c = claimed_lipschitz_constant(obs, model)? as f64;
    estimate_tail(model, &obs.id(), |x| obs.evaluate(x).map(|v| v as f64), c, t_grid, samples, seed, options)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeRow {
    pub t: f64,
    pub exact: f64,
    pub seven: f64,
    pub five: f64,
    /// True for the appended row just past t = 2/κ.
    pub cutoff: bool,
}

/// Two-sided bounds of all three regimes on the grid, plus a row at 2/κ + ε.
pub fn compare_bound_regimes(kappa: f64, t_grid: &[f64]) -> Result<Vec<RegimeRow>> {
    let row = |t: f64, cutoff: bool| -> Result<RegimeRow> {
        let b = |variant| tail_bound(&TailBoundSpec { kappa, t, variant, two_sided: true }).map(|b| b.value);
        Ok(RegimeRow { t, exact: b(BoundVariant::Exact)?, seven: b(BoundVariant::Seven)?, five: b(BoundVariant::Five)?, cutoff })
    };
    let mut rows = t_grid.iter().map(|&t| row(t, false)).collect::<Result<Vec<_>>>()?;
    let edge = 2.0 / kappa;
    rows.push(row(edge + edge * 1e-9, true)?);
    Ok(rows)
}

pub fn regimes_csv(rows: &[RegimeRow]) -> String {
    let mut out = String::from("t,exact,seven,five,cutoff\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.t, r.exact, r.seven, r.five, r.cutoff));
    }
    out
}
