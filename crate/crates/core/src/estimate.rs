//! Self-normalized and unnormalized estimators, and the normalizing-constant
//! estimate, for a weighted [`SampleSet`].

use crate::error::{Error, Result};
use crate::mis::{EvalCounter, SampleSet, WeightVector};

/// The integrand `f` whose expectation under the normalized target is sought.
#[derive(Debug, Clone, Copy)]
pub enum MomentFunction {
    Identity,
    Square,
    Custom(fn(f64) -> f64),
}

impl MomentFunction {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MomentFunction::Identity => x,
            MomentFunction::Square => x * x,
            MomentFunction::Custom(f) => f(x),
        }
    }
}

fn check_lengths(ss: &SampleSet, wv: &WeightVector) -> Result<()> {
    if ss.len() != wv.len() {
        return Err(Error::LengthMismatch {
            expected: ss.len(),
            found: wv.len(),
        });
    }
    Ok(())
}

fn weighted_sum(ss: &SampleSet, wv: &WeightVector, f: MomentFunction) -> f64 {
    ss.values()
        .iter()
        .zip(wv.as_slice())
        .map(|(&x, &w)| w * f.apply(x))
        .sum()
}

/// `sum w_i f(x_i) / sum w_i`.
pub fn estimate_self_normalized(
    ss: &SampleSet,
    wv: &WeightVector,
    f: MomentFunction,
) -> Result<f64> {
    check_lengths(ss, wv)?;
    let total: f64 = wv.as_slice().iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    Ok(weighted_sum(ss, wv, f) / total)
}

/// `sum w_i f(x_i) / (L z)` with a known normalizing constant `z`.
pub fn estimate_unnormalized(
    ss: &SampleSet,
    wv: &WeightVector,
    f: MomentFunction,
    z: f64,
) -> Result<f64> {
    check_lengths(ss, wv)?;
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::NonPositiveNormalizer(z));
    }
    Ok(weighted_sum(ss, wv, f) / (ss.len() as f64 * z))
}

/// `Z_hat = (1/L) sum w_i`.
pub fn estimate_z(wv: &WeightVector) -> f64 {
    wv.as_slice().iter().sum::<f64>() / wv.len() as f64
}

/// Everything reported for a single weighted run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateRecord {
    pub self_normalized: f64,
    /// Present only when the normalizing constant is known.
    pub unnormalized: Option<f64>,
    pub z_hat: f64,
    pub max_normalized_weight: f64,
    pub target_evals: u64,
    pub proposal_evals: u64,
    pub search_evals: u64,
}

impl EstimateRecord {
    pub fn compute(
        ss: &SampleSet,
        wv: &WeightVector,
        f: MomentFunction,
        z: Option<f64>,
        counter: &EvalCounter,
    ) -> Result<Self> {
        let self_normalized = estimate_self_normalized(ss, wv, f)?;
        let unnormalized = z
            .map(|z| estimate_unnormalized(ss, wv, f, z))
            .transpose()?;
        let total: f64 = wv.as_slice().iter().sum();
        let max = wv.as_slice().iter().copied().fold(0.0, f64::max);
        Ok(Self {
            self_normalized,
            unnormalized,
            z_hat: estimate_z(wv),
            max_normalized_weight: (max / total).min(1.0),
            target_evals: counter.target,
            proposal_evals: counter.proposal,
            search_evals: counter.search,
        })
    }
}
