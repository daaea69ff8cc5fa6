//! Multiple importance sampling: drawing one batch per proposal and weighting
//! the draws with the standard, full deterministic-mixture or partial
//! deterministic-mixture denominators.
//!
//! All three weighting rules share one kernel: a sample's weight is
//! `pi(x) / psi(x)` where `psi` is the equal-weight mixture over some list of
//! proposal indices (its own proposal, every proposal, or its subset). Using a
//! single code path makes the `P = 1` and `P = N` degeneracies bit-exact.

use alloc::vec::Vec;
use core::slice;

use rand::Rng;

use crate::density::{log_sum_exp, Family, TargetSpec};
use crate::error::{Error, Result};
use crate::partition::Partition;

/// Ordered list of proposal densities; the position is the proposal's identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProposalSet {
    proposals: Vec<Family>,
}

impl ProposalSet {
    pub fn new(proposals: Vec<Family>) -> Result<Self> {
        if proposals.is_empty() {
            return Err(Error::InvalidParameter("proposal set must be non-empty"));
        }
        Ok(Self { proposals })
    }

    pub fn len(&self) -> usize {
        self.proposals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.proposals.is_empty()
    }

    pub fn get(&self, index: usize) -> &Family {
        &self.proposals[index]
    }

    pub fn iter(&self) -> slice::Iter<'_, Family> {
        self.proposals.iter()
    }

    /// True when every proposal is a location shift of the first one, so
    /// `argmax_j q_j(x)` reduces to `argmin_j |x - location_j|`.
    pub fn shares_shape(&self) -> bool {
        let first = &self.proposals[0];
        self.proposals.iter().all(|p| p.same_shape(first))
    }
}

/// Samples drawn `k` per proposal, stored proposal-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    values: Vec<f64>,
    per_proposal: usize,
    proposals: usize,
}

impl SampleSet {
    /// Wraps pre-drawn values laid out proposal-major: sample `i` belongs to
    /// proposal `i / per_proposal`.
    pub fn from_values(values: Vec<f64>, proposals: usize, per_proposal: usize) -> Result<Self> {
        if per_proposal == 0 {
            return Err(Error::ZeroSamplesPerProposal);
        }
        if values.len() != proposals * per_proposal {
            return Err(Error::LengthMismatch {
                expected: proposals * per_proposal,
                found: values.len(),
            });
        }
        if let Some(&x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput(x));
        }
        Ok(Self {
            values,
            per_proposal,
            proposals,
        })
    }

    /// Number of samples `L = k N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Index of the proposal that generated sample `i`.
    pub fn proposal_of(&self, i: usize) -> usize {
        i / self.per_proposal
    }

    pub fn per_proposal(&self) -> usize {
        self.per_proposal
    }

    pub fn num_proposals(&self) -> usize {
        self.proposals
    }
}

/// Draws `k` samples from every proposal, proposal-major then replicate.
pub fn draw_mis_samples<R: Rng + ?Sized>(
    ps: &ProposalSet,
    k: usize,
    rng: &mut R,
) -> Result<SampleSet> {
    if k == 0 {
        return Err(Error::ZeroSamplesPerProposal);
    }
    let mut values = Vec::with_capacity(ps.len() * k);
    for q in ps.iter() {
        for _ in 0..k {
            values.push(q.sample(rng));
        }
    }
    Ok(SampleSet {
        values,
        per_proposal: k,
        proposals: ps.len(),
    })
}

/// Density evaluation tally for one run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounter {
    /// Evaluations of the target `pi`.
    pub target: u64,
    /// Proposal evaluations spent forming weights.
    pub proposal: u64,
    /// Proposal evaluations spent searching for the closest proposal while clustering.
    pub search: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightScheme {
    Standard,
    DeterministicMixture,
    Partial,
}

/// Importance weights aligned with a [`SampleSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    scheme: WeightScheme,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>, scheme: WeightScheme) -> Result<Self> {
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be finite and non-negative"));
        }
        Ok(Self { weights, scheme })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.weights
    }

    pub fn scheme(&self) -> WeightScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Per-sample `ln pi(x_i)` and `ln q_{n(i)}(x_i)`, computed once and reused
/// when an a-posteriori partition reweights the same samples.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardTerms {
    ln_target: Vec<f64>,
    ln_own: Vec<f64>,
}

impl StandardTerms {
    /// Costs `L` target and `L` proposal evaluations.
    pub fn evaluate(
        ss: &SampleSet,
        ps: &ProposalSet,
        target: &TargetSpec,
        counter: &mut EvalCounter,
    ) -> Result<Self> {
        check_alignment(ss, ps)?;
        let mut ln_target = Vec::with_capacity(ss.len());
        let mut ln_own = Vec::with_capacity(ss.len());
        for (i, &x) in ss.values.iter().enumerate() {
            ln_target.push(target.ln_unnormalized(x)?);
            ln_own.push(ps.get(ss.proposal_of(i)).ln_pdf(x)?);
        }
        counter.target += ss.len() as u64;
        counter.proposal += ss.len() as u64;
        Ok(Self { ln_target, ln_own })
    }

    /// Standard weights `pi(x_i) / q_{n(i)}(x_i)` from the cached terms.
    pub fn weights(&self, ss: &SampleSet) -> Result<WeightVector> {
        if ss.len() != self.ln_target.len() {
            return Err(Error::LengthMismatch {
                expected: self.ln_target.len(),
                found: ss.len(),
            });
        }
        let mut out = Vec::with_capacity(ss.len());
        for ((&lt, &lq), &x) in self.ln_target.iter().zip(&self.ln_own).zip(&ss.values) {
            // same arithmetic as the mixture kernel with a single member
            let ln_psi = log_sum_exp(core::iter::once(lq)) - libm::log(1.0);
            out.push(finish_weight(lt, ln_psi, x)?);
        }
        WeightVector::new(out, WeightScheme::Standard)
    }
}

fn check_alignment(ss: &SampleSet, ps: &ProposalSet) -> Result<()> {
    if ss.num_proposals() != ps.len() {
        return Err(Error::LengthMismatch {
            expected: ps.len(),
            found: ss.num_proposals(),
        });
    }
    Ok(())
}

fn finish_weight(ln_target: f64, ln_psi: f64, x: f64) -> Result<f64> {
    if ln_psi == f64::NEG_INFINITY {
        return Err(Error::ZeroDensity(x));
    }
    let w = libm::exp(ln_target - ln_psi);
    if !w.is_finite() {
        return Err(Error::InvalidParameter("weight overflowed"));
    }
    Ok(w)
}

/// Shared kernel: `w_i = pi(x_i) / ((1/|S(i)|) sum_{j in S(i)} q_j(x_i))`.
///
/// Members are visited in the order given. When `cached` is supplied, the
/// target term and the sample's own proposal term are taken from it instead of
/// being re-evaluated.
fn mixture_weights<'a>(
    ss: &SampleSet,
    ps: &ProposalSet,
    target: &TargetSpec,
    members_of: impl Fn(usize) -> &'a [usize],
    cached: Option<&StandardTerms>,
    scheme: WeightScheme,
    counter: &mut EvalCounter,
) -> Result<WeightVector> {
    check_alignment(ss, ps)?;
    let mut out = Vec::with_capacity(ss.len());
    let mut ln_q = Vec::new();
    for (i, &x) in ss.values.iter().enumerate() {
        let own = ss.proposal_of(i);
        let ln_target = match cached {
            Some(c) => c.ln_target[i],
            None => {
                counter.target += 1;
                target.ln_unnormalized(x)?
            }
        };
        let members = members_of(own);
        ln_q.clear();
        for &j in members {
            let v = match cached {
                Some(c) if j == own => c.ln_own[i],
                _ => {
                    counter.proposal += 1;
                    ps.get(j).ln_pdf(x)?
                }
            };
            ln_q.push(v);
        }
        let ln_psi = log_sum_exp(ln_q.iter().copied()) - libm::log(members.len() as f64);
        out.push(finish_weight(ln_target, ln_psi, x)?);
    }
    WeightVector::new(out, scheme)
}

/// Standard MIS weights: each sample over its own generating proposal.
/// Costs `L` target and `L` proposal evaluations.
pub fn weights_standard(
    ss: &SampleSet,
    ps: &ProposalSet,
    target: &TargetSpec,
    counter: &mut EvalCounter,
) -> Result<WeightVector> {
    let singles: Vec<usize> = (0..ps.len()).collect();
    mixture_weights(
        ss,
        ps,
        target,
        |own| slice::from_ref(&singles[own]),
        None,
        WeightScheme::Standard,
        counter,
    )
}

/// Full deterministic-mixture weights over all `N` proposals.
/// Costs `L` target and `L N` proposal evaluations.
pub fn weights_dm(
    ss: &SampleSet,
    ps: &ProposalSet,
    target: &TargetSpec,
    counter: &mut EvalCounter,
) -> Result<WeightVector> {
    let all: Vec<usize> = (0..ps.len()).collect();
    mixture_weights(
        ss,
        ps,
        target,
        |_| all.as_slice(),
        None,
        WeightScheme::DeterministicMixture,
        counter,
    )
}

/// Partial deterministic-mixture weights: each sample over the mixture of its
/// proposal's subset. Costs `L` target and `L M` proposal evaluations.
pub fn weights_partial(
    ss: &SampleSet,
    ps: &ProposalSet,
    target: &TargetSpec,
    part: &Partition,
    counter: &mut EvalCounter,
) -> Result<WeightVector> {
    check_partition(ps, part)?;
    mixture_weights(
        ss,
        ps,
        target,
        |own| part.members_of(own),
        None,
        WeightScheme::Partial,
        counter,
    )
}

/// [`weights_partial`] reusing terms already paid for by [`StandardTerms::evaluate`]:
/// adds `L (M - 1)` proposal evaluations and no target evaluations.
pub fn weights_partial_reusing(
    ss: &SampleSet,
    ps: &ProposalSet,
    target: &TargetSpec,
    terms: &StandardTerms,
    part: &Partition,
    counter: &mut EvalCounter,
) -> Result<WeightVector> {
    check_partition(ps, part)?;
    if terms.ln_target.len() != ss.len() {
        return Err(Error::LengthMismatch {
            expected: ss.len(),
            found: terms.ln_target.len(),
        });
    }
    mixture_weights(
        ss,
        ps,
        target,
        |own| part.members_of(own),
        Some(terms),
        WeightScheme::Partial,
        counter,
    )
}

fn check_partition(ps: &ProposalSet, part: &Partition) -> Result<()> {
    if part.num_proposals() != ps.len() {
        return Err(Error::InvalidPartition("partition does not cover the proposal set"));
    }
    Ok(())
}

/// Rescales weights to sum to one.
pub fn normalize_weights(wv: &WeightVector) -> Result<WeightVector> {
    let total: f64 = wv.weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    Ok(WeightVector {
        weights: wv.weights.iter().map(|w| w / total).collect(),
        scheme: wv.scheme,
    })
}
