//! One complete run of a weighting scheme: draw, (cluster,) weight, estimate.

use rand::Rng;

use crate::clustering::{hdm_weights, HereticalConfig, SearchMode};
use crate::density::TargetSpec;
use crate::error::Result;
use crate::estimate::{EstimateRecord, MomentFunction};
use crate::mis::{
    draw_mis_samples, weights_dm, weights_partial, weights_standard, EvalCounter, ProposalSet,
    SampleSet, WeightVector,
};
use crate::partition::{random_partition, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    /// Standard MIS.
    StandardMis,
    /// Full deterministic mixture.
    DeterministicMixture,
    /// Partial deterministic mixture over an a-priori random partition.
    PartialDm,
    /// Partial deterministic mixture over an a-posteriori (heretical) partition.
    HereticalDm,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [
        Scheme::StandardMis,
        Scheme::DeterministicMixture,
        Scheme::PartialDm,
        Scheme::HereticalDm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::StandardMis => "s-mis",
            Scheme::DeterministicMixture => "dm",
            Scheme::PartialDm => "p-dm",
            Scheme::HereticalDm => "h-dm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Stable numeric id used in seed derivation.
    pub fn id(&self) -> u64 {
        *self as u64
    }

    /// Whether the number of subsets is a free parameter of the scheme.
    pub fn uses_subsets(&self) -> bool {
        matches!(self, Scheme::PartialDm | Scheme::HereticalDm)
    }

    /// Effective number of subsets: `N` for standard MIS, `1` for full DM.
    pub fn effective_subsets(&self, subsets: usize, proposals: usize) -> usize {
        match self {
            Scheme::StandardMis => proposals,
            Scheme::DeterministicMixture => 1,
            _ => subsets,
        }
    }
}

impl core::fmt::Display for Scheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Fixed inputs shared by every run of an experiment cell.
#[derive(Debug, Clone, Copy)]
pub struct RunSetup<'a> {
    pub proposals: &'a ProposalSet,
    pub target: &'a TargetSpec,
    pub per_proposal: usize,
    pub subsets: usize,
    pub alpha: f64,
    pub moment: MomentFunction,
    pub search: SearchMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub samples: SampleSet,
    pub weights: WeightVector,
    /// The partition used, for the partial schemes.
    pub partition: Option<Partition>,
    pub record: EstimateRecord,
}

/// Runs one replication of `scheme` on a fresh draw from `rng`.
///
/// Samples are always drawn first; the partial schemes then consume `rng`
/// for their partition, in the same way, so a heretical run with `alpha = 0`
/// reproduces the a-priori run from an identically seeded stream.
pub fn run_scheme<R: Rng + ?Sized>(
    scheme: Scheme,
    setup: &RunSetup<'_>,
    rng: &mut R,
) -> Result<RunOutput> {
    let ps = setup.proposals;
    let samples = draw_mis_samples(ps, setup.per_proposal, rng)?;
    let mut counter = EvalCounter::default();
    let (weights, partition) = match scheme {
        Scheme::StandardMis => (
            weights_standard(&samples, ps, setup.target, &mut counter)?,
            None,
        ),
        Scheme::DeterministicMixture => {
            (weights_dm(&samples, ps, setup.target, &mut counter)?, None)
        }
        Scheme::PartialDm => {
            let part = random_partition(ps.len(), setup.subsets, rng)?;
            let w = weights_partial(&samples, ps, setup.target, &part, &mut counter)?;
            (w, Some(part))
        }
        Scheme::HereticalDm => {
            let cfg = HereticalConfig::new(setup.subsets, setup.alpha)?.with_search(setup.search);
            let (w, outcome) = hdm_weights(&samples, ps, setup.target, &cfg, rng, &mut counter)?;
            (w, Some(outcome.partition))
        }
    };
    let record = EstimateRecord::compute(
        &samples,
        &weights,
        setup.moment,
        Some(setup.target.normalizing_constant()),
        &counter,
    )?;
    Ok(RunOutput {
        samples,
        weights,
        partition,
        record,
    })
}
