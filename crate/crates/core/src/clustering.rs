//! A-posteriori ("heretical") clustering of proposals.
//!
//! After the samples are drawn and weighted with standard weights, samples are
//! visited from the largest weight down. The generating proposal of each
//! visited sample is grouped with the available proposal that has the highest
//! density at that sample, so the mixture denominator of the heaviest samples
//! grows and their weights shrink. Once a configurable fraction of proposals
//! has been placed this way, the rest are dealt out uniformly at random.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::density::TargetSpec;
use crate::error::{Error, Result};
use crate::mis::{
    weights_partial_reusing, EvalCounter, ProposalSet, SampleSet, StandardTerms, WeightVector,
};
use crate::partition::{fill_randomly, subset_size, Partition};

/// How the closest proposal to a sample is located.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchMode {
    /// Evaluate every candidate density.
    Exhaustive,
    /// Compare distances to proposal locations when every proposal has the
    /// same shape; otherwise fall back to [`SearchMode::Exhaustive`].
    #[default]
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HereticalConfig {
    subsets: usize,
    alpha: f64,
    search: SearchMode,
}

impl HereticalConfig {
    /// `subsets` is the number of subsets `P`; `alpha` the fraction of
    /// proposals placed by weight before random completion.
    pub fn new(subsets: usize, alpha: f64) -> Result<Self> {
        if subsets == 0 {
            return Err(Error::InvalidParameter("number of subsets must be positive"));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter("alpha must lie in [0, 1]"));
        }
        Ok(Self {
            subsets,
            alpha,
            search: SearchMode::Auto,
        })
    }

    pub fn with_search(mut self, search: SearchMode) -> Self {
        self.search = search;
        self
    }

    pub fn subsets(&self) -> usize {
        self.subsets
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn search(&self) -> SearchMode {
        self.search
    }

    /// Number of weight-driven allocations after which the rest is random: `ceil(alpha N)`.
    pub fn weight_driven_quota(&self, proposals: usize) -> usize {
        libm::ceil(self.alpha * proposals as f64) as usize
    }
}

/// Why a proposal landed in its subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Grouped with (or as) the closest available proposal of a heavy sample.
    WeightDriven,
    /// The pair had no subset with two free slots; placed at random.
    PairFallback,
    /// No other proposal was available to pair with; placed at random.
    Unpaired,
    /// Placed by the random completion after the weight-driven quota was met.
    RandomFill,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Allocation {
    pub proposal: usize,
    pub subset: usize,
    pub provenance: Provenance,
}

/// Result of [`heretical_partition`] with its allocation trace.
#[derive(Debug, Clone, PartialEq)]
pub struct HereticalOutcome {
    pub partition: Partition,
    /// Allocations in the order they were made.
    pub allocations: Vec<Allocation>,
    /// Standard weight of every sample popped as the current maximum, in order.
    pub selected_weights: Vec<f64>,
}

/// `argmax_{j in candidates} q_j(x)`, ties to the lowest index.
///
/// Under [`SearchMode::Auto`] with same-shape proposals the density is
/// monotone in `|x - location_j|`, so the nearest location wins and no
/// density evaluation is charged. Otherwise every candidate is evaluated and
/// `counter.search` grows by `candidates.len()`.
pub fn closest_proposal(
    x: f64,
    candidates: &[usize],
    ps: &ProposalSet,
    mode: SearchMode,
    counter: &mut EvalCounter,
) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    if !x.is_finite() {
        return Err(Error::NonFiniteInput(x));
    }
    let mut best = candidates[0];
    if mode == SearchMode::Auto && ps.shares_shape() {
        let mut best_d = (x - ps.get(best).location()).abs();
        for &j in &candidates[1..] {
            let d = (x - ps.get(j).location()).abs();
            if d < best_d || (d == best_d && j < best) {
                best = j;
                best_d = d;
            }
        }
    } else {
        let mut best_ln = ps.get(best).ln_pdf(x)?;
        for &j in &candidates[1..] {
            let v = ps.get(j).ln_pdf(x)?;
            if v > best_ln || (v == best_ln && j < best) {
                best = j;
                best_ln = v;
            }
        }
        counter.search += candidates.len() as u64;
    }
    Ok(best)
}

struct ClusterState {
    size: usize,
    members: Vec<Vec<usize>>,
    subset_of: Vec<Option<usize>>,
    available: Vec<bool>,
    allocations: Vec<Allocation>,
}

impl ClusterState {
    fn new(proposals: usize, subsets: usize, size: usize) -> Self {
        Self {
            size,
            members: vec![Vec::with_capacity(size); subsets],
            subset_of: vec![None; proposals],
            available: vec![true; proposals],
            allocations: Vec::with_capacity(proposals),
        }
    }

    fn assign(&mut self, proposal: usize, subset: usize, provenance: Provenance) {
        debug_assert!(self.subset_of[proposal].is_none());
        debug_assert!(self.members[subset].len() < self.size);
        self.members[subset].push(proposal);
        self.subset_of[proposal] = Some(subset);
        self.allocations.push(Allocation {
            proposal,
            subset,
            provenance,
        });
        if self.members[subset].len() == self.size {
            for &j in &self.members[subset] {
                self.available[j] = false;
            }
        }
    }

    fn free_slots(&self, subset: usize) -> usize {
        self.size - self.members[subset].len()
    }

    fn random_open_subset<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let open: Vec<usize> = (0..self.members.len())
            .filter(|&s| self.free_slots(s) > 0)
            .collect();
        open[rng.random_range(0..open.len())]
    }
}

/// Builds a partition of the proposals after seeing the samples.
///
/// `standard` must hold the standard weights of `ss`. Samples are visited in
/// descending weight order (ties to the lowest index). For each visited sample
/// whose generating proposal `g` is still unplaced, the closest available
/// proposal `j` other than `g` is found; `g` joins `j`'s subset if `j` is
/// placed, otherwise both go to the lowest-indexed subset with two free slots,
/// or independently to random open subsets if no such subset exists. Subsets
/// that fill up leave the available set. After `ceil(alpha N)` proposals have
/// been placed the remaining ones are dealt into the free slots at random, so
/// `alpha = 0` reproduces [`crate::partition::random_partition`] draw for draw.
pub fn heretical_partition<R: Rng + ?Sized>(
    ss: &SampleSet,
    standard: &WeightVector,
    ps: &ProposalSet,
    cfg: &HereticalConfig,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> Result<HereticalOutcome> {
    let n = ps.len();
    let size = subset_size(n, cfg.subsets)?;
    if ss.num_proposals() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: ss.num_proposals(),
        });
    }
    if standard.len() != ss.len() {
        return Err(Error::LengthMismatch {
            expected: ss.len(),
            found: standard.len(),
        });
    }

    let weights = standard.as_slice();
    let mut order: Vec<usize> = (0..ss.len()).collect();
    // stable: equal weights keep ascending index order
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));

    let quota = cfg.weight_driven_quota(n);
    let mut state = ClusterState::new(n, cfg.subsets, size);
    let mut selected_weights = Vec::new();
    let mut candidates = Vec::with_capacity(n);

    for &i in &order {
        if state.allocations.len() >= quota {
            break;
        }
        selected_weights.push(weights[i]);
        let g = ss.proposal_of(i);
        if state.subset_of[g].is_some() {
            continue;
        }
        candidates.clear();
        candidates.extend((0..n).filter(|&j| j != g && state.available[j]));
        if candidates.is_empty() {
            let s = state.random_open_subset(rng);
            state.assign(g, s, Provenance::Unpaired);
            continue;
        }
        let j = closest_proposal(ss.value(i), &candidates, ps, cfg.search, counter)?;
        if let Some(s) = state.subset_of[j] {
            state.assign(g, s, Provenance::WeightDriven);
        } else if let Some(s) = (0..cfg.subsets).find(|&s| state.free_slots(s) >= 2) {
            state.assign(g, s, Provenance::WeightDriven);
            state.assign(j, s, Provenance::WeightDriven);
        } else {
            let s = state.random_open_subset(rng);
            state.assign(g, s, Provenance::PairFallback);
            let s = state.random_open_subset(rng);
            state.assign(j, s, Provenance::PairFallback);
        }
    }

    let unallocated: Vec<usize> = (0..n).filter(|&j| state.subset_of[j].is_none()).collect();
    for (proposal, subset) in fill_randomly(&mut state.members, size, unallocated, rng) {
        state.allocations.push(Allocation {
            proposal,
            subset,
            provenance: Provenance::RandomFill,
        });
    }

    Ok(HereticalOutcome {
        partition: Partition::new(state.members, n)?,
        allocations: state.allocations,
        selected_weights,
    })
}

/// Standard weights, heretical clustering, then partial-mixture reweighting.
///
/// The target and own-proposal evaluations from the standard pass are reused,
/// so the weighting cost is `L` target and `L M` proposal evaluations; the
/// clustering search is charged to `counter.search`.
pub fn hdm_weights<R: Rng + ?Sized>(
    ss: &SampleSet,
    ps: &ProposalSet,
    target: &TargetSpec,
    cfg: &HereticalConfig,
    rng: &mut R,
    counter: &mut EvalCounter,
) -> Result<(WeightVector, HereticalOutcome)> {
    let terms = StandardTerms::evaluate(ss, ps, target, counter)?;
    let standard = terms.weights(ss)?;
    let outcome = heretical_partition(ss, &standard, ps, cfg, rng, counter)?;
    let weights = weights_partial_reusing(ss, ps, target, &terms, &outcome.partition, counter)?;
    Ok((weights, outcome))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Family, GaussianParams, StudentTParams};
    use crate::mis::WeightScheme;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gaussians(means: &[f64], var: f64) -> ProposalSet {
        ProposalSet::new(
            means
                .iter()
                .map(|&m| GaussianParams::new(m, var).unwrap().into())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn closest_by_distance_and_ties() {
        let ps = gaussians(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0], 1.0);
        let mut c = EvalCounter::default();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(closest_proposal(2.2, &all, &ps, SearchMode::Auto, &mut c).unwrap(), 2);
        assert_eq!(c.search, 0);
        // equidistant between locations 1 and 4 (indices 1 and 4): lowest index
        let tied = [4, 1];
        assert_eq!(closest_proposal(2.5, &tied, &ps, SearchMode::Auto, &mut c).unwrap(), 1);
        assert_eq!(
            closest_proposal(2.5, &tied, &ps, SearchMode::Exhaustive, &mut c).unwrap(),
            1
        );
        assert_eq!(c.search, 2);
        assert_eq!(closest_proposal(-9.0, &[5], &ps, SearchMode::Auto, &mut c).unwrap(), 5);
        assert_eq!(
            closest_proposal(0.0, &[], &ps, SearchMode::Auto, &mut c),
            Err(Error::EmptyCandidates)
        );
    }

    #[test]
    fn mixed_shapes_fall_back_to_densities() {
        // a wide proposal far away beats a narrow close one far in the tail
        let ps = ProposalSet::new(vec![
            Family::from(GaussianParams::new(0.0, 0.01).unwrap()),
            Family::from(StudentTParams::new(3.0, 4.0, 3.0).unwrap()),
        ])
        .unwrap();
        assert!(!ps.shares_shape());
        let mut c = EvalCounter::default();
        assert_eq!(closest_proposal(1.0, &[0, 1], &ps, SearchMode::Auto, &mut c).unwrap(), 1);
        assert_eq!(c.search, 2);
    }

    #[test]
    fn config_validation() {
        assert!(HereticalConfig::new(0, 0.5).is_err());
        assert!(HereticalConfig::new(2, 1.5).is_err());
        assert!(HereticalConfig::new(2, f64::NAN).is_err());
        let c = HereticalConfig::new(16, 0.1).unwrap();
        assert_eq!(c.weight_driven_quota(32), 4);
        assert_eq!(HereticalConfig::new(4, 0.0).unwrap().weight_driven_quota(32), 0);
        assert_eq!(HereticalConfig::new(4, 1.0).unwrap().weight_driven_quota(32), 32);
    }

    #[test]
    fn input_validation() {
        let ps = gaussians(&[0.0, 1.0, 2.0], 1.0);
        let ss = SampleSet::from_values(vec![0.0, 1.0, 2.0], 3, 1).unwrap();
        let wv = WeightVector::new(vec![1.0, 2.0, 3.0], WeightScheme::Standard).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut c = EvalCounter::default();
        let cfg = HereticalConfig::new(2, 1.0).unwrap();
        assert!(matches!(
            heretical_partition(&ss, &wv, &ps, &cfg, &mut rng, &mut c),
            Err(Error::IndivisiblePartition { .. })
        ));
        let short = WeightVector::new(vec![1.0], WeightScheme::Standard).unwrap();
        let cfg = HereticalConfig::new(3, 1.0).unwrap();
        assert!(matches!(
            heretical_partition(&ss, &short, &ps, &cfg, &mut rng, &mut c),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn single_subset_takes_everything() {
        let ps = gaussians(&[0.0, 1.0], 1.0);
        let ss = SampleSet::from_values(vec![5.0, -5.0], 2, 1).unwrap();
        let wv = WeightVector::new(vec![0.1, 9.0], WeightScheme::Standard).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut c = EvalCounter::default();
        let cfg = HereticalConfig::new(1, 1.0).unwrap();
        let out = heretical_partition(&ss, &wv, &ps, &cfg, &mut rng, &mut c).unwrap();
        assert_eq!(out.partition.subsets(), &[vec![0, 1]]);
    }
}
