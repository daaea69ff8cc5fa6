use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// `P` disjoint equal-size subsets of proposal indices covering `0..N`.
///
/// Members of each subset are kept in ascending order, so mixture sums over a
/// subset always run in the same order regardless of how the subset was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    subsets: Vec<Vec<usize>>,
    subset_of: Vec<usize>,
}

impl Partition {
    /// Validates disjointness, coverage of `0..proposals` and equal subset sizes.
    pub fn new(mut subsets: Vec<Vec<usize>>, proposals: usize) -> Result<Self> {
        if subsets.is_empty() {
            return Err(Error::InvalidPartition("no subsets"));
        }
        let size = subsets[0].len();
        if size == 0 || subsets.iter().any(|s| s.len() != size) {
            return Err(Error::InvalidPartition("subsets must be non-empty and of equal size"));
        }
        if size * subsets.len() != proposals {
            return Err(Error::InvalidPartition("subsets do not cover the proposals exactly"));
        }
        let mut subset_of = vec![usize::MAX; proposals];
        for (p, s) in subsets.iter_mut().enumerate() {
            s.sort_unstable();
            for &j in s.iter() {
                if j >= proposals {
                    return Err(Error::InvalidPartition("proposal index out of range"));
                }
                if subset_of[j] != usize::MAX {
                    return Err(Error::InvalidPartition("subsets overlap"));
                }
                subset_of[j] = p;
            }
        }
        Ok(Self { subsets, subset_of })
    }

    /// One subset holding every proposal.
    pub fn whole(proposals: usize) -> Result<Self> {
        Self::new(vec![(0..proposals).collect()], proposals)
    }

    /// Every proposal in its own subset.
    pub fn singletons(proposals: usize) -> Result<Self> {
        Self::new((0..proposals).map(|j| vec![j]).collect(), proposals)
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    /// `P`.
    pub fn num_subsets(&self) -> usize {
        self.subsets.len()
    }

    /// `M`.
    pub fn subset_size(&self) -> usize {
        self.subsets[0].len()
    }

    /// `N`.
    pub fn num_proposals(&self) -> usize {
        self.subset_of.len()
    }

    pub fn subset_of(&self, proposal: usize) -> usize {
        self.subset_of[proposal]
    }

    /// Members of the subset containing `proposal`, ascending.
    pub fn members_of(&self, proposal: usize) -> &[usize] {
        &self.subsets[self.subset_of[proposal]]
    }
}

pub(crate) fn subset_size(proposals: usize, subsets: usize) -> Result<usize> {
    if subsets == 0 || proposals == 0 || !proposals.is_multiple_of(subsets) {
        return Err(Error::IndivisiblePartition { proposals, subsets });
    }
    Ok(proposals / subsets)
}

/// Fills empty slots with `unallocated` proposals in uniformly random order.
///
/// Slots are visited subset by subset; the shuffled proposals are dealt into
/// them in that order. With nothing allocated this is exactly a random
/// permutation of `0..N` chopped into consecutive blocks of `M`.
pub(crate) fn fill_randomly<R: Rng + ?Sized>(
    members: &mut [Vec<usize>],
    size: usize,
    mut unallocated: Vec<usize>,
    rng: &mut R,
) -> Vec<(usize, usize)> {
    unallocated.shuffle(rng);
    let mut placed = Vec::with_capacity(unallocated.len());
    let mut next = unallocated.into_iter();
    for (p, s) in members.iter_mut().enumerate() {
        while s.len() < size {
            match next.next() {
                Some(j) => {
                    s.push(j);
                    placed.push((j, p));
                }
                None => return placed,
            }
        }
    }
    placed
}

/// A-priori uniform random partition of `0..proposals` into `subsets` blocks.
pub fn random_partition<R: Rng + ?Sized>(
    proposals: usize,
    subsets: usize,
    rng: &mut R,
) -> Result<Partition> {
    let size = subset_size(proposals, subsets)?;
    let mut members = vec![Vec::with_capacity(size); subsets];
    fill_randomly(&mut members, size, (0..proposals).collect(), rng);
    Partition::new(members, proposals)
}
