//! Multiple importance sampling with standard, deterministic-mixture,
//! partial deterministic-mixture and a-posteriori clustered ("heretical")
//! weights.
//!
//! The crate is `no_std` and needs only `alloc`. Randomness is supplied by the
//! caller through any [`rand::Rng`], so every result is reproducible from the
//! caller's seed.

#![no_std]

extern crate alloc;

pub mod clustering;
pub mod density;
mod error;
pub mod estimate;
pub mod mis;
pub mod partition;
pub mod pipeline;

pub use self::clustering::{
    closest_proposal, hdm_weights, heretical_partition, Allocation, HereticalConfig,
    HereticalOutcome, Provenance, SearchMode,
};
pub use self::density::{
    eval_gaussian, eval_mixture, eval_student_t, reference_mean, sample, Family, GaussianParams,
    MixtureSpec, StudentTParams, TargetSpec,
};
pub use self::error::{Error, Result};
pub use self::estimate::{
    estimate_self_normalized, estimate_unnormalized, estimate_z, EstimateRecord, MomentFunction,
};
pub use self::mis::{
    draw_mis_samples, normalize_weights, weights_dm, weights_partial, weights_partial_reusing,
    weights_standard, EvalCounter, ProposalSet, SampleSet, StandardTerms, WeightScheme,
    WeightVector,
};
pub use self::partition::{random_partition, Partition};
pub use self::pipeline::{run_scheme, RunOutput, RunSetup, Scheme};
