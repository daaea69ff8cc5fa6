//! Replicated runs over `(scheme, P, k)` cells and their MSE summaries.

use mislab_core::{run_scheme, EstimateRecord, RunSetup, Scheme};
use rayon::prelude::*;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::Result;
use crate::seed::{derive_seed, run_rng};
use crate::stats::{error_summary, mean};

/// One replication's estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunResult {
    pub scheme: Scheme,
    pub subsets: usize,
    pub k: usize,
    pub run: usize,
    pub record: EstimateRecord,
}

/// Aggregates for one `(scheme, P, k)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scheme: Scheme,
    pub subsets: usize,
    pub subset_size: usize,
    pub k: usize,
    pub samples: usize,
    pub n_runs: usize,
    pub mse_self_normalized: f64,
    pub mse_unnormalized: f64,
    pub variance_self_normalized: f64,
    pub variance_unnormalized: f64,
    pub bias_sq_self_normalized: f64,
    pub bias_sq_unnormalized: f64,
    pub mean_z_hat: f64,
    pub mean_max_normalized_weight: f64,
    pub mean_proposal_evals: f64,
    pub mean_search_evals: f64,
    pub base_seed: u64,
}

/// A summary together with the per-run records it was computed from.
#[derive(Debug, Clone)]
pub struct CellResult {
    pub summary: SummaryRow,
    pub runs: Vec<RunResult>,
}

impl CellResult {
    pub fn self_normalized(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.record.self_normalized).collect()
    }

    /// Unnormalized estimates; every built experiment has a known `Z`.
    pub fn unnormalized(&self) -> Vec<f64> {
        self.runs
            .iter()
            .map(|r| r.record.unnormalized.expect("normalizing constant is known"))
            .collect()
    }

    pub fn z_hat(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.record.z_hat).collect()
    }

    pub fn max_normalized_weight(&self) -> Vec<f64> {
        self.runs.iter().map(|r| r.record.max_normalized_weight).collect()
    }
}

pub fn setup(exp: &Experiment, subsets: usize, k: usize) -> RunSetup<'_> {
    RunSetup {
        proposals: &exp.proposals,
        target: &exp.target,
        per_proposal: k,
        subsets,
        alpha: exp.alpha,
        moment: exp.moment,
        search: exp.search,
    }
}

/// Runs every replication of one cell, in parallel, returned in run order.
pub fn run_cell(exp: &Experiment, scheme: Scheme, subsets: usize, k: usize) -> Result<Vec<RunResult>> {
    let setup = setup(exp, subsets, k);
    (0..exp.n_runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = run_rng(exp.base_seed, scheme, subsets, k, run);
            let out = run_scheme(scheme, &setup, &mut rng)?;
            Ok(RunResult {
                scheme,
                subsets,
                k,
                run,
                record: out.record,
            })
        })
        .collect()
}

pub fn summarize(exp: &Experiment, scheme: Scheme, subsets: usize, k: usize, runs: &[RunResult]) -> SummaryRow {
    let truth = exp.target.reference_mean();
    let pick = |f: fn(&EstimateRecord) -> f64| runs.iter().map(|r| f(&r.record)).collect::<Vec<_>>();
    let sn = error_summary(&pick(|r| r.self_normalized), truth);
    let un = error_summary(&pick(|r| r.unnormalized.unwrap_or(f64::NAN)), truth);
    let n = exp.proposals.len();
    SummaryRow {
        scheme,
        subsets,
        subset_size: n / subsets,
        k,
        samples: k * n,
        n_runs: runs.len(),
        mse_self_normalized: sn.mse,
        mse_unnormalized: un.mse,
        variance_self_normalized: sn.variance,
        variance_unnormalized: un.variance,
        bias_sq_self_normalized: sn.bias_sq,
        bias_sq_unnormalized: un.bias_sq,
        mean_z_hat: mean(&pick(|r| r.z_hat)),
        mean_max_normalized_weight: mean(&pick(|r| r.max_normalized_weight)),
        mean_proposal_evals: mean(&pick(|r| r.proposal_evals as f64)),
        mean_search_evals: mean(&pick(|r| r.search_evals as f64)),
        base_seed: exp.base_seed,
    }
}

/// Runs every cell of a built experiment.
pub fn run_cells(exp: &Experiment) -> Result<Vec<CellResult>> {
    exp.cells()
        .into_iter()
        .map(|(scheme, subsets, k)| {
            let runs = run_cell(exp, scheme, subsets, k)?;
            Ok(CellResult {
                summary: summarize(exp, scheme, subsets, k, &runs),
                runs,
            })
        })
        .collect()
}

/// Validates `cfg`, runs it, and returns one summary row per cell sorted by
/// `(scheme, P, k)`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<SummaryRow>> {
    let exp = Experiment::from_config(cfg)?;
    Ok(run_cells(&exp)?.into_iter().map(|c| c.summary).collect())
}

/// Seed of one run, exposed for replaying a single replication.
pub fn run_seed(exp: &Experiment, scheme: Scheme, subsets: usize, k: usize, run: usize) -> u64 {
    derive_seed(exp.base_seed, scheme, subsets, k, run)
}
