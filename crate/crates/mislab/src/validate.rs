//! Acceptance checks, shared by `mislab validate` and the `acceptance` test target.
//!
//! Each check runs at a fixed scale and tolerance and returns a
//! [`CriterionReport`]; a check passes only if its condition holds and it
//! finished within its time limit.

use std::fmt;
use std::time::{Duration, Instant};

use mislab_core::{
    draw_mis_samples, eval_gaussian, eval_student_t, heretical_partition, random_partition,
    run_scheme, weights_dm, weights_partial, weights_standard, EvalCounter, GaussianParams,
    HereticalConfig, ProposalSet, Provenance, SampleSet, Scheme, SearchMode, StudentTParams,
    WeightScheme, WeightVector,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{builtin_example1, builtin_example2, Experiment, ExperimentConfig};
use crate::error::Result;
use crate::experiment::{run_cell, run_cells, setup, CellResult};
use crate::quadrature::integrate_real_line;
use crate::seed::run_rng;
use crate::stats::{bootstrap_se, mean, population_variance, standard_error};

const BOOTSTRAP_RESAMPLES: usize = 1000;
const BOOTSTRAP_SEED: u64 = 0xb007;

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {} {} ({:.2} s, limit {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

fn timed(
    id: u8,
    name: &'static str,
    limit_secs: u64,
    check: impl FnOnce() -> Result<(bool, String)>,
) -> Result<CriterionReport> {
    let start = Instant::now();
    let (ok, detail) = check()?;
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    Ok(CriterionReport {
        id,
        name,
        passed: ok && elapsed < limit,
        detail,
        elapsed,
        limit,
    })
}

fn bits_equal(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}

fn example(cfg: ExperimentConfig, edit: impl FnOnce(&mut ExperimentConfig)) -> Result<Experiment> {
    let mut cfg = cfg;
    edit(&mut cfg);
    Experiment::from_config(&cfg)
}

fn cell(cells: &[CellResult], scheme: Scheme, subsets: usize, k: usize) -> &CellResult {
    cells
        .iter()
        .find(|c| c.summary.scheme == scheme && c.summary.subsets == subsets && c.summary.k == k)
        .expect("cell present in experiment")
}

fn mse_of(xs: &[f64], truth: f64) -> f64 {
    xs.iter().map(|x| (x - truth) * (x - truth)).sum::<f64>() / xs.len() as f64
}

/// Bootstrap standard error of the MSE of `xs` around `truth`.
fn mse_se(xs: &[f64], truth: f64) -> f64 {
    let sq: Vec<f64> = xs.iter().map(|x| (x - truth) * (x - truth)).collect();
    bootstrap_se(&sq, mean, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED)
}

/// Partial weights with `P = 1` and `P = N` reproduce full-DM and standard
/// weights bit for bit; a heretical run with `alpha = 0` reproduces the
/// a-priori random-partition run drawn from the same stream.
pub fn criterion_1() -> Result<CriterionReport> {
    timed(1, "exact degeneracies", 5, || {
        let exp = Experiment::from_config(&builtin_example1())?;
        let (ps, t) = (&exp.proposals, &exp.target);
        let n = ps.len();
        let mut failures = 0;
        for s in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let ss = draw_mis_samples(ps, 1, &mut rng)?;
            let mut c = EvalCounter::default();
            let std = weights_standard(&ss, ps, t, &mut c)?;
            let dm = weights_dm(&ss, ps, t, &mut c)?;
            let whole = random_partition(n, 1, &mut rng)?;
            let single = random_partition(n, n, &mut rng)?;
            let p1 = weights_partial(&ss, ps, t, &whole, &mut c)?;
            let pn = weights_partial(&ss, ps, t, &single, &mut c)?;
            if !bits_equal(p1.as_slice(), dm.as_slice()) || !bits_equal(pn.as_slice(), std.as_slice()) {
                failures += 1;
            }
            for p in [1, 2, 4, 8, 16, 32] {
                let mut a = ChaCha8Rng::seed_from_u64(s + 10_000);
                let mut b = a.clone();
                let mut su = setup(&exp, p, 1);
                let pdm = run_scheme(Scheme::PartialDm, &su, &mut a)?;
                su.alpha = 0.0;
                let hdm = run_scheme(Scheme::HereticalDm, &su, &mut b)?;
                if !bits_equal(pdm.weights.as_slice(), hdm.weights.as_slice())
                    || pdm.partition != hdm.partition
                {
                    failures += 1;
                }
            }
        }
        Ok((failures == 0, format!("{failures} mismatches over 100 sample sets")))
    })
}

/// Var(I^) under DM <= p-DM <= s-MIS on Example 1 with k = 1, P = 16, and
/// the DM vs s-MIS gap beyond two bootstrap standard errors.
pub fn criterion_2() -> Result<CriterionReport> {
    timed(2, "variance ordering DM <= p-DM <= s-MIS", 30, || {
        let exp = example(builtin_example1(), |c| {
            c.schemes = vec!["s-mis".into(), "dm".into(), "p-dm".into()];
            c.k_values = vec![1];
            c.p_values = vec![16];
            c.n_runs = 5000;
        })?;
        let cells = run_cells(&exp)?;
        let smis = cell(&cells, Scheme::StandardMis, 32, 1).unnormalized();
        let dm = cell(&cells, Scheme::DeterministicMixture, 1, 1).unnormalized();
        let pdm = cell(&cells, Scheme::PartialDm, 16, 1).unnormalized();
        let (vs, vd, vp) = (
            population_variance(&smis),
            population_variance(&dm),
            population_variance(&pdm),
        );
        let se = |xs: &[f64]| bootstrap_se(xs, population_variance, BOOTSTRAP_RESAMPLES, BOOTSTRAP_SEED);
        let gap_se = (se(&smis).powi(2) + se(&dm).powi(2)).sqrt();
        let ok = vd <= vp && vp <= vs && vs - vd > 2.0 * gap_se;
        Ok((
            ok,
            format!(
                "Var DM {vd:.4e}, p-DM {vp:.4e}, s-MIS {vs:.4e}; outer gap {:.4e} vs 2 SE {:.4e}",
                vs - vd,
                2.0 * gap_se
            ),
        ))
    })
}

/// MSE of the self-normalized estimator on Example 1 ordered
/// DM <= h-DM <= p-DM <= s-MIS at every k, with h-DM below p-DM by more than
/// two bootstrap standard errors for at least four k.
pub fn criterion_3() -> Result<CriterionReport> {
    timed(3, "example 1 MSE ordering", 120, || {
        let exp = example(builtin_example1(), |c| c.n_runs = 5000)?;
        let truth = exp.target.reference_mean();
        let cells = run_cells(&exp)?;
        let mut ordered = 0;
        let mut separated = 0;
        let mut detail = Vec::new();
        for &k in &exp.k_values {
            let get = |s, p| cell(&cells, s, p, k).self_normalized();
            let (s, d, p, h) = (
                get(Scheme::StandardMis, 32),
                get(Scheme::DeterministicMixture, 1),
                get(Scheme::PartialDm, 16),
                get(Scheme::HereticalDm, 16),
            );
            let (ms, md, mp, mh) = (mse_of(&s, truth), mse_of(&d, truth), mse_of(&p, truth), mse_of(&h, truth));
            if md <= mh && mh <= mp && mp <= ms {
                ordered += 1;
            }
            let se = (mse_se(&h, truth).powi(2) + mse_se(&p, truth).powi(2)).sqrt();
            if mp - mh > 2.0 * se {
                separated += 1;
            }
            detail.push(format!("k={k}: {md:.3} <= {mh:.3} <= {mp:.3} <= {ms:.3}"));
        }
        let nk = exp.k_values.len();
        Ok((
            ordered == nk && separated >= 4,
            format!("ordered at {ordered}/{nk} k, h-DM < p-DM beyond 2 SE at {separated}/{nk}; {}", detail.join("; ")),
        ))
    })
}

/// On Example 2 (alpha = 0.1) h-DM has MSE no larger than p-DM for both
/// estimators at P in {2, 4, 8, 16}, and at P in {1, 32} the two schemes
/// produce identical weights run by run.
pub fn criterion_4() -> Result<CriterionReport> {
    timed(4, "example 2 h-DM vs p-DM", 120, || {
        let exp = example(builtin_example2(), |c| c.n_runs = 5000)?;
        let cells = run_cells(&exp)?;
        let mut ok = true;
        let mut detail = Vec::new();
        for p in [2, 4, 8, 16] {
            let h = &cell(&cells, Scheme::HereticalDm, p, 1).summary;
            let q = &cell(&cells, Scheme::PartialDm, p, 1).summary;
            ok &= h.mse_unnormalized <= q.mse_unnormalized
                && h.mse_self_normalized <= q.mse_self_normalized;
            detail.push(format!(
                "P={p}: I^ {:.4} vs {:.4}, I~ {:.4} vs {:.4}",
                h.mse_unnormalized, q.mse_unnormalized, h.mse_self_normalized, q.mse_self_normalized
            ));
        }
        // endpoints: both schemes replayed from the same per-run stream
        let mut mismatches = 0;
        for p in [1, 32] {
            let su = setup(&exp, p, 1);
            for run in 0..exp.n_runs {
                let mut a = run_rng(exp.base_seed, Scheme::PartialDm, p, 1, run);
                let mut b = a.clone();
                let pdm = run_scheme(Scheme::PartialDm, &su, &mut a)?;
                let hdm = run_scheme(Scheme::HereticalDm, &su, &mut b)?;
                if !bits_equal(pdm.weights.as_slice(), hdm.weights.as_slice()) {
                    mismatches += 1;
                }
            }
        }
        ok &= mismatches == 0;
        detail.push(format!("P in {{1,32}}: {mismatches} weight mismatches"));
        Ok((ok, detail.join("; ")))
    })
}

/// |mean(Z^) - 1| < 3 SE over 10^4 Example 1 runs for s-MIS, DM and p-DM.
pub fn criterion_5() -> Result<CriterionReport> {
    timed(5, "Z^ unbiasedness", 60, || {
        let exp = example(builtin_example1(), |c| {
            c.k_values = vec![1];
            c.p_values = vec![16];
            c.n_runs = 10_000;
        })?;
        let mut ok = true;
        let mut detail = Vec::new();
        for (scheme, p) in [(Scheme::StandardMis, 32), (Scheme::DeterministicMixture, 1), (Scheme::PartialDm, 16)] {
            let z: Vec<f64> = run_cell(&exp, scheme, p, 1)?.iter().map(|r| r.record.z_hat).collect();
            let (m, se) = (mean(&z), standard_error(&z));
            let pass = (m - 1.0).abs() < 3.0 * se;
            ok &= pass;
            detail.push(format!("{scheme}: mean {m:.4} (3 SE {:.4}) {}", 3.0 * se, if pass { "ok" } else { "out" }));
        }
        Ok((ok, detail.join("; ")))
    })
}

/// Exact evaluation counts with k = 1, N = 32, P = 16.
pub fn criterion_6() -> Result<CriterionReport> {
    timed(6, "evaluation counts", 5, || {
        let exp = Experiment::from_config(&builtin_example1())?;
        let mut ok = true;
        let mut max_search = 0;
        for run in 0..20 {
            for (scheme, p, want) in [
                (Scheme::StandardMis, 32, 32),
                (Scheme::DeterministicMixture, 1, 1024),
                (Scheme::PartialDm, 16, 64),
                (Scheme::HereticalDm, 16, 64),
            ] {
                for search in [SearchMode::Auto, SearchMode::Exhaustive] {
                    let mut su = setup(&exp, p, 1);
                    su.search = search;
                    let r = run_scheme(scheme, &su, &mut run_rng(1, scheme, p, 1, run))?.record;
                    ok &= r.proposal_evals == want && r.target_evals == 32;
                    if scheme == Scheme::HereticalDm {
                        match search {
                            SearchMode::Auto => ok &= r.search_evals == 0,
                            SearchMode::Exhaustive => {
                                ok &= r.search_evals > 0 && r.search_evals <= 1024;
                                max_search = max_search.max(r.search_evals);
                            }
                        }
                    } else {
                        ok &= r.search_evals == 0;
                    }
                }
            }
        }
        Ok((
            ok,
            format!("s-MIS 32, DM 1024, p-DM 64, h-DM 64; exhaustive search <= {max_search} (cap 1024), shortcut 0"),
        ))
    })
}

/// Mean max normalized weight of h-DM (P = 16, alpha = 1) below s-MIS by
/// more than two standard errors on Example 1.
pub fn criterion_7() -> Result<CriterionReport> {
    timed(7, "largest-weight attenuation", 30, || {
        let exp = example(builtin_example1(), |c| c.n_runs = 5000)?;
        let pick = |scheme, p| -> Result<Vec<f64>> {
            Ok(run_cell(&exp, scheme, p, 1)?.iter().map(|r| r.record.max_normalized_weight).collect())
        };
        let h = pick(Scheme::HereticalDm, 16)?;
        let s = pick(Scheme::StandardMis, 32)?;
        let se = (standard_error(&h).powi(2) + standard_error(&s).powi(2)).sqrt();
        let (mh, ms) = (mean(&h), mean(&s));
        Ok((
            ms - mh > 2.0 * se,
            format!("h-DM {mh:.4} vs s-MIS {ms:.4}, gap {:.4} vs 2 SE {:.4}", ms - mh, 2.0 * se),
        ))
    })
}

/// The hand-traced 4-proposal fixture and the alpha quota.
pub fn criterion_8() -> Result<CriterionReport> {
    timed(8, "clustering fixtures", 5, || {
        let ps = ProposalSet::new(
            [0.0, 10.0, 20.0, 30.0]
                .into_iter()
                .map(|m| GaussianParams::new(m, 1.0).map(Into::into))
                .collect::<mislab_core::Result<_>>()?,
        )?;
        let ss = SampleSet::from_values(vec![26.0, 9.0, 14.0, 31.0], 4, 1)?;
        let wv = WeightVector::new(vec![3.0, 1.0, 5.0, 2.0], WeightScheme::Standard)?;
        let cfg = HereticalConfig::new(2, 1.0)?;
        let out = heretical_partition(&ss, &wv, &ps, &cfg, &mut ChaCha8Rng::seed_from_u64(0), &mut EvalCounter::default())?;
        // 1-based {{3,2},{1,4}}
        let fixture_ok = out.partition.subsets() == [vec![1, 2], vec![0, 3]];

        let exp = Experiment::from_config(&builtin_example2())?;
        let mut quota_ok = true;
        for (p, alpha) in [(16, 0.1), (4, 0.25), (2, 0.5)] {
            let cfg = HereticalConfig::new(p, alpha)?;
            let quota = cfg.weight_driven_quota(32);
            for s in 0..50 {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let ss = draw_mis_samples(&exp.proposals, 1, &mut rng)?;
                let wv = weights_standard(&ss, &exp.proposals, &exp.target, &mut EvalCounter::default())?;
                let out = heretical_partition(&ss, &wv, &exp.proposals, &cfg, &mut rng, &mut EvalCounter::default())?;
                let driven = out
                    .allocations
                    .iter()
                    .take_while(|a| a.provenance != Provenance::RandomFill)
                    .count();
                quota_ok &= driven >= quota
                    && driven <= quota + 1
                    && out.allocations[driven..].iter().all(|a| a.provenance == Provenance::RandomFill);
            }
        }
        Ok((
            fixture_ok && quota_ok,
            format!("fixture {{{{3,2}},{{1,4}}}} {}, alpha quota {}", pass(fixture_ok), pass(quota_ok)),
        ))
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "reproduced"
    } else {
        "VIOLATED"
    }
}

/// Every density in both examples integrates to one within 1e-8, and a
/// Student-t with 10^6 dof is within 1e-6 of the Gaussian.
pub fn criterion_9() -> Result<CriterionReport> {
    timed(9, "density layer", 5, || {
        let mut worst: f64 = 0.0;
        for cfg in [builtin_example1(), builtin_example2()] {
            let exp = Experiment::from_config(&cfg)?;
            let t = &exp.target;
            let z = t.normalizing_constant();
            worst = worst.max((integrate_real_line(&|x| t.unnormalized(x).unwrap() / z, 40.0, 1e-11) - 1.0).abs());
            for q in exp.proposals.iter() {
                worst = worst.max((integrate_real_line(&|x| q.pdf(x).unwrap(), 40.0, 1e-11) - 1.0).abs());
            }
        }
        let mut limit_gap: f64 = 0.0;
        for (mu, var) in [(0.0, 1.0), (2.0, 3.0), (-3.0, 0.5)] {
            let t = StudentTParams::new(mu, var, 1e6)?;
            let g = GaussianParams::new(mu, var)?;
            let sd = f64::sqrt(var);
            for i in 0..=2000 {
                let x = mu - 5.0 * sd + 10.0 * sd * i as f64 / 2000.0;
                limit_gap = limit_gap.max((eval_student_t(x, &t)? - eval_gaussian(x, &g)?).abs());
            }
        }
        Ok((
            worst < 1e-8 && limit_gap < 1e-6,
            format!("max |integral - 1| = {worst:.2e} (tol 1e-8); t-Gaussian gap {limit_gap:.2e} (tol 1e-6)"),
        ))
    })
}

pub fn criterion(id: u8) -> Result<CriterionReport> {
    match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        _ => Err(crate::HarnessError::Config(format!("no criterion {id}"))),
    }
}

/// Criteria exercised by each built-in example.
pub fn criteria_for_example(example: u8) -> &'static [u8] {
    match example {
        1 => &[1, 2, 3, 5, 6, 7, 8, 9],
        2 => &[4, 8, 9],
        _ => &[],
    }
}

pub fn run_example_suite(example: u8) -> Result<Vec<CriterionReport>> {
    let ids = criteria_for_example(example);
    if ids.is_empty() {
        return Err(crate::HarnessError::Config(format!("unknown example {example}")));
    }
    ids.iter().map(|&id| criterion(id)).collect()
}
