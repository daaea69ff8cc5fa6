//! CSV and console output.
//!
//! Floating-point fields are written in scientific notation with 17
//! significant digits, which round-trips every `f64` exactly.

use std::io::{self, Write};
use std::path::Path;

use crate::error::{HarnessError, Result};
use crate::experiment::{RunResult, SummaryRow};

pub const SUMMARY_HEADER: [&str; 17] = [
    "scheme",
    "P",
    "M",
    "k",
    "L",
    "n_runs",
    "mse_self_normalized",
    "mse_unnormalized",
    "variance_self_normalized",
    "variance_unnormalized",
    "bias_sq_self_normalized",
    "bias_sq_unnormalized",
    "mean_z_hat",
    "mean_max_normalized_weight",
    "mean_proposal_evals",
    "mean_search_evals",
    "base_seed",
];

pub const RUN_HEADER: [&str; 11] = [
    "scheme",
    "P",
    "k",
    "run",
    "self_normalized",
    "unnormalized",
    "z_hat",
    "max_normalized_weight",
    "target_evals",
    "proposal_evals",
    "search_evals",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn summary_record(r: &SummaryRow) -> Vec<String> {
    let mut out = vec![
        r.scheme.name().to_owned(),
        r.subsets.to_string(),
        r.subset_size.to_string(),
        r.k.to_string(),
        r.samples.to_string(),
        r.n_runs.to_string(),
    ];
    out.extend(
        [
            r.mse_self_normalized,
            r.mse_unnormalized,
            r.variance_self_normalized,
            r.variance_unnormalized,
            r.bias_sq_self_normalized,
            r.bias_sq_unnormalized,
            r.mean_z_hat,
            r.mean_max_normalized_weight,
            r.mean_proposal_evals,
            r.mean_search_evals,
        ]
        .map(fmt_f64),
    );
    out.push(r.base_seed.to_string());
    out
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(HarnessError::EmptyOutput);
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record(summary_record(r))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(HarnessError::EmptyOutput);
    }
    write_summary(rows, std::fs::File::create(path)?)
}

pub fn write_runs<W: Write>(runs: &[RunResult], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(RUN_HEADER)?;
    for r in runs {
        let rec = &r.record;
        w.write_record([
            r.scheme.name().to_owned(),
            r.subsets.to_string(),
            r.k.to_string(),
            r.run.to_string(),
            fmt_f64(rec.self_normalized),
            rec.unnormalized.map(fmt_f64).unwrap_or_default(),
            fmt_f64(rec.z_hat),
            fmt_f64(rec.max_normalized_weight),
            rec.target_evals.to_string(),
            rec.proposal_evals.to_string(),
            rec.search_evals.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_runs_csv(runs: &[RunResult], path: &Path) -> Result<()> {
    write_runs(runs, std::fs::File::create(path)?)
}

pub fn format_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:<6} {:>3} {:>3} {:>2} {:>4} {:>12} {:>12} {:>12} {:>12} {:>10} {:>10} {:>9}\n",
        "scheme", "P", "M", "k", "L", "mse(I~)", "mse(I^)", "bias2(I~)", "var(I^)", "E[Z^]", "E[max w]", "q evals"
    );
    for r in rows {
        s.push_str(&format!(
            "{:<6} {:>3} {:>3} {:>2} {:>4} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>10.4} {:>10.4} {:>9.0}\n",
            r.scheme.name(),
            r.subsets,
            r.subset_size,
            r.k,
            r.samples,
            r.mse_self_normalized,
            r.mse_unnormalized,
            r.bias_sq_self_normalized,
            r.variance_unnormalized,
            r.mean_z_hat,
            r.mean_max_normalized_weight,
            r.mean_proposal_evals,
        ));
    }
    s
}

pub fn print_table(rows: &[SummaryRow]) {
    let _ = io::stdout().write_all(format_table(rows).as_bytes());
}
