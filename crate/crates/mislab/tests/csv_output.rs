use mislab::report::{write_runs, write_summary, RUN_HEADER, SUMMARY_HEADER};
use mislab::{builtin_example1, run_experiment, write_csv, Experiment};

fn small_rows() -> Vec<mislab::SummaryRow> {
    let mut cfg = builtin_example1();
    cfg.n_runs = 25;
    cfg.k_values = vec![1, 3];
    cfg.schemes = vec!["dm".into(), "h-dm".into()];
    run_experiment(&cfg).unwrap()
}

#[test]
fn one_row_gives_header_plus_one_line() {
    let rows = small_rows();
    let mut buf = Vec::new();
    write_summary(&rows[..1], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], SUMMARY_HEADER.join(","));
    assert_eq!(lines[1].split(',').count(), SUMMARY_HEADER.len());
}

#[test]
fn floats_round_trip_exactly() {
    let rows = small_rows();
    let mut buf = Vec::new();
    write_summary(&rows, &mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    for (rec, row) in reader.records().zip(&rows) {
        let rec = rec.unwrap();
        assert_eq!(rec.len(), 17);
        assert_eq!(&rec[0], row.scheme.name());
        assert_eq!(rec[1].parse::<usize>().unwrap(), row.subsets);
        let back = |i: usize| rec[i].parse::<f64>().unwrap().to_bits();
        assert_eq!(back(6), row.mse_self_normalized.to_bits());
        assert_eq!(back(7), row.mse_unnormalized.to_bits());
        assert_eq!(back(12), row.mean_z_hat.to_bits());
        assert_eq!(back(13), row.mean_max_normalized_weight.to_bits());
        assert_eq!(rec[16].parse::<u64>().unwrap(), row.base_seed);
    }
}

#[test]
fn identical_invocations_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    write_csv(&small_rows(), &a).unwrap();
    write_csv(&small_rows(), &b).unwrap();
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn empty_summary_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(write_csv(&[], &dir.path().join("x.csv")).is_err());
}

#[test]
fn run_dump_has_one_line_per_replication() {
    let mut cfg = builtin_example1();
    cfg.n_runs = 7;
    cfg.k_values = vec![2];
    cfg.schemes = vec!["p-dm".into()];
    let exp = Experiment::from_config(&cfg).unwrap();
    let runs: Vec<_> = mislab::experiment::run_cells(&exp)
        .unwrap()
        .into_iter()
        .flat_map(|c| c.runs)
        .collect();
    let mut buf = Vec::new();
    write_runs(&runs, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().all(|l| l.split(',').count() == RUN_HEADER.len()));
}
