use mislab::{builtin_example1, builtin_example2, run_experiment, ExperimentConfig};
use mislab_core::Scheme;

#[test]
fn example1_has_twenty_cells() {
    let mut cfg = builtin_example1();
    cfg.n_runs = 10;
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 20);
    for r in &rows {
        let (p, evals) = match r.scheme {
            Scheme::StandardMis => (32, 32 * r.k),
            Scheme::DeterministicMixture => (1, 32 * 32 * r.k),
            Scheme::PartialDm | Scheme::HereticalDm => (16, 2 * 32 * r.k),
        };
        assert_eq!(r.subsets, p);
        assert_eq!(r.mean_proposal_evals, evals as f64);
    }
}

#[test]
fn example2_sweeps_subsets_for_both_partitioned_schemes() {
    let mut cfg = builtin_example2();
    cfg.n_runs = 10;
    let rows = run_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| matches!(r.scheme, Scheme::PartialDm | Scheme::HereticalDm)));
}

#[test]
fn seed_changes_results_and_is_recorded() {
    let mut cfg = builtin_example1();
    cfg.n_runs = 10;
    cfg.k_values = vec![1];
    let a = run_experiment(&cfg).unwrap();
    cfg.base_seed += 1;
    let b = run_experiment(&cfg).unwrap();
    assert_ne!(a[0].mse_self_normalized, b[0].mse_self_normalized);
    assert!(b.iter().all(|r| r.base_seed == cfg.base_seed));
}

#[test]
fn config_round_trips_through_toml() {
    for cfg in [builtin_example1(), builtin_example2()] {
        let text = cfg.to_toml().unwrap();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(back.to_toml().unwrap(), text);
    }
}

#[test]
fn bad_configs_are_rejected() {
    let edits: [fn(&mut ExperimentConfig); 4] = [
        |c| c.p_values = vec![5],
        |c| c.alpha = 1.5,
        |c| c.schemes = vec!["mystery".into()],
        |c| c.k_values = vec![0],
    ];
    for edit in edits {
        let mut cfg = builtin_example1();
        cfg.n_runs = 2;
        edit(&mut cfg);
        assert!(run_experiment(&cfg).is_err());
    }
}
