use conehull::closed_forms_table;
use conehull::{run, verify_all, with_workers, ExperimentConfig, ExperimentKind, HarnessError, Preset, Status};
use conehull_core::closed_forms::OracleValue;

fn poisson_f(seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(ExperimentKind::PoissonF).with_param("d", 2.0).with_param("gamma", 2.0);
    cfg.replicates = 2000;
    cfg.seed = seed;
    cfg
}

#[test]
fn poisson_facets_join_their_oracle() {
    let report = run(&poisson_f(7)).unwrap();
    let row = report.rows.iter().find(|r| r.target_id == "f_1").unwrap();
    assert!(matches!(row.oracle, OracleValue::Finite(o) if (o - 6.0).abs() < 1e-9));
    assert!(row.z_score.unwrap().abs() <= 4.0);
    assert_eq!(row.status, Status::Pass);
    assert!(report.all_pass());
}

#[test]
fn one_dimensional_buchta_rows_are_exact() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Buchta)
        .with_param("d", 1.0)
        .with_param("n", 10.0)
        .with_param("k", 1.0);
    cfg.replicates = 500;
    let report = run(&cfg).unwrap();
    let exact = report.rows.iter().find(|r| r.target_id == "buchta_exact").unwrap();
    assert_eq!(exact.mean, Some(2.0));
    assert!(matches!(exact.oracle, OracleValue::Finite(v) if v == 2.0));
    assert!(report.all_pass());
}

#[test]
fn same_config_gives_byte_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut bytes = Vec::new();
    for (i, workers) in [Some(1), Some(4)].into_iter().enumerate() {
        let mut cfg = poisson_f(11);
        cfg.replicates = 300;
        cfg.workers = workers;
        cfg.output = Some(dir.path().join(format!("r{i}.csv")));
        run(&cfg).unwrap();
        bytes.push(std::fs::read(cfg.output.unwrap()).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn invalid_config_is_rejected_before_running() {
    let cfg = ExperimentConfig::new(ExperimentKind::Intrinsic).with_param("d", 2.0);
    assert!(matches!(run(&cfg), Err(HarnessError::Config(_))));
}

#[test]
fn estimator_errors_become_rows() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Intrinsic)
        .with_param("d", 2.0)
        .with_param("gamma", 2.0)
        .with_param("k", 5.0);
    cfg.replicates = 10;
    let report = run(&cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].status, Status::Error);
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn every_kind_runs_on_a_small_config() {
    let cases: Vec<ExperimentConfig> = vec![
        poisson_f(1),
        ExperimentConfig::new(ExperimentKind::PoissonT)
            .with_param("d", 2.0)
            .with_param("gamma", 3.0)
            .with_param("a", 1.0)
            .with_param("b", 1.0),
        ExperimentConfig::new(ExperimentKind::SymmetricT)
            .with_param("d", 2.0)
            .with_param("gamma", 3.0)
            .with_param("a", 0.0)
            .with_param("b", 0.0),
        ExperimentConfig::new(ExperimentKind::PoissonVolume).with_param("d", 3.0).with_param("gamma", 4.0),
        ExperimentConfig::new(ExperimentKind::Intrinsic)
            .with_param("d", 3.0)
            .with_param("gamma", 3.0)
            .with_param("k", 2.0),
        ExperimentConfig::new(ExperimentKind::BConstant).with_param("d", 2.0).with_param("k", 1.0),
        ExperimentConfig::new(ExperimentKind::ConeLimit).with_param("d", 2.0).with_list("n_grid", vec![4.0, 8.0]),
        ExperimentConfig::new(ExperimentKind::ConicProfile).with_param("d", 2.0).with_param("n", 5.0),
        ExperimentConfig::new(ExperimentKind::SamplerTests),
    ];
    for mut cfg in cases {
        cfg.replicates = cfg.replicates.min(400);
        let report = run(&cfg).unwrap();
        assert!(!report.rows.is_empty(), "{}", cfg.kind);
        assert!(report.rows.iter().all(|r| r.status != Status::Error), "{}: {:?}", cfg.kind, report.rows);
    }
}

#[test]
fn verify_report_follows_the_manifest() {
    let preset = Preset::smoke();
    let report = with_workers(Some(2), || verify_all(&preset)).unwrap();
    let manifest = preset.manifest();
    // One result per manifest entry, then the identity check.
    assert_eq!(report.checks.len(), manifest.len() + 1);
    for ((criterion, id), check) in manifest.iter().zip(&report.checks) {
        assert_eq!((*criterion, *id), (check.criterion, check.id.as_str()));
        assert!(!check.rows.is_empty());
    }
    for c in 1..=10 {
        assert!(report.criterion_passed(c).is_some());
    }
}

#[test]
fn corrupted_oracle_fails_the_suite() {
    let preset = Preset::smoke().with_override("infinity_branches/infinite_iff_condition", 1.0);
    let report = verify_all(&preset);
    assert_eq!(report.criterion_passed(10), Some(false));
    assert_eq!(report.exit_code(), 1);
}

#[test]
fn oracle_table_lists_known_values() {
    let report = closed_forms_table(2, 2.0, 2.0, 1.0, 1.0).unwrap();
    let value = |id: &str| report.rows.iter().find(|r| r.target_id == id).unwrap().oracle;
    assert!(matches!(value("f_1"), OracleValue::Finite(v) if (v - 6.0).abs() < 1e-9));
    assert!(matches!(value("volume"), OracleValue::Finite(v) if (v - 0.5).abs() < 1e-9));
    assert_eq!(value("B_3_2"), OracleValue::Finite(0.0));
    assert!(matches!(closed_forms_table(2, 1.0, 1.0, 1.0, 1.0).unwrap().rows.iter().find(|r| r.target_id == "volume").unwrap().oracle, OracleValue::Infinite));
}
