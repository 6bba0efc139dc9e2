use moinst::algorithms::AlgorithmName;
use moinst::harness::{self, ExperimentConfig};

const CONFIG: &str = r#"
problems = ["zdt2-d2", "mmf1-d2"]
repetitions = 3
base_seed = 12
write_logs = true
[[search_transforms]]
kind = "sphered_rotation"
seed = 2
[[objective_transforms]]
kind = "identity"
[[objective_transforms]]
kind = "beta_cdf"
alpha = 2.0
beta = 0.5
[[algorithms]]
name = "random_search"
population = 10
budget = 300
[[algorithms]]
name = "smsemoa"
population = 10
budget = 300
[[algorithms]]
name = "moead"
population = 10
budget = 300
"#;

#[test]
fn stored_records_reproduce_in_memory_rows() {
    let cfg = ExperimentConfig::from_toml_str(CONFIG).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let summary = harness::run_experiment(&cfg, dir.path(), 2).unwrap();
    assert_eq!(summary.failed, 0);
    // identity, rotation, objective warp: 3 instances per problem
    assert_eq!(summary.jobs, 2 * 3 * 3 * 3);

    let stored = harness::load_rows(&dir.path().join(harness::RECORDS_FILE)).unwrap();
    let jobs = harness::expand_matrix(&cfg).unwrap();
    let records = harness::execute_collect(&jobs, 1).unwrap();
    let fresh = harness::rows_from_records(&records).unwrap();
    assert_eq!(stored, fresh);

    // the report pass is idempotent
    let again = harness::load_rows(&dir.path().join(harness::RECORDS_FILE)).unwrap();
    assert_eq!(
        harness::report::runs_table(&stored).to_csv_string().unwrap(),
        harness::report::runs_table(&again).to_csv_string().unwrap()
    );
    let csv = std::fs::read_to_string(dir.path().join(harness::RUNS_CSV)).unwrap();
    assert_eq!(csv, harness::report::runs_table(&stored).to_csv_string().unwrap());

    let logs = std::fs::read_dir(dir.path().join("logs")).unwrap().count();
    assert_eq!(logs, summary.jobs);
}

#[test]
fn hypervolumes_are_normalized() {
    let cfg = ExperimentConfig::from_toml_str(CONFIG).unwrap();
    let records = harness::execute_collect(&harness::expand_matrix(&cfg).unwrap(), 2).unwrap();
    let rows = harness::rows_from_records(&records).unwrap();
    for r in &rows {
        let hv = r.final_archive_hv.unwrap();
        assert!((0.0..=1.0).contains(&hv));
        assert!(r.final_pop_hv.unwrap() <= hv + 1e-12);
        // the archive only improves over time
        assert!(r.checkpoint_hvs.windows(2).all(|w| w[0] <= w[1] + 1e-12));
        assert_eq!(*r.checkpoint_evals.last().unwrap(), 300);
    }
    let relative = harness::report_relative_hv(&rows).unwrap();
    assert!(relative
        .iter()
        .any(|e| e.family == "beta-cdf-objective" && e.algorithm == AlgorithmName::Moead.as_str()));
}
