use mesochaos_harness::record::Cell;
use mesochaos_harness::{
    emit_figure, run, ExperimentSpec, FigureStyle, HarnessError, Kind, ResultRecord,
};

fn spec(kind: Kind, toml_params: &str) -> ExperimentSpec {
    toml::from_str(&format!(
        "kind = \"{kind}\"\nseed = 11\n[params]\n{toml_params}"
    ))
    .unwrap()
}

fn column(rec: &ResultRecord, name: &str) -> Vec<f64> {
    rec.floats(name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn selberg_table_matches_quadrature() {
    let rec = run(&spec(
        Kind::SelbergTable,
        "q = 2\ngamma2 = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]\n",
    ))
    .unwrap();
    assert_eq!(rec.rows.len(), 9);
    let worst = column(&rec, "rel_gap").into_iter().fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
    assert_eq!(rec.meta.summary["all_pass"], true);
}

#[test]
fn bo_check_residuals() {
    let rec = run(&spec(Kind::BoCheck, "n = [4, 8, 16]\neps = 0.3\n")).unwrap();
    assert_eq!(rec.rows.len(), 15);
    assert!(column(&rec, "residual").iter().all(|r| *r < 1e-8));
    assert_eq!(rec.meta.anchor, "Thm 3.5");
    assert_eq!(rec.meta.conditions.len(), 3);
}

#[test]
fn zero_trials_give_metadata_only() {
    let rec = run(&spec(Kind::GmcSimulate, "trials = 0\n")).unwrap();
    assert!(rec.meta.metadata_only);
    assert!(rec.rows.is_empty());
    assert!(!rec.meta.columns.is_empty());
    let dir = tempfile::tempdir().unwrap();
    let paths = rec.write(dir.path()).unwrap();
    assert_eq!(ResultRecord::read(&paths.csv).unwrap(), rec);
    assert!(matches!(
        emit_figure(&rec, FigureStyle::MomentCompare),
        Err(HarnessError::EmptyRecord)
    ));
}

#[test]
fn reruns_are_bit_identical_across_thread_counts() {
    let s = spec(
        Kind::GmcSimulate,
        "eps = [0.1, 0.05]\ngamma = [0.3, 0.6]\nq = [1, 2]\ntrials = 50\n",
    );
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| run(&s))
        .unwrap();
    let three = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(|| run(&s))
        .unwrap();
    assert_eq!(one.rows, three.rows);
    assert_eq!(one.meta.snapshot, three.meta.snapshot);
    let mut other = s.clone();
    other.seed += 1;
    assert_ne!(run(&other).unwrap().rows, one.rows);
}

#[test]
fn record_round_trip_through_files() {
    let rec = run(&spec(Kind::SineGap, "lengths = [0.5, 1.0]\ntrials = 200\n")).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = rec.write(dir.path()).unwrap();
    let back = ResultRecord::read(&paths.csv).unwrap();
    assert_eq!(back, rec);
    assert!(paths
        .csv
        .file_name()
        .unwrap()
        .to_string_lossy()
        .starts_with("sine-gap-"));
}

#[test]
fn failing_rows_carry_error_codes() {
    // ε so small that the CUE symbol bandwidth exceeds its cap
    let rec = run(&spec(Kind::CueLaplace, "n = [64]\neps = [0.1, 1e-9]\n")).unwrap();
    assert_eq!(rec.rows.len(), 2);
    let status = rec.column("status").unwrap();
    assert_eq!(rec.rows[0][status], Cell::Str("ok".into()));
    assert_eq!(rec.rows[1][status], Cell::Str("truncation".into()));
    assert_eq!(rec.meta.summary["failed_rows"], 1);
}

#[test]
fn sine_laplace_decay_figure() {
    let rec = run(&spec(Kind::SineLaplace, "n = [4, 8, 16]\neps = 0.05\n")).unwrap();
    let fig = emit_figure(&rec, FigureStyle::LoglogDecay).unwrap();
    assert!(fig.slope.unwrap() < 0.0);
    assert!(fig.svg.contains("slope ="));
}

#[test]
fn cue_moments_compare_figure() {
    let rec = run(&spec(
        Kind::CueMoments,
        "n = [32, 64]\neps = 0.1\ngamma = 0.5\n",
    ))
    .unwrap();
    let fig = emit_figure(&rec, FigureStyle::MomentCompare).unwrap();
    assert_eq!(fig.ratios.len(), 2);
    assert!(
        fig.ratios.iter().all(|r| (r - 1.0).abs() < 0.05),
        "{:?}",
        fig.ratios
    );
    assert_eq!(fig.svg.matches("<polyline").count(), 3);
    assert!(rec.meta.conditions.iter().all(|c| c.c2_holds));
}

#[test]
fn gmc_density_snapshot_figure() {
    let rec = run(&spec(
        Kind::GmcSimulate,
        "eps = 0.1\ngamma = 0.5\nq = 2\ntrials = 20\n",
    ))
    .unwrap();
    let snap = rec.meta.snapshot.as_ref().unwrap();
    assert!(snap.density.iter().all(|d| *d > 0.0));
    assert!(emit_figure(&rec, FigureStyle::DensitySnapshot).is_ok());
}

#[test]
fn moment_kinds_refuse_supercritical() {
    let err = run(&spec(Kind::SineMoments, "gamma = 1.2\nq = 2\n")).unwrap_err();
    assert!(matches!(err, HarnessError::Invalid(_)));
}

#[test]
fn covariance_suite_passes() {
    let rec = run(&spec(
        Kind::CovarianceSuite,
        "eps = [0.1, 0.01, 0.001]\nu = [-1.0, -0.5, 0.0, 0.5, 1.0]\n",
    ))
    .unwrap();
    assert_eq!(rec.meta.summary["all_pass"], true);
    assert!(column(&rec, "halving_ratio").iter().all(|r| *r < 0.5));
}
