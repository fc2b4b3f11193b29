use std::path::Path;
use std::process::Command;

use mesochaos_harness::{ExperimentSpec, ResultRecord};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mesochaos"))
}

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn csv_files(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

#[test]
fn shipped_configs_validate() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let spec = ExperimentSpec::from_path(&path).unwrap_or_else(|e| panic!("{e}"));
        spec.resolve()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let out = bin()
            .arg(spec.kind.name())
            .arg("--config")
            .arg(&path)
            .arg("--check")
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        count += 1;
    }
    assert!(count >= 9);
}

#[test]
fn run_writes_record_to_env_dir_and_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let config = configs().join("selberg-table.json");
    for _ in 0..2 {
        let out = bin()
            .args(["selberg-table", "--config"])
            .arg(&config)
            .env("MESOCHAOS_OUT", dir.path())
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let files = csv_files(dir.path());
    assert_eq!(files.len(), 2);
    let a = ResultRecord::read(&files[0]).unwrap();
    let b = ResultRecord::read(&files[1]).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.meta.anchor, "Thm 1.3");

    let out = bin()
        .arg("plot")
        .arg(&files[0])
        .args(["--style", "loglog-decay"])
        .output()
        .unwrap();
    assert!(!out.status.success(), "selberg table has no decay columns");
}

#[test]
fn out_flag_seed_override_and_figure() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["sine-laplace", "--config"])
        .arg(configs().join("sine-laplace.toml"))
        .arg("--out")
        .arg(dir.path())
        .args(["--seed", "99", "--threads", "2"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files = csv_files(dir.path());
    let rec = ResultRecord::read(&files[0]).unwrap();
    assert_eq!(rec.meta.seed, 99);
    assert!(files[0].with_extension("svg").exists());
}

#[test]
fn kind_mismatch_and_bad_spec_rejected() {
    let out = bin()
        .args(["bo-check", "--config"])
        .arg(configs().join("selberg-table.toml"))
        .arg("--check")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("does not match"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "kind = \"gmc-simulate\"\n[params]\ngamma = 1.5\nq = 2\nalpha = 2.0\n",
    )
    .unwrap();
    let out = bin()
        .args(["gmc-simulate", "--check", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("γ²q < 2") && err.contains("alpha"), "{err}");
}
