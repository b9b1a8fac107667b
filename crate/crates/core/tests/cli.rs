use std::fs;
use std::path::Path;
use std::process::Command;

use adelic_walks::experiments::report::Summary;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_adelic-walks"))
}

fn write_config(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn survival_run_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "survival.cfg",
        "experiment = survival\nsigma = 2:1\nb = 1\nm = 1, 2\nT = 1\nlambda = 1\nN = 2000\n",
    );
    let out = dir.path().join("out");
    let status = bin()
        .args(["survival", "--config"])
        .arg(&cfg)
        .args(["--seed", "17", "--workers", "2", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: Summary = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary.experiment, "survival");
    assert_eq!(summary.seed, 17);
    assert_eq!(summary.failures, 0);
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), summary.rows + 1);
    assert!(csv.starts_with("experiment,params,metric,empirical,analytic,band,oracle,pass\n"));
}

#[test]
fn identical_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tight.cfg",
        "experiment = tightness\nsigma = 2:1, 3:1\nb = 1\nm = 3\nT = 1\ndelta = 0.5, 0.1\nlambda = 1, 2\nN = 500\n",
    );
    let mut outputs = Vec::new();
    for (run, workers) in [("a", "1"), ("b", "1"), ("c", "3")] {
        let out = dir.path().join(run);
        let status = bin()
            .args(["tightness", "--config"])
            .arg(&cfg)
            .args(["--workers", workers, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(fs::read(out.join("results.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn failing_row_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // A zero tolerance cannot hold for sampled frequencies.
    let cfg = write_config(dir.path(), "j.cfg", "experiment = jump-law\nsphere = 3:2\nN = 600\nuniform_tol = 0\n");
    let status = bin().args(["jump-law", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn bad_input_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "m.cfg", "experiment = moments\nsigma = 2:1\nb = 2\nr = 3\nm = 6\nt = 1, 2\n");
    let output = bin().args(["moments", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("r must lie in (0, b)"));

    let cfg = write_config(dir.path(), "s.cfg", "experiment = survival\nsigma = 2:1\nb = 1\nm = 1\nT = 1\nlambda = 1\n");
    let output = bin().args(["adelic", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn oracle_subcommand_evaluates_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.cfg",
        "experiment = oracle\nsigma = 2:1\nb = 1\nm = 1\nT = 1\nlambda = 1\n",
    );
    let out = dir.path().join("o");
    let status = bin().args(["oracle", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(csv.contains("oracle,p=2;b=1;sigma=1;m=1;T=1;lambda=1,survival,,0.5,,lemma1_survival,info"));
}
