//! Command-line behavior: exit codes, config layering, file outputs.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::tempdir;

fn bk_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("bk binary runs")
}

#[test]
fn help_exits_zero() {
    let dir = tempdir().unwrap();
    let out = bk_in(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "simulate", "detect", "align", "fuse", "eval", "groups", "split",
        "pseudo-label", "tune", "report",
    ] {
        assert!(text.contains(sub), "help is missing '{sub}'");
    }
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempdir().unwrap();
    let out = bk_in(dir.path(), &["simulate", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_config_value_is_usage_error() {
    let dir = tempdir().unwrap();
    bk_in(dir.path(), &["simulate", "--out-dir", "c", "--n-videos", "5"]);
    let out = bk_in(
        dir.path(),
        &["detect", "--scores", "c/scores.bk", "--out", "p.bk", "--threshold", "1.5"],
    );
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn malformed_data_is_data_error() {
    let dir = tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.bk"),
        "bk1 scores\nv\t10.000000\t1.000000\t0.500000\t0.100000,2.000000\n",
    )
    .unwrap();
    let out = bk_in(dir.path(), &["detect", "--scores", "bad.bk", "--out", "p.bk"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("v"), "error should name the video: {msg}");
}

#[test]
fn missing_file_is_data_error() {
    let dir = tempdir().unwrap();
    let out = bk_in(dir.path(), &["detect", "--scores", "nope.bk", "--out", "p.bk"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_run_prints_resolved_config() {
    let dir = tempdir().unwrap();
    let out = bk_in(
        dir.path(),
        &["simulate", "--out-dir", "c", "--n-videos", "5", "--seed", "1"],
    );
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("# resolved config"), "{err}");
    assert!(err.contains("detect.threshold = 0.500000"), "{err}");
    assert!(err.contains("sim.seed = 1"), "{err}");
}

#[test]
fn config_file_sets_defaults_and_flags_override() {
    let dir = tempdir().unwrap();
    std::fs::write(
        dir.path().join("tool.cfg"),
        "sim.n_videos = 7\nsim.seed = 5\ndetect.threshold = 0.41\n",
    )
    .unwrap();
    // config file applies
    let out = bk_in(
        dir.path(),
        &["--config", "tool.cfg", "simulate", "--out-dir", "c1"],
    );
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sim.n_videos = 7"), "{err}");

    // flag wins over the file
    let out = bk_in(
        dir.path(),
        &["--config", "tool.cfg", "simulate", "--out-dir", "c2", "--n-videos", "9"],
    );
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sim.n_videos = 9"), "{err}");

    let scores = std::fs::read_to_string(dir.path().join("c1/scores.bk")).unwrap();
    assert_eq!(scores.lines().count(), 8, "7 videos plus header");
}

#[test]
fn unknown_config_key_is_usage_error() {
    let dir = tempdir().unwrap();
    std::fs::write(dir.path().join("tool.cfg"), "sim.nvideos = 7\n").unwrap();
    let out = bk_in(
        dir.path(),
        &["--config", "tool.cfg", "simulate", "--out-dir", "c"],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn workflow_produces_expected_files() {
    let dir = tempdir().unwrap();
    let run = |args: &[&str]| {
        let out = bk_in(dir.path(), args);
        assert!(out.status.success(), "{args:?}: {out:?}");
        out
    };
    run(&["simulate", "--out-dir", "corpus", "--n-videos", "25", "--seed", "3"]);
    run(&["detect", "--scores", "corpus/scores.bk", "--out", "preds.bk"]);
    run(&[
        "align", "--preds", "preds.bk", "--durations-from", "corpus/scores.bk",
        "--out", "aligned.bk", "--mode", "static",
    ]);
    let out = run(&[
        "eval", "--preds", "aligned.bk", "--annotations", "corpus/annotations.bk",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("corpus F1 = "), "{text}");

    run(&[
        "report", "--scores", "corpus/scores.bk", "--annotations",
        "corpus/annotations.bk", "--align-mode", "dynamic", "--out-dir", "rep",
    ]);
    for file in ["rep/report.txt", "rep/report.bk", "rep/predictions.bk"] {
        assert!(dir.path().join(file).exists(), "missing {file}");
    }
    let records = std::fs::read_to_string(dir.path().join("rep/report.bk")).unwrap();
    assert!(records.starts_with("bk1 report\n"), "{records}");
    assert!(records.contains("f1\tcorpus\t"), "{records}");
}

#[test]
fn groups_requires_exactly_one_source() {
    let dir = tempdir().unwrap();
    let out = bk_in(dir.path(), &["groups"]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn align_rejects_mode_none() {
    let dir = tempdir().unwrap();
    bk_in(dir.path(), &["simulate", "--out-dir", "c", "--n-videos", "5"]);
    bk_in(dir.path(), &["detect", "--scores", "c/scores.bk", "--out", "p.bk"]);
    let out = bk_in(
        dir.path(),
        &[
            "align", "--preds", "p.bk", "--durations-from", "c/scores.bk",
            "--out", "a.bk", "--mode", "none",
        ],
    );
    assert_eq!(out.status.code(), Some(1));
}
