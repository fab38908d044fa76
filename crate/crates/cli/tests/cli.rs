use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn golden() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/golden")
}

fn fss_rank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fss-rank"))
        .args(args)
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .expect("binary runs")
}

fn golden_args<'a>(sub: &'a str, out: &'a str, config: &'a str) -> Vec<&'a str> {
    vec![sub, "--config", config, "--out-dir", out]
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_every_output_and_a_manifest() {
    let out = tempfile::tempdir().unwrap();
    let config = golden().join("config.txt");
    let o = fss_rank(&golden_args(
        "run",
        out.path().to_str().unwrap(),
        config.to_str().unwrap(),
    ));
    assert!(o.status.success(), "{}", stderr(&o));
    let written = files(out.path());
    for name in [
        "fss.csv",
        "rank_entries.csv",
        "shifts.csv",
        "field_classes.csv",
        "summary.txt",
        "manifest.json",
    ] {
        assert!(written.contains_key(name), "missing {name}");
    }
    let manifest = String::from_utf8_lossy(&written["manifest.json"]);
    assert!(manifest.contains("\"timestamp\": 1700000000"), "{manifest}");
    assert!(
        stderr(&o).contains("warning: F01: pooled proportion is 0"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn subcommands_reproduce_the_full_run() {
    let (full, split) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let config = golden().join("config.txt");
    let config = config.to_str().unwrap();
    assert!(
        fss_rank(&golden_args("run", full.path().to_str().unwrap(), config))
            .status
            .success()
    );
    for sub in [
        "ingest",
        "shares",
        "baselines",
        "compute",
        "rank",
        "stats",
        "report",
    ] {
        let o = fss_rank(&golden_args(sub, split.path().to_str().unwrap(), config));
        assert!(o.status.success(), "{sub}: {}", stderr(&o));
    }
    let mut expected = files(full.path());
    expected.remove("manifest.json");
    assert_eq!(files(split.path()), expected);
}

#[test]
fn report_prints_the_summary() {
    let out = tempfile::tempdir().unwrap();
    let config = golden().join("config.txt");
    let args = golden_args(
        "run",
        out.path().to_str().unwrap(),
        config.to_str().unwrap(),
    );
    assert!(fss_rank(&args).status.success());
    let o = fss_rank(&golden_args(
        "report",
        out.path().to_str().unwrap(),
        config.to_str().unwrap(),
    ));
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(
        text.starts_with("FSS rank-shift summary\neligible fields: 2 of 2\n"),
        "{text}"
    );
    assert_eq!(
        text.as_bytes(),
        std::fs::read(golden().join("expected/summary.txt")).unwrap()
    );
}

#[test]
fn report_without_upstream_outputs_fails() {
    let out = tempfile::tempdir().unwrap();
    let o = fss_rank(&["report", "--out-dir", out.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eligibility.csv"), "{}", stderr(&o));
}

#[test]
fn config_file_overrides_flags() {
    let out = tempfile::tempdir().unwrap();
    let config = golden().join("config.txt");
    let o = fss_rank(&[
        "ingest",
        "--min-per-gender",
        "100",
        "--config",
        config.to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let eligibility = std::fs::read_to_string(out.path().join("eligibility.csv")).unwrap();
    assert!(
        eligibility.lines().skip(1).all(|l| l.ends_with(",true")),
        "{eligibility}"
    );
}

#[test]
fn strict_turns_degenerate_statistics_into_exit_3() {
    let out = tempfile::tempdir().unwrap();
    let config = golden().join("config.txt");
    let mut args = golden_args(
        "stats",
        out.path().to_str().unwrap(),
        config.to_str().unwrap(),
    );
    args.push("--strict");
    let o = fss_rank(&args);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("degenerate"), "{}", stderr(&o));
    assert!(files(out.path()).is_empty());
}

#[test]
fn invalid_flags_exit_1() {
    let out = tempfile::tempdir().unwrap();
    let o = fss_rank(&[
        "ingest",
        "--window",
        "2010:2006",
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = fss_rank(&[
        "ingest",
        "--precision",
        "7",
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = fss_rank(&[
        "ingest",
        "--corpus-dir",
        "/nonexistent",
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn dangling_reference_exits_2() {
    let corpus = tempfile::tempdir().unwrap();
    for e in std::fs::read_dir(golden().join("corpus")).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), corpus.path().join(e.file_name())).unwrap();
    }
    let bylines = corpus.path().join("bylines.csv");
    let text = std::fs::read_to_string(&bylines)
        .unwrap()
        .replace(",F01-R01,", ",NOBODY,");
    std::fs::write(&bylines, text).unwrap();
    let out = tempfile::tempdir().unwrap();
    let o = fss_rank(&[
        "compute",
        "--corpus-dir",
        corpus.path().to_str().unwrap(),
        "--out-dir",
        out.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("NOBODY"), "{}", stderr(&o));
}

#[test]
fn synth_then_run_with_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let out = dir.path().join("out");
    let o = fss_rank(&[
        "synth",
        "--fields",
        "2",
        "--researchers",
        "12",
        "--seed",
        "5",
        "--out-dir",
        corpus.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fss_rank(&[
        "compute",
        "--precision",
        "full",
        "--corpus-dir",
        corpus.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fss = std::fs::read_to_string(out.join("fss.csv")).unwrap();
    assert_eq!(fss.lines().count(), 25);
    assert!(
        fss.lines()
            .skip(1)
            .any(|l| l.split(',').nth(3).unwrap().len() > 12),
        "{fss}"
    );
}
