use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use fss_rank::pipeline::{self, execute, Precision, RunConfig, Stage, MANIFEST_FILE, SUMMARY_FILE};
use fss_rank::Error;

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

fn golden_config(out: &Path) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.apply_file(&golden_dir().join("config.txt")).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg.timestamp = Some(0);
    cfg.resolve().unwrap()
}

fn read_dir(dir: &Path) -> BTreeMap<String, Vec<u8>> {
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

type Rows = Vec<HashMap<String, String>>;

fn csv_rows(bytes: &[u8]) -> Rows {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            header
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn csv_file(path: &Path) -> Rows {
    csv_rows(&std::fs::read(path).unwrap())
}

#[test]
fn golden_outputs_match_committed_files() {
    let out = tempfile::tempdir().unwrap();
    pipeline::run_pipeline(&golden_config(out.path())).unwrap();
    let mut actual = read_dir(out.path());
    actual.remove(MANIFEST_FILE);

    let expected_dir = golden_dir().join("expected");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        let _ = std::fs::remove_dir_all(&expected_dir);
        std::fs::create_dir_all(&expected_dir).unwrap();
        for (name, bytes) in &actual {
            std::fs::write(expected_dir.join(name), bytes).unwrap();
        }
    }
    let expected = read_dir(&expected_dir);
    assert_eq!(
        actual.keys().collect::<Vec<_>>(),
        expected.keys().collect::<Vec<_>>()
    );
    for (name, bytes) in &expected {
        assert!(
            actual[name] == *bytes,
            "{name} differs from the golden copy:\n{}",
            String::from_utf8_lossy(&actual[name])
        );
    }
}

#[test]
fn golden_summary_lines() {
    let text = std::fs::read_to_string(golden_dir().join("expected").join(SUMMARY_FILE)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "FSS rank-shift summary");
    assert_eq!(lines[1], "eligible fields: 2 of 2");
    assert!(lines.contains(&"[TOTAL] fields: F01, F02"));
    assert!(lines.contains(&"  female incidence: 50.0% of 60 researchers"));
}

/// FSS recomputed straight from the corpus CSVs.
fn oracle_fss(dir: &Path) -> BTreeMap<String, f64> {
    let fields = csv_file(&dir.join("fields.csv"));
    let ordered: HashMap<&str, bool> = fields
        .iter()
        .map(|f| {
            (
                f["field_code"].as_str(),
                f["byline_convention"] == "contribution_ordered",
            )
        })
        .collect();
    let wages: HashMap<String, f64> = csv_file(&dir.join("wages.csv"))
        .iter()
        .map(|w| (w["rank"].clone(), w["avg_yearly_wage"].parse().unwrap()))
        .collect();
    let researchers = csv_file(&dir.join("researchers.csv"));
    let field_of: HashMap<&str, &str> = researchers
        .iter()
        .map(|r| (r["researcher_id"].as_str(), r["field_code"].as_str()))
        .collect();

    let pubs = csv_file(&dir.join("publications.csv"));
    let mut cells: HashMap<(String, String), (f64, f64)> = HashMap::new();
    for p in &pubs {
        let c: f64 = p["citations"].parse().unwrap();
        if c == 0.0 {
            continue;
        }
        for cat in p["subject_categories"].split(';') {
            let e = cells
                .entry((p["year"].clone(), cat.to_string()))
                .or_default();
            e.0 += 1.0;
            e.1 += c;
        }
    }
    let impact: HashMap<&str, f64> = pubs
        .iter()
        .map(|p| {
            let c: f64 = p["citations"].parse().unwrap();
            let cats: Vec<&str> = p["subject_categories"].split(';').collect();
            let v = if c == 0.0 {
                0.0
            } else {
                cats.iter()
                    .map(|cat| {
                        let (n, sum) = cells[&(p["year"].clone(), cat.to_string())];
                        c / (sum / n)
                    })
                    .sum::<f64>()
                    / cats.len() as f64
            };
            (p["publication_id"].as_str(), v)
        })
        .collect();

    let mut bylines: BTreeMap<String, BTreeMap<usize, (String, String)>> = BTreeMap::new();
    for b in csv_file(&dir.join("bylines.csv")) {
        bylines
            .entry(b["publication_id"].clone())
            .or_default()
            .insert(
                b["slot_index"].parse().unwrap(),
                (b["researcher_id"].clone(), b["affiliation_id"].clone()),
            );
    }

    let mut total: HashMap<String, f64> = HashMap::new();
    for (pid, slots) in &bylines {
        let slots: Vec<&(String, String)> = slots.values().collect();
        let n = slots.len();
        let contribution = slots
            .iter()
            .any(|(r, _)| field_of.get(r.as_str()).is_some_and(|f| ordered[f]));
        let same = slots[0].1 == slots[n - 1].1;
        let share = |i: usize| -> f64 {
            if !contribution {
                1.0 / n as f64
            } else if same && n >= 3 {
                if i == 0 || i == n - 1 {
                    0.4
                } else {
                    0.2 / (n - 2) as f64
                }
            } else if !same && n >= 5 {
                if i == 0 || i == n - 1 {
                    0.3
                } else if i == 1 || i == n - 2 {
                    0.15
                } else {
                    0.1 / (n - 4) as f64
                }
            } else {
                1.0 / n as f64
            }
        };
        for (i, (r, _)) in slots.iter().enumerate() {
            if !r.is_empty() {
                *total.entry(r.clone()).or_default() += impact[pid.as_str()] * share(i);
            }
        }
    }
    researchers
        .iter()
        .map(|r| {
            let years: f64 = r["years_active"].parse().unwrap();
            let v = total.get(&r["researcher_id"]).copied().unwrap_or(0.0)
                / (wages[&r["rank"]] * years);
            (r["researcher_id"].clone(), v)
        })
        .collect()
}

#[test]
fn golden_fss_matches_direct_recomputation() {
    let mut cfg = golden_config(Path::new("unused"));
    cfg.precision = Precision::Full;
    let outcome = execute(&cfg, &[Stage::Compute]).unwrap();
    let rows = csv_rows(&outcome.outputs.get("fss.csv").unwrap().bytes);
    let oracle = oracle_fss(&golden_dir().join("corpus"));
    assert_eq!(rows.len(), oracle.len());
    for row in &rows {
        let got: f64 = row["fss"].parse().unwrap();
        let want = oracle[&row["researcher_id"]];
        assert!(
            (got - want).abs() <= 1e-12 * want.abs(),
            "{}: {got} vs {want}",
            row["researcher_id"]
        );
        assert_eq!(row["productive"] == "true", want > 0.0);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let ma = pipeline::run_pipeline(&golden_config(a.path())).unwrap();
    let mb = pipeline::run_pipeline(&golden_config(b.path())).unwrap();
    assert_eq!(ma.outputs, mb.outputs);
    let (fa, fb) = (read_dir(a.path()), read_dir(b.path()));
    assert_eq!(fa.len(), fb.len());
    for (name, bytes) in &fa {
        if name == MANIFEST_FILE {
            continue;
        }
        assert!(fb[name] == *bytes, "{name} differs between runs");
    }
}

#[test]
fn stages_run_separately_match_the_full_run() {
    let (full, split) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    pipeline::run_pipeline(&golden_config(full.path())).unwrap();
    let cfg = golden_config(split.path());
    for stage in Stage::ALL {
        pipeline::run_stage(&cfg, stage).unwrap();
    }
    let mut whole = read_dir(full.path());
    whole.remove(MANIFEST_FILE);
    assert_eq!(read_dir(split.path()), whole);
}

#[test]
fn manifest_lists_digests_and_counts() {
    let out = tempfile::tempdir().unwrap();
    let manifest = pipeline::run_pipeline(&golden_config(out.path())).unwrap();
    assert_eq!(manifest.timestamp, 0);
    assert_eq!(manifest.inputs.len(), 5);
    assert_eq!(manifest.counts["compute.researchers"], 60);
    let fss = &manifest.outputs["fss.csv"];
    assert_eq!(fss.rows, Some(60));
    assert_eq!(
        fss.bytes,
        std::fs::metadata(out.path().join("fss.csv")).unwrap().len() as usize
    );
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(json["tool"], "fss-rank");
    assert_eq!(json["config"]["eligibility"]["min_per_gender"], 10);
    assert_eq!(
        json["outputs"]["fss.csv"]["sha256"].as_str().unwrap().len(),
        64
    );
}

fn write_minimal(dir: &Path) {
    let files = [
        ("fields.csv", "field_code,discipline_area,byline_convention\nBIO/01,BIO,contribution_ordered\n"),
        ("wages.csv", "rank,avg_yearly_wage\nfull,50000\n"),
        (
            "researchers.csv",
            "researcher_id,gender,rank,field_code,years_active,affiliation_id\nr1,F,full,BIO/01,5,U1\nr2,M,full,BIO/01,5,U1\n",
        ),
        ("publications.csv", "publication_id,year,citations,subject_categories\np1,2008,4,CELL\n"),
        ("bylines.csv", "publication_id,slot_index,researcher_id,affiliation_id\np1,0,r1,U1\np1,1,r2,U1\n"),
    ];
    for (name, body) in files {
        std::fs::write(dir.join(name), body).unwrap();
    }
}

#[test]
fn minimal_two_researcher_corpus_gives_full_output_set() {
    let corpus = tempfile::tempdir().unwrap();
    write_minimal(corpus.path());
    let out = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        corpus_dir: corpus.path().to_path_buf(),
        out_dir: out.path().to_path_buf(),
        ..RunConfig::default()
    };
    pipeline::run_pipeline(&cfg).unwrap();
    let files = read_dir(out.path());
    for name in [
        "eligibility.csv",
        "shares.csv",
        "baselines.csv",
        "fss.csv",
        "rank_entries.csv",
        "shifts.csv",
        "field_classes.csv",
        "stats_by_field.csv",
        "scatter_data.csv",
        SUMMARY_FILE,
        MANIFEST_FILE,
    ] {
        assert!(files.contains_key(name), "missing {name}");
    }
    let fss = csv_rows(&files["fss.csv"]);
    assert_eq!(fss.len(), 2);
    // Two authors, alphabetical fallback: each gets half of a publication at the baseline mean.
    assert_eq!(fss[0]["fss"], "2e-6");
    assert!(String::from_utf8_lossy(&files[SUMMARY_FILE]).contains("no eligible fields"));
}

#[test]
fn failed_run_writes_nothing() {
    let corpus = tempfile::tempdir().unwrap();
    write_minimal(corpus.path());
    std::fs::write(
        corpus.path().join("bylines.csv"),
        "publication_id,slot_index,researcher_id,affiliation_id\np1,0,r1,U1\np1,1,ghost,U1\n",
    )
    .unwrap();
    let out = tempfile::tempdir().unwrap();
    let target = out.path().join("run");
    let cfg = RunConfig {
        corpus_dir: corpus.path().to_path_buf(),
        out_dir: target.clone(),
        ..RunConfig::default()
    };
    let err = pipeline::run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let msg = err.to_string();
    assert!(msg.contains("ingest") && msg.contains("ghost"), "{msg}");
    assert!(!target.exists());
}

#[test]
fn strict_mode_escalates_degenerate_statistics() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = golden_config(out.path());
    let lenient = execute(&cfg, &[Stage::Stats]).unwrap();
    assert!(
        lenient
            .warnings
            .iter()
            .any(|w| w.contains("pooled proportion")),
        "{:?}",
        lenient.warnings
    );
    cfg.strict = true;
    let err = execute(&cfg, &[Stage::Stats]).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("stats"), "{err}");
}

#[test]
fn report_alone_needs_upstream_files() {
    let out = tempfile::tempdir().unwrap();
    let err = pipeline::run_stage(&golden_config(out.path()), Stage::Report).unwrap_err();
    assert!(
        matches!(err, Error::Stage { .. } | Error::InvalidInput(_)),
        "{err:?}"
    );
    assert!(err.to_string().contains("eligibility.csv"), "{err}");
}

#[test]
fn full_precision_round_trips() {
    let mut cfg = golden_config(Path::new("unused"));
    let six = execute(&cfg, &[Stage::Compute]).unwrap();
    cfg.precision = Precision::Full;
    let full = execute(&cfg, &[Stage::Compute]).unwrap();
    let (six, full) = (
        csv_rows(&six.outputs.get("fss.csv").unwrap().bytes),
        csv_rows(&full.outputs.get("fss.csv").unwrap().bytes),
    );
    for (a, b) in six.iter().zip(&full) {
        let (a, b): (f64, f64) = (a["fss"].parse().unwrap(), b["fss"].parse().unwrap());
        assert!((a - b).abs() <= 5e-6 * b.abs());
    }
    assert!(full.iter().any(|r| r["fss"].len() > 12));
}

/// Midrank percentile by brute force: count values below and equal.
fn midrank_percentiles(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    values
        .iter()
        .map(|v| {
            let below = values.iter().filter(|w| *w < v).count() as f64;
            let equal = values.iter().filter(|w| *w == v).count() as f64;
            100.0 * (below + (equal - 1.0) / 2.0) / (n - 1.0)
        })
        .collect()
}

#[test]
fn golden_percentiles_match_brute_force() {
    let mut cfg = golden_config(Path::new("unused"));
    cfg.precision = Precision::Full;
    let outcome = execute(&cfg, &[Stage::Rank]).unwrap();
    let rows = csv_rows(&outcome.outputs.get("rank_entries.csv").unwrap().bytes);
    for field in ["F01", "F02"] {
        let rows: Vec<_> = rows.iter().filter(|r| r["field_code"] == field).collect();
        assert_eq!(rows.len(), 30);
        let fss: Vec<f64> = rows.iter().map(|r| r["fss"].parse().unwrap()).collect();
        let productive_mean = |g: Option<&str>| {
            let v: Vec<f64> = rows
                .iter()
                .zip(&fss)
                .filter(|(r, f)| **f > 0.0 && g.is_none_or(|g| r["gender"] == g))
                .map(|(_, f)| *f)
                .collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let pooled: Vec<f64> = fss.iter().map(|f| f / productive_mean(None)).collect();
        let by_gender: Vec<f64> = rows
            .iter()
            .zip(&fss)
            .map(|(r, f)| f / productive_mean(Some(r["gender"].as_str())))
            .collect();
        for (col, expect) in [
            ("percentile_pooled", midrank_percentiles(&pooled)),
            ("percentile_gender", midrank_percentiles(&by_gender)),
        ] {
            for (r, want) in rows.iter().zip(expect) {
                let got: f64 = r[col].parse().unwrap();
                assert!(
                    (got - want).abs() < 1e-9,
                    "{field} {} {col}: {got} vs {want}",
                    r["researcher_id"]
                );
            }
        }
    }
}
