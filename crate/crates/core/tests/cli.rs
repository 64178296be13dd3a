use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use unischema::model_file::ModelFile;
use unischema::prelude::*;
use unischema::training::init_params;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_unischema"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn unischema")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A small synthetic corpus with five structured relations.
fn corpus(dir: &TempDir) -> (PathBuf, PathBuf) {
    let out = dir.path().join("corpus");
    let o = run(&[
        "synth", "--out-dir", s(&out), "--relations", "20", "--tuples", "200", "--entities", "80", "--rank", "3",
        "--structured", "5", "--seed", "3",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    (out.join("train.tsv"), out.join("test.tsv"))
}

fn train(dir: &TempDir, facts: &Path, name: &str, extra: &[&str]) -> PathBuf {
    let model = dir.path().join(name);
    let mut args = vec!["train", s(facts), "--structured-prefix", "/kb/", "--out", s(&model)];
    args.extend_from_slice(extra);
    let o = run(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    model
}

fn sections(model: &Path) -> Vec<String> {
    fs::read_to_string(model)
        .unwrap()
        .lines()
        .filter(|l| l.starts_with('['))
        .map(String::from)
        .collect()
}

#[test]
fn ingest_prints_counts_and_normalises() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("f.tsv");
    fs::write(&facts, "# comment\nr1\ta\tb\nr2\ta\tb\nr1\ta\tb\n\nr1\tb\ta\n").unwrap();
    let out = dir.path().join("norm.tsv");
    let o = run(&["ingest", s(&facts), "--out", s(&out)]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "relations=2 entities=2 tuples=2 facts=3");
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3);
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("f.tsv");
    fs::write(&facts, "r1\ta\tb\nr2\ta\n").unwrap();
    let o = run(&["ingest", s(&facts)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    let o = run(&["ingest", s(&dir.path().join("missing.tsv"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["train"]).status.code(), Some(1));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["train", "x.tsv", "--out", "m", "--model", "xyz"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn train_writes_model_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let model = train(&dir, &facts, "nfe.model", &["--model", "nfe", "--kf", "4", "--ke", "3", "--epochs", "3"]);
    let loaded = ModelFile::load(&model).unwrap();
    assert_eq!(loaded.params.kind(), ModelKind::NFE);
    assert_eq!((loaded.params.latent_dim(), loaded.params.entity_dim()), (4, 3));
    let text = fs::read_to_string(&model).unwrap();
    assert!(text.lines().any(|l| l == "kind\tnfe"));
    for section in ["[a]", "[v]", "[w]", "[t_e]", "[d]"] {
        assert!(sections(&model).iter().any(|s| s == section), "missing {section}");
    }

    let report = fs::read_to_string(format!("{}.report.tsv", model.display())).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 4);
    for (i, line) in lines[..3].iter().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 3);
        assert_eq!(fields[0], i.to_string());
        assert!(fields[1].parse::<f64>().unwrap() > 0.0);
    }
    assert!(lines[3].starts_with("summary\tskipped_relations=0"));
}

#[test]
fn neighborhood_model_has_only_weights() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let model = train(&dir, &facts, "n.model", &["--model", "n", "--epochs", "2"]);
    assert_eq!(sections(&model), ["[relations]", "[entities]", "[tuples]", "[facts]", "[w]"]);
}

#[test]
fn zero_epochs_yields_initial_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let model = train(&dir, &facts, "init.model", &["--model", "nfe", "--kf", "3", "--ke", "2", "--epochs", "0", "--seed", "11"]);
    let loaded = ModelFile::load(&model).unwrap();
    let cfg = TrainConfig {
        kind: ModelKind::NFE,
        latent_dim: 3,
        entity_dim: 2,
        seed: 11,
        ..TrainConfig::default()
    };
    let init = init_params(&loaded.store, &cfg, &mut cfg.rng()).unwrap();
    assert_eq!(init.blocks(), loaded.params.blocks());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let config = dir.path().join("train.toml");
    fs::write(&config, "model = \"nf\"\nkf = 6\nepochs = 2\n[l2]\nall = 0.05\n").unwrap();
    let model = train(&dir, &facts, "cfg.model", &["--config", s(&config), "--kf", "2"]);
    let loaded = ModelFile::load(&model).unwrap();
    assert_eq!(loaded.params.kind(), ModelKind::NF);
    assert_eq!(loaded.params.latent_dim(), 2);

    fs::write(&config, "epoch = 2\n").unwrap();
    let o = run(&["train", s(&facts), "--config", s(&config), "--out", s(&dir.path().join("x"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn repeated_training_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let args = ["--model", "nfe", "--kf", "3", "--ke", "3", "--epochs", "4", "--seed", "5"];
    let a = train(&dir, &facts, "a.model", &args);
    let b = train(&dir, &facts, "b.model", &args);
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

fn predictions(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .map(|l| l.split('\t').map(String::from).collect())
        .collect()
}

#[test]
fn predict_ranks_unobserved_tuples() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let model = train(&dir, &facts, "nf.model", &["--model", "nf", "--kf", "4", "--epochs", "5"]);
    let store = ModelFile::load(&model).unwrap().store;
    let r = store.relation_ids().next().unwrap();
    let name = store.relation_name(r).to_string();

    let o = run(&["predict", s(&model), &name, "--top-k", "5"]);
    assert!(o.status.success());
    let rows = predictions(&o);
    assert_eq!(rows.len(), 5);
    let mut last = f64::INFINITY;
    for row in &rows {
        assert_eq!(row.len(), 6);
        assert_eq!(row[0], name);
        let conf: f64 = row[4].parse().unwrap();
        assert!(conf > 0.0 && conf < 1.0);
        assert!(conf <= last);
        last = conf;
        assert_eq!(row[5], "0");
        assert!(!store.contains(r, store.tuple_by_names(&row[1], &row[2]).unwrap()));
    }

    let unobserved = store.num_tuples() - store.observed_tuples(r).unwrap().len();
    let o = run(&["predict", s(&model), &name, "--top-k", "100000"]);
    assert_eq!(predictions(&o).len(), unobserved);
    let o = run(&["predict", s(&model), &name, "--top-k", "100000", "--include-observed"]);
    assert_eq!(predictions(&o).len(), store.num_tuples());
}

#[test]
fn predict_with_relation_true_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("f.tsv");
    fs::write(&facts, "all\ta\tb\nall\tb\tc\nall\tc\ta\nsome\ta\tb\n").unwrap();
    let model = train(&dir, &facts, "m", &["--model", "nf", "--kf", "2", "--epochs", "3"]);
    let o = run(&["predict", s(&model), "all", "--include-observed"]);
    assert_eq!(predictions(&o).len(), 3);
    assert!(predictions(&o).iter().all(|r| r[5] == "1"));
    let o = run(&["predict", s(&model), "all"]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
}

#[test]
fn predict_unknown_relation_lists_nearest() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let model = train(&dir, &facts, "n.model", &["--model", "n", "--epochs", "1"]);
    let o = run(&["predict", s(&model), "pat:rel07"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nearest relations: pat:rel"), "{}", stderr(&o));
}

/// Parses a report into `(relation, npos, AP)` rows and the MAP line.
fn parse_report(text: &str) -> (Vec<(String, usize, f64)>, f64) {
    let mut rows = Vec::new();
    let mut map = f64::NAN;
    for line in text.lines().filter(|l| !l.starts_with('#')) {
        let f: Vec<&str> = line.split('\t').collect();
        if f[0] == "MAP" {
            map = f[1].parse().unwrap();
        } else {
            rows.push((f[0].to_string(), f[1].parse().unwrap(), f[2].parse().unwrap()));
        }
    }
    (rows, map)
}

#[test]
fn eval_reports_map_consistent_with_rows() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, test) = corpus(&dir);
    let model = train(&dir, &facts, "nf.model", &["--model", "nf", "--kf", "4", "--epochs", "10"]);
    let o = run(&["eval", s(&model), s(&test)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("# labels come from held-out facts"));
    let (rows, map) = parse_report(&text);
    assert!(!rows.is_empty());
    let mean = rows.iter().map(|r| r.2).sum::<f64>() / rows.len() as f64;
    assert!((map - mean).abs() < 1e-12);
    assert!(rows.iter().all(|r| r.2 > 0.0 && r.2 <= 1.0));

    let o = run(&["eval", s(&model), s(&test), "--weighted"]);
    let (rows, map) = parse_report(&stdout(&o));
    let total: usize = rows.iter().map(|r| r.1).sum();
    let weighted = rows.iter().map(|r| r.2 * r.1 as f64).sum::<f64>() / total as f64;
    assert!((map - weighted).abs() < 1e-12);
}

#[test]
fn eval_collections_partition_relations() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, test) = corpus(&dir);
    let model = train(&dir, &facts, "nf.model", &["--model", "nf", "--kf", "4", "--epochs", "5"]);
    let names = |collection: &str| -> Vec<String> {
        let o = run(&["eval", s(&model), s(&test), "--collection", collection]);
        assert!(o.status.success(), "{}", stderr(&o));
        parse_report(&stdout(&o)).0.into_iter().map(|r| r.0).collect()
    };
    let (structured, pattern, all) = (names("structured"), names("pattern"), names("all"));
    assert!(!structured.is_empty() && !pattern.is_empty());
    assert!(structured.iter().all(|n| n.starts_with("/kb/")));
    let mut joined = [structured, pattern].concat();
    joined.sort();
    let mut all_sorted = all;
    all_sorted.sort();
    assert_eq!(joined, all_sorted);
}

#[test]
fn eval_structured_on_pattern_only_corpus_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, test) = corpus(&dir);
    let model = dir.path().join("p.model");
    let o = run(&["train", s(&facts), "--structured-prefix", "nothing-matches", "--model", "n", "--epochs", "1", "--out", s(&model)]);
    assert!(o.status.success());
    let o = run(&["eval", s(&model), s(&test), "--collection", "structured"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("empty collection"));
}

#[test]
fn eval_rejects_training_facts_and_unknown_names() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, _) = corpus(&dir);
    let model = train(&dir, &facts, "n.model", &["--model", "n", "--epochs", "1"]);
    let o = run(&["eval", s(&model), s(&facts)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("also a training fact"));

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "no-such-relation\te0001\te0002\n").unwrap();
    assert_eq!(run(&["eval", s(&model), s(&bad)]).status.code(), Some(2));
}

#[test]
fn eval_pooled_and_prediction_dump() {
    let dir = tempfile::tempdir().unwrap();
    let (facts, test) = corpus(&dir);
    let nf = train(&dir, &facts, "nf.model", &["--model", "nf", "--kf", "4", "--epochs", "5"]);
    let n = train(&dir, &facts, "n.model", &["--model", "n", "--epochs", "5"]);
    let dump = dir.path().join("dump.tsv");
    let o = run(&["eval", s(&nf), s(&test), "--pool", s(&n), "--pool-depth", "10", "--predictions", s(&dump)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("# pooled over 2 systems at depth 10"));
    let dumped = fs::read_to_string(&dump).unwrap();
    let (rows, _) = parse_report(&stdout(&o));
    // Each pool holds at most 20 tuples.
    assert!(dumped.lines().count() <= rows.len() * 20);
    assert!(dumped.lines().any(|l| l.ends_with("\t1")));

    let other_facts = dir.path().join("other.tsv");
    fs::write(&other_facts, "r\ta\tb\n").unwrap();
    let other = train(&dir, &other_facts, "other.model", &["--model", "n", "--epochs", "1"]);
    let o = run(&["eval", s(&nf), s(&test), "--pool", s(&other)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gradcheck_passes_and_reports() {
    let o = run(&["gradcheck", "--instances", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS\tmodel=nfe"));
    let o = run(&["gradcheck", "--model", "f", "--kf", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["gradcheck", "--model", "all", "--instances", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 7);
}

#[test]
fn synth_is_reproducible_and_validated() {
    let dir = tempfile::tempdir().unwrap();
    let gen = |name: &str| -> PathBuf {
        let out = dir.path().join(name);
        let o = run(&[
            "synth", "--out-dir", s(&out), "--relations", "30", "--tuples", "300", "--entities", "100",
            "--threshold", "1.0", "--rule", "0,1,0.3", "--seed", "4",
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let (a, b) = (gen("a"), gen("b"));
    for file in ["train.tsv", "test.tsv", "manifest.toml"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }
    let manifest = unischema::verification::SynthManifest::read(&a.join("manifest.toml")).unwrap();
    assert_eq!(manifest.spec.rules.len(), 1);
    assert_eq!((manifest.spec.rules[0].antecedent, manifest.spec.rules[0].consequent), (0, 1));
    assert_eq!(manifest.spec.rules[0].coverage, 0.3);

    let o = run(&["synth", "--out-dir", s(&dir.path().join("c")), "--rule", "0,1,1.5"]);
    assert_ne!(o.status.code(), Some(0));
}
