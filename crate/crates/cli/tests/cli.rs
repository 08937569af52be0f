use std::path::Path;
use std::process::{Command, Output};

fn dtn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtn")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn usage_exit_codes() {
    assert_eq!(code(&dtn(&["--help"])), 0);
    assert_eq!(code(&dtn(&[])), 2);
    assert_eq!(code(&dtn(&["frobnicate"])), 2);
    assert_eq!(code(&dtn(&["fit", "--out-dir", "x"])), 2);
}

#[test]
fn missing_input_is_an_io_error_with_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let missing = tmp.path().join("nope.tsv");
    let res = dtn(&["fit", "--corpus", missing.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&res), 4);
    let m = manifest(&out);
    assert_eq!(m["status"], "error");
    assert_eq!(m["exit_code"], 4);
}

#[test]
fn bad_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let res = dtn(&["simulate", "--set", "no_such_key=1", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&res), 3);
    let sim = tmp.path().join("sim");
    let res = dtn(&["simulate", "--set", "I=4", "--set", "T=3", "--out-dir", sim.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    let corpus = sim.join("corpus.tsv");
    let res = dtn(&["fit", "--corpus", corpus.to_str().unwrap(), "--set", "stages=topics,bogus", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&res), 3);
}

#[test]
fn simulate_fit_summarize_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |name: &str| tmp.path().join(name).display().to_string();
    let common = ["--set", "K=3", "--set", "I=6", "--set", "T=8", "--set", "W=30"];
    let mut args = vec!["simulate", "--seed", "3", "--out-dir"];
    let sim = p("sim");
    args.push(&sim);
    args.extend(common);
    assert_eq!(code(&dtn(&args)), 0);
    for f in ["corpus.tsv", "links.tsv", "truth.json", "manifest.json"] {
        assert!(tmp.path().join("sim").join(f).exists(), "{f}");
    }
    let m = manifest(&tmp.path().join("sim"));
    assert_eq!(m["seed"], 3);
    assert_eq!(m["status"], "ok");

    let (corpus, links, fit) = (p("sim/corpus.tsv"), p("sim/links.tsv"), p("fit"));
    let mut args = vec!["fit", "--corpus", &corpus, "--links", &links, "--out-dir", &fit, "--chains", "2"];
    args.extend(["--set", "K=3", "--set", "iters=12", "--set", "burn_in=4", "--set", "thin=2"]);
    assert_eq!(code(&dtn(&args)), 0);
    let m = manifest(&tmp.path().join("fit"));
    let inputs = m["inputs"].as_array().unwrap();
    assert!(inputs.iter().all(|i| i["matches_producer"] == true));
    assert!(m["acceptance"].as_object().is_some());

    let (draws, summary) = (p("fit/chain-0"), p("summary"));
    assert_eq!(code(&dtn(&["summarize", "--draws", &draws, "--out-dir", &summary])), 0);
    let csv = std::fs::read_to_string(tmp.path().join("summary/summary.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("theta,")));

    let wf = p("wf");
    let res = dtn(&["wf", "--corpus", &corpus, "--draws", &draws, "--topic", "0", "--days", "2-4", "--set", "K=3", "--out-dir", &wf]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    assert!(tmp.path().join("wf/wf.csv").exists());
}

#[test]
fn ari_of_label_files() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a.txt");
    let b = tmp.path().join("b.txt");
    std::fs::write(&a, "1\n1\n2\n2\n").unwrap();
    std::fs::write(&b, "1\n2\n1\n2\n").unwrap();
    let out = tmp.path().join("out");
    let res = dtn(&["ari", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&res), 0);
    assert_eq!(String::from_utf8_lossy(&res.stdout).trim(), "-0.5");
    std::fs::write(&b, "1\n2\n").unwrap();
    let res = dtn(&["ari", "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_ne!(code(&res), 0);
}

#[test]
fn preprocess_writes_corpus_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let raw = tmp.path().join("raw.tsv");
    let mut lines = Vec::new();
    for i in 0..40 {
        lines.push(format!("{}\tblog{}\tsenate vote budget{}\tblog{}", 1 + i % 4, i % 3, i % 5, (i + 1) % 3));
    }
    std::fs::write(&raw, lines.join("\n")).unwrap();
    let out = tmp.path().join("pre");
    let res = dtn(&["preprocess", "--input", raw.to_str().unwrap(), "--out-dir", out.to_str().unwrap(), "--bigram-min", "5"]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["corpus.tsv", "vocabulary.txt", "ngrams.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    std::fs::write(&raw, "not a valid line").unwrap();
    let res = dtn(&["preprocess", "--input", raw.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&res), 4);
}
