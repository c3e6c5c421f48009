use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/minicorpus")
}

fn moviesim(artifacts: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moviesim"))
        .arg("--config")
        .arg(fixture().join("pipeline.json"))
        .arg("--artifacts")
        .arg(artifacts)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn run_all_report_and_topics() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path();
    let out = stdout(&moviesim(a, &["run-all"]));
    assert!(out.contains("lda              ran"), "{out}");
    assert!(out.contains("Singular Modalities") && out.contains("Fusion Models"));

    let again = stdout(&moviesim(a, &["run-all"]));
    assert!(!again.contains(" ran\n"), "{again}");
    let forced = stdout(&moviesim(a, &["--force", "train-lda"]));
    assert_eq!(forced.trim(), "lda              ran");

    let topics: serde_json::Value =
        serde_json::from_str(&stdout(&moviesim(a, &["export-topics", "--n", "4"]))).unwrap();
    let topics = topics.as_array().unwrap();
    assert_eq!(topics.len(), 8);
    for (i, t) in topics.iter().enumerate() {
        assert_eq!(t["topic_id"], i);
        let words = t["top_words"].as_array().unwrap();
        assert_eq!(words.len(), 4);
        let p: Vec<f64> = words.iter().map(|w| w["probability"].as_f64().unwrap()).collect();
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
        assert!(words.iter().all(|w| w["word"].is_string()));
    }

    let report: serde_json::Value = serde_json::from_str(&stdout(&moviesim(a, &["report", "--json"]))).unwrap();
    assert_eq!(report["tag_space_size"], 16);

    let eval: serde_json::Value = serde_json::from_str(&stdout(&moviesim(
        a,
        &["evaluate", "--models", "lda,metadata", "--json"],
    )))
    .unwrap();
    assert_eq!(eval.as_array().unwrap().len(), 2);

    let fused = stdout(&moviesim(a, &["fuse", "--weights", "lda=1,metadata=3"]));
    assert!(fused.starts_with("MD + T"), "{fused}");
}

#[test]
fn bad_parameter_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&moviesim(dir.path(), &["ingest-text"]));
    stdout(&moviesim(dir.path(), &["train-tfidf"]));
    let o = moviesim(dir.path(), &["--k", "500", "train-lsi"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("stage `lsi` failed: invalid parameter"), "{err}");
    assert!(!dir.path().join("lsi.v1.json").exists());

    let o = moviesim(dir.path(), &["evaluate", "--gt", "ratings"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_upstream_names_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let o = moviesim(dir.path(), &["train-lda"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ingest-text"));
}

#[test]
fn evaluate_without_tags() {
    let dir = tempfile::tempdir().unwrap();
    let src = fixture();
    let mut manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(src.join("manifest.json")).unwrap()).unwrap();
    let obj = manifest.as_object_mut().unwrap();
    obj.remove("tags");
    obj.remove("audio");
    for (_, v) in obj["subtitles"].as_object_mut().unwrap().iter_mut() {
        *v = src.join(v.as_str().unwrap()).display().to_string().into();
    }
    let path = dir.path().join("manifest.json");
    std::fs::write(&path, serde_json::to_vec(&manifest).unwrap()).unwrap();

    let o = moviesim(
        &dir.path().join("art"),
        &["--manifest", path.to_str().unwrap(), "evaluate", "--models", "lda"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no ground truth"));
}

#[test]
fn serve_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path();
    stdout(&moviesim(a, &["run-all"]));

    let mut child = Command::new(env!("CARGO_BIN_EXE_moviesim"))
        .arg("--artifacts")
        .arg(a)
        .args(["--port", "0", "serve"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap())
        .read_line(&mut line)
        .unwrap();
    let _server = Server(child);
    let url = line.trim().strip_prefix("listening on ").unwrap().to_string();

    let query = |args: &[&str]| -> serde_json::Value {
        let o = Command::new(env!("CARGO_BIN_EXE_moviesim"))
            .args(["query", "--url", &url])
            .args(args)
            .output()
            .unwrap();
        serde_json::from_str(&stdout(&o)).unwrap()
    };
    assert_eq!(query(&["movies"]).as_array().unwrap().len(), 12);
    let similar = query(&["similar", "m01", "--weights", "lda:1", "--n", "3"]);
    assert_eq!(similar["results"].as_array().unwrap().len(), 3);
    assert_eq!(similar["label"], "LDA");
    assert_eq!(
        query(&["topic-words", "2", "--n", "5"])["top_words"]
            .as_array()
            .map(Vec::len),
        Some(5)
    );

    let o = Command::new(env!("CARGO_BIN_EXE_moviesim"))
        .args(["query", "--url", &url, "movie", "nope"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not_found"));
}
