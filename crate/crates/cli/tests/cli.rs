use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ohba-lab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn generate_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = lab(dir.path(), &["--seed", "3", "generate", "lemma3"]);
    let b = lab(dir.path(), &["--seed", "3", "generate", "lemma3", "--out", "b.json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(code(&b), 0);
    let written = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a.stdout, written);
    let file = ohba_lab::lab::InstanceFile::from_json(std::str::from_utf8(&written).unwrap()).unwrap();
    assert_eq!(file.to_json().unwrap() + "\n", std::str::from_utf8(&written).unwrap());
    assert_eq!(file.vertex_count(), 84);
}

#[test]
fn k33_lists_are_bad_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(dir.path(), &["generate", "k33", "--out", "k33.json"])), 0);
    let solved = lab(dir.path(), &["solve", "k33.json"]);
    assert_eq!(json(&solved)["colorable"], Value::Bool(false));
    assert_eq!(code(&lab(dir.path(), &["verify", "k33.json", "--bad"])), 0);
    let chi = json(&lab(dir.path(), &["chi-list", "k33.json"]));
    assert_eq!(chi["result"]["list_chromatic_number"], 3);
    assert_eq!(chi["result"]["chromatic_number"], 2);
}

#[test]
fn pipeline_colouring_passes_verify() {
    let dir = tempfile::tempdir().unwrap();
    lab(dir.path(), &["--seed", "2", "generate", "lemma3", "--out", "g.json"]);
    let run = lab(dir.path(), &["--seed", "2", "pipeline", "g.json", "--out", "r.json"]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let report: Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["path"], "randomized");
    assert_eq!(code(&lab(dir.path(), &["verify", "g.json", "--coloring", "r.json"])), 0);
}

#[test]
fn wrong_colouring_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    lab(dir.path(), &["generate", "erdos-parts2", "--k", "2", "--out", "e.json"]);
    std::fs::write(dir.path().join("c.json"), "[0, 0, 0, 0]").unwrap();
    let out = lab(dir.path(), &["verify", "e.json", "--coloring", "c.json"]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out)["verdict"]["kind"], "monochromatic_edge");
}

#[test]
fn bad_search_compress_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    lab(dir.path(), &["generate", "erdos-parts2", "--k", "3", "--out", "p.json"]);
    lab(dir.path(), &["generate", "k33", "--out", "k33.json"]);
    let found = lab(
        dir.path(),
        &[
            "--seed",
            "5",
            "bad-search",
            "k33.json",
            "--k",
            "2",
            "--trials",
            "100000",
            "--out",
            "w.json",
        ],
    );
    assert_eq!(code(&found), 0);
    assert_eq!(code(&lab(dir.path(), &["verify", "w.json", "--bad"])), 0);
    let compressed = lab(dir.path(), &["compress", "w.json", "--out", "t.json"]);
    assert_eq!(code(&compressed), 0, "{}", String::from_utf8_lossy(&compressed.stderr));
    let trace: Value = serde_json::from_slice(&std::fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(trace["final_universe"].as_u64().unwrap() <= 5);
    let replay = lab(dir.path(), &["verify", "--trace", "t.json"]);
    assert_eq!(code(&replay), 0);
    assert_eq!(json(&replay)["valid"], Value::Bool(true));

    // [2,2,2] is 3-choosable, so the search reports nothing
    let none = json(&lab(
        dir.path(),
        &["bad-search", "p.json", "--k", "3", "--trials", "2000"],
    ));
    assert_eq!(none["found"], Value::Bool(false));
}

/// K_{3,3} with its bad lists plus two isolated vertices carrying fresh
/// colours: 8 vertices, 8 colours, still bad.
fn inflated_k33(dir: &Path) {
    use ohba_lab::graph::{complete_multipartite, Graph};
    use ohba_lab::lab::{InstanceFile, Metadata};
    use ohba_lab::lists::ListAssignment;
    let (k, _) = complete_multipartite(&[3, 3]).unwrap();
    let g = Graph::new(8, &k.edges()).unwrap();
    let side = [vec![1, 2], vec![1, 3], vec![2, 3]];
    let mut lists: Vec<Vec<u32>> = side.iter().chain(side.iter()).cloned().collect();
    lists.push(vec![10, 11]);
    lists.push(vec![12, 13, 14]);
    let file = InstanceFile::from_graph(&g, &ListAssignment::new(lists).unwrap(), Metadata::new("inflated"));
    file.write(&dir.join("w.json")).unwrap();
}

#[test]
fn tampered_trace_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    inflated_k33(dir.path());
    assert_eq!(code(&lab(dir.path(), &["verify", "w.json", "--bad"])), 0);
    let out = lab(dir.path(), &["compress", "w.json", "--out", "t.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut trace: Value = serde_json::from_slice(&std::fs::read(dir.path().join("t.json")).unwrap()).unwrap();
    assert!(trace["final_universe"].as_u64().unwrap() < 8);
    assert!(!trace["steps"].as_array().unwrap().is_empty());
    assert_eq!(code(&lab(dir.path(), &["verify", "--trace", "t.json"])), 0);
    trace["steps"][0]["donor"] = trace["steps"][0]["replaced"][0].clone();
    std::fs::write(dir.path().join("t.json"), trace.to_string()).unwrap();
    let rejected = lab(dir.path(), &["verify", "--trace", "t.json"]);
    assert_eq!(code(&rejected), 4);
    assert_eq!(json(&rejected)["valid"], Value::Bool(false));
}

#[test]
fn sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(dir.path(), &["--format", "csv", "sweep", "--max-n", "4"]);
    assert_eq!(code(&out), 0);
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert_eq!(&headers[0], "parts");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| &r[4] == "equal"));
}

#[test]
fn montecarlo_report_is_self_consistent() {
    let dir = tempfile::tempdir().unwrap();
    lab(dir.path(), &["--seed", "1", "generate", "lemma3", "--out", "g.json"]);
    let out = lab(dir.path(), &["--seed", "1", "montecarlo", "g.json", "--trials", "300"]);
    assert_eq!(code(&out), 0);
    let report: ohba_lab::lab::ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.is_consistent());
    assert_eq!(report.target, Some(0.8));
    let tail = json(&lab(
        dir.path(),
        &[
            "montecarlo",
            "g.json",
            "--experiment",
            "tail",
            "--trials",
            "100",
            "--threshold",
            "-1",
        ],
    ));
    assert_eq!(tail["tail"]["frequency"], 1.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&lab(dir.path(), &["solve", "missing.json"])), 2);
    std::fs::write(
        dir.path().join("v.json"),
        r#"{"schema_version": 7, "parts": [[0]], "lists": {"0": [0]}, "metadata": {"generator": "x"}}"#,
    )
    .unwrap();
    assert_eq!(code(&lab(dir.path(), &["solve", "v.json"])), 2);
    assert_eq!(code(&lab(dir.path(), &["generate", "lemma3", "--m", "3"])), 2);
    lab(dir.path(), &["generate", "erdos-parts2", "--k", "3", "--out", "p.json"]);
    assert_eq!(code(&lab(dir.path(), &["--budget", "5", "chi-list", "p.json"])), 3);
    assert_eq!(code(&lab(dir.path(), &["--format", "csv", "solve", "p.json"])), 2);
}
