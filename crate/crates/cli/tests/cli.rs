use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdt")).args(args).output().expect("run pdt")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn seed(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../seeds").join(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn validate_exit_codes() {
    let ok = pdt(&["validate", &seed("segment.json")]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).contains("qrank 1"));

    let square = pdt(&["validate", &seed("unit_square.json")]);
    assert_eq!(square.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&square.stderr).contains("qrank = 2, not perfect"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dim\": 1, \"vertices\": [[0], [1]");
    assert_eq!(pdt(&["validate", &bad]).status.code(), Some(1));
    assert_eq!(pdt(&["validate", &dir.path().join("missing.json").display().to_string()]).status.code(), Some(1));
}

#[test]
fn explore_segment_writes_loop() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = pdt(&["explore", "--dim", "1", "--out", &out.display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(out.join("graph.gap.txt")).unwrap(), "1: [1, 1]\n");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("graph.json")).unwrap()).unwrap();
    assert!(json["caveat"].is_string());
    assert!(out.join("state.json").exists());
    assert!(stdout(&o).contains("note:"));
}

#[test]
fn explore_resume_matches_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("full");
    let part = dir.path().join("part");
    let (full_s, part_s) = (full.display().to_string(), part.display().to_string());
    let s221 = seed("gosset221.json");
    assert_eq!(pdt(&["explore", "--seed", &s221, "--out", &full_s]).status.code(), Some(0));
    assert_eq!(pdt(&["explore", "--seed", &s221, "--out", &part_s, "--max-flips", "0"]).status.code(), Some(0));
    let state = part.join("state.json").display().to_string();
    let resumed = pdt(&["explore", "--resume", &state, "--out", &part_s]);
    assert_eq!(resumed.status.code(), Some(0), "{}", String::from_utf8_lossy(&resumed.stderr));
    for f in ["graph.gap.txt", "graph.json", "state.json"] {
        assert_eq!(fs::read(full.join(f)).unwrap(), fs::read(part.join(f)).unwrap(), "{f} differs");
    }
    assert_eq!(fs::read_to_string(full.join("graph.gap.txt")).unwrap(), "1:\n");

    // a second run is byte-identical
    let again = dir.path().join("again");
    assert_eq!(pdt(&["explore", "--seed", &s221, "--out", &again.display().to_string()]).status.code(), Some(0));
    assert_eq!(fs::read(full.join("graph.json")).unwrap(), fs::read(again.join("graph.json")).unwrap());
}

#[test]
fn flip_golden_and_mirror() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "s.json", "{\"dim\": 1, \"vertices\": [[1], [2]]}");
    let o = pdt(&["flip", &s, "--ridge", "[[2]]"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("rho_m = 2\n"));
    assert!(text.contains("witness = [3]\n"));
    assert!(text.contains("vertices = [[2],[3]]\n"));

    let o = pdt(&["flip", &seed("segment.json"), "--ridge", "[[0]]"]);
    assert!(stdout(&o).contains("vertices = [[-1],[0]]\n"));

    let o = pdt(&["flip", &s, "--ridge", "[[1],[2]]"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn qrank_and_cvp() {
    let dir = tempfile::tempdir().unwrap();
    let o = pdt(&["qrank", &seed("unit_square.json")]);
    assert_eq!(stdout(&o), "qrank = 2\n");
    let pts = write(dir.path(), "p.json", "[[0], [1]]");
    assert_eq!(stdout(&pdt(&["qrank", &pts])), "qrank = 1\n");

    let form = write(dir.path(), "q.json", "[[1, 0], [0, 1]]");
    let o = pdt(&["cvp", &form, "--center", "1/2,1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("dist2 = 1/2\nminimizers = 4\n"));

    let singular = write(dir.path(), "s.json", "[[1, 0], [0, 0]]");
    assert_eq!(pdt(&["cvp", &singular, "--center", "0,0"]).status.code(), Some(2));
    assert_eq!(pdt(&["cvp", &form, "--center", "0"]).status.code(), Some(1));
}

#[test]
fn builtin_seeds_validate() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["segment", "gosset221"] {
        let o = pdt(&["seed", name]);
        assert_eq!(o.status.code(), Some(0));
        let p = write(dir.path(), &format!("{name}.json"), &stdout(&o));
        assert_eq!(pdt(&["validate", &p]).status.code(), Some(0));
    }
}
