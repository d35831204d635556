use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_k3monodromy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn enumerate_index_six() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "tf6.jsonl");
    let o = run(&[
        "enumerate",
        "--index",
        "6",
        "--torsion-free",
        "--genus",
        "0",
        "--out",
        &out,
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 2);
    let codes: Vec<String> = text
        .lines()
        .map(|l| {
            l.split("\"canonical_code\":\"")
                .nth(1)
                .unwrap()
                .split('"')
                .next()
                .unwrap()
                .to_string()
        })
        .collect();
    let mut sorted = codes.clone();
    sorted.sort();
    assert_eq!(codes, sorted);
}

#[test]
fn pipeline_matches_build_and_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let tf = path(dir.path(), "tf12.jsonl");
    let expanded = path(dir.path(), "k12.jsonl");
    let lifted = path(dir.path(), "k12-lifts.jsonl");
    assert!(run(&[
        "enumerate",
        "--index",
        "12",
        "--torsion-free",
        "--genus",
        "0",
        "--out",
        &tf
    ])
    .status
    .success());
    assert!(run(&["expand", "--in", &tf, "--out", &expanded])
        .status
        .success());
    assert!(run(&["lifts", "--in", &expanded, "--out", &lifted])
        .status
        .success());
    let report = run(&["report", "--in", &lifted, "--table", "k12"]);
    assert!(report.status.success());
    let tot = stdout(&report)
        .lines()
        .find(|l| l.starts_with("TOT"))
        .unwrap()
        .to_string();
    let cols: Vec<&str> = tot.split_whitespace().collect();
    assert_eq!(cols[1..], ["6", "14", "4", "3", "1", "41", "28"]);

    let one = path(dir.path(), "one.jsonl");
    let many = path(dir.path(), "many.jsonl");
    assert!(run(&[
        "--threads",
        "1",
        "build",
        "--max-tf-index",
        "18",
        "--out",
        &one
    ])
    .status
    .success());
    assert!(run(&[
        "--threads",
        "4",
        "build",
        "--max-tf-index",
        "18",
        "--out",
        &many
    ])
    .status
    .success());
    assert_eq!(fs::read(&one).unwrap(), fs::read(&many).unwrap());
    let text = fs::read_to_string(&one).unwrap();
    assert_eq!(text.lines().count(), 6 + 28 + 232);
}

#[test]
fn full_catalog_reports() {
    let dir = tempfile::tempdir().unwrap();
    let all = path(dir.path(), "all.jsonl");
    assert!(run(&["build", "--out", &all]).status.success());
    let totals = stdout(&run(&["report", "--in", &all, "--table", "totals"]));
    assert!(totals.contains("classes: 3228"), "{totals}");
    assert!(totals.contains("lifts: 3411"), "{totals}");
    let k24 = stdout(&run(&["report", "--in", &all, "--table", "k24"]));
    let mults: Vec<&str> = k24
        .lines()
        .skip(1)
        .filter_map(|l| {
            let cols: Vec<&str> = l.split_whitespace().collect();
            (cols.len() == 5).then(|| cols[3])
        })
        .collect();
    assert_eq!(mults.len(), 11);
    let mut mults: Vec<u32> = mults.iter().map(|m| m.parse().unwrap()).collect();
    mults.sort_unstable();
    assert_eq!(mults, [1, 3, 6, 9, 11, 24, 27, 27, 45, 81, 243]);

    let verify = run(&["verify", "--in", &all, "--samples", "200"]);
    assert!(verify.status.success(), "{}", stdout(&verify));

    let dot = path(dir.path(), "g.dot");
    assert!(run(&[
        "export-dot",
        "--in",
        &all,
        "--id",
        "3,3,3,3-A",
        "--out",
        &dot
    ])
    .status
    .success());
    let graph = fs::read_to_string(&dot).unwrap();
    assert_eq!(graph.matches(" -- ").count(), 12);
}

#[test]
fn failures_have_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = path(dir.path(), "missing.jsonl");
    let o = run(&["report", "--in", &missing, "--table", "totals"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error[input]:"));

    assert_eq!(
        run(&["report", "--in", &missing, "--table", "k99"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["enumerate"]).status.code(), Some(2));

    let bad = path(dir.path(), "bad.jsonl");
    fs::write(&bad, "{not json}\n").unwrap();
    let o = run(&["report", "--in", &bad, "--table", "k6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));

    let empty = path(dir.path(), "empty.jsonl");
    fs::write(&empty, "").unwrap();
    assert!(run(&["report", "--in", &empty, "--table", "tf-counts"])
        .status
        .success());

    // A record whose stored automorphism count is wrong passes parsing but
    // fails verification.
    let six = path(dir.path(), "six.jsonl");
    assert!(run(&["build", "--max-tf-index", "6", "--out", &six])
        .status
        .success());
    let text = fs::read_to_string(&six).unwrap();
    let corrupted = text.replacen("\"aut_order\":1", "\"aut_order\":7", 1);
    assert_ne!(corrupted, text);
    fs::write(&six, corrupted).unwrap();
    assert_eq!(
        run(&["verify", "--in", &six, "--samples", "10"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn lax_mode_keeps_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let six = path(dir.path(), "six.jsonl");
    assert!(run(&["build", "--max-tf-index", "6", "--out", &six])
        .status
        .success());
    let text = fs::read_to_string(&six)
        .unwrap()
        .replacen('{', "{\"comment\":\"x\",", 1);
    fs::write(&six, &text).unwrap();
    let out = path(dir.path(), "out.jsonl");
    assert_eq!(
        run(&["lifts", "--in", &six, "--out", &out]).status.code(),
        Some(2)
    );
    assert!(run(&["--lax", "lifts", "--in", &six, "--out", &out])
        .status
        .success());
    assert!(fs::read_to_string(&out)
        .unwrap()
        .contains("\"comment\":\"x\""));
}
