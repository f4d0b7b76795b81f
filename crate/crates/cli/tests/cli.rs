use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("msolearn-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msolearn")).args(args).env_remove("MSOLEARN_CAP_NODES").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// The report minus the timing section.
fn stable(o: &Output) -> String {
    stdout(o).split("--- timing").next().unwrap().to_string()
}

#[test]
fn learn1d_writes_hypothesis() {
    let dir = scratch("learn1d");
    let out = dir.join("h.json");
    let o = run(&[
        "learn1d",
        "--expr",
        data("fig1.cwx").to_str().unwrap(),
        "--train",
        data("ex11.txt").to_str().unwrap(),
        "--q",
        "3",
        "--ell",
        "1",
        "--set-budget",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let h: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(h["q"], 3);
    assert_eq!(h["setBudget"], 1);
    assert_eq!(h["params"].as_array().unwrap().len(), 1);
    assert!(h["exprDigest"].is_string());
}

#[test]
fn contradictory_sequence_has_no_consistent_parameters() {
    let dir = scratch("contra");
    let train = dir.join("t.txt");
    fs::write(&train, "v1 +\nv1 -\n").unwrap();
    let o = run(&[
        "learnhd",
        "--expr",
        data("fig1.cwx").to_str().unwrap(),
        "--train",
        train.to_str().unwrap(),
        "--formula",
        data("bipartite_side.mso").to_str().unwrap(),
        "--q",
        "3",
        "--ell",
        "1",
        "--set-budget",
        "1",
        "--verify",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("NoConsistent"), "{s}");
    assert!(s.contains("brute force agrees"), "{s}");
}

#[test]
fn bench_prints_table() {
    let o = run(&["bench", "--family", "cograph", "--sizes", "10,20"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("n\t|expr|\tseconds\ttypes"), "{s}");
    assert!(s.lines().any(|l| l.starts_with("20\t")), "{s}");
}

#[test]
fn reports_are_deterministic() {
    let dir = scratch("det");
    let args = |out: &str| {
        vec![
            "synth".to_string(),
            "--expr".into(),
            data("fig1.cwx").to_str().unwrap().into(),
            "--train".into(),
            data("ex11.txt").to_str().unwrap().into(),
            "--q".into(),
            "2".into(),
            "--ell".into(),
            "1".into(),
            "--emit-table".into(),
            "--out".into(),
            dir.join(out).to_str().unwrap().into(),
        ]
    };
    let a = run(&args("a.json").iter().map(String::as_str).collect::<Vec<_>>());
    let b = run(&args("a.json").iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stable(&a), stable(&b));
    assert!(stable(&a).contains("table:"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["learn1d"]).status.code(), Some(2));
    assert_eq!(run(&["mc", "--expr", "/nonexistent.cwx", "--formula", "x.mso"]).status.code(), Some(2));

    let dir = scratch("codes");
    let f = dir.join("tri.mso");
    fs::write(&f, "ex x. ex y. ex z. (E(x,y) & E(y,z) & E(x,z))\n").unwrap();
    let o = run(&["mc", "--expr", data("fig1.cwx").to_str().unwrap(), "--formula", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("verdict: false"));

    let o = Command::new(env!("CARGO_BIN_EXE_msolearn"))
        .args(["synth", "--expr", data("fig1.cwx").to_str().unwrap(), "--train", data("ex11.txt").to_str().unwrap()])
        .args(["--q", "3", "--ell", "1", "--set-budget", "1", "--out", dir.join("h.json").to_str().unwrap()])
        .env("MSOLEARN_CAP_NODES", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn pac_requires_seed() {
    let o = run(&["pac", "--expr", "a.cwx", "--dist", "d.json", "--q", "1", "--eps", "0.1", "--delta", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}
