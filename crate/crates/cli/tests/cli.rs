use std::process::Command;

fn qcomm(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qcomm")).args(args).output().expect("spawn qcomm");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn parity_has_full_approximate_degree() {
    let (code, out, _) = qcomm(&["adeg", "--fn", "parity", "--n", "5"]);
    assert_eq!(code, 0);
    assert_eq!(column(&out, "adeg"), ["5"]);
}

#[test]
fn addr_discrepancy_within_bound() {
    let (code, out, _) = qcomm(&["disc", "--gadget", "addr", "--n", "8"]);
    assert_eq!(code, 0);
    assert_eq!(column(&out, "within_bound"), ["true"]);
    assert_eq!(column(&out, "disc_uniform"), ["0.136719"]);
}

#[test]
fn same_seed_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let args = ["search", "--n", "64,128", "--t", "1,2", "--trials", "40", "--seed", "7", "--csv"];
        let mut args: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        args.push(&p);
        let (code, _, _) = qcomm(&args);
        assert_eq!(code, 0);
        std::fs::read(&path).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 5);
}

#[test]
fn jsonl_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let jsonl = dir.path().join("r.jsonl");
    let (code, _, _) = qcomm(&[
        "count",
        "--n",
        "64",
        "--t",
        "4",
        "--z",
        "0,2",
        "--trials",
        "10",
        "--csv",
        csv.to_str().unwrap(),
        "--jsonl",
        jsonl.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let csv = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<serde_json::Value> = std::fs::read_to_string(jsonl)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(column(&csv, "z"), ["0", "2"]);
    assert_eq!(rows[1]["z"], "2");
    assert_eq!(rows[0]["noise"], "phases:0.0025");
}

#[test]
fn conflicting_constants_are_rejected() {
    let (code, _, err) = qcomm(&["search", "--noise", "phases:0.0025", "--eps-base", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("eps base"));
}

#[test]
fn verify_reports_each_check() {
    let (code, out, _) = qcomm(&["verify", "--criterion", "1"]);
    assert_eq!(code, 0);
    assert!(out.lines().all(|l| l.starts_with("[PASS] 1.")));
}

#[test]
fn reductions_hold_for_addr() {
    let (code, out, _) = qcomm(&["reductions", "--gadget", "addr:2", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(column(&out, "holds"), ["true"]);
}
