//! End-to-end CLI behavior: exit codes, file formats, round trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_batchcodes"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("batchcodes-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn construct_then_verify_round_trips() {
    for (k, r, t, mode) in [
        ("5", "2", "3", "batch"),
        ("8", "4", "3", "batch"),
        ("12", "3", "5", "pir"),
        ("11", "3", "3", "batch"),
        ("9", "3", "2", "batch"),
    ] {
        let path = scratch(&format!("rt-{k}-{r}-{t}.txt"));
        let out = run(&[
            "construct",
            "-k",
            k,
            "-r",
            r,
            "-t",
            t,
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "construct {k} {r} {t}");
        assert!(stdout(&out).starts_with("family="));
        let out = run(&[
            "verify",
            path.to_str().unwrap(),
            "-r",
            r,
            "-t",
            t,
            "--mode",
            mode,
        ]);
        assert_eq!(out.status.code(), Some(0), "verify {k} {r} {t}");
        assert!(stdout(&out).trim().ends_with("=yes"));
    }
}

#[test]
fn construct_without_out_prints_matrix() {
    let out = run(&["construct", "-k", "4", "-r", "2", "-t", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("4 6\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn provenance_header_is_accepted_by_parser() {
    let path = scratch("header.txt");
    run(&[
        "construct",
        "-k",
        "6",
        "-r",
        "3",
        "-t",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# family=t2-block"));
    let out = run(&["dist", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "d=2");
}

#[test]
fn uncovered_parameters_exit_2() {
    let out = run(&["construct", "-k", "7", "-r", "3", "-t", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_no_is_exit_1() {
    let path = scratch("identity.txt");
    std::fs::write(&path, "3 3\n100\n010\n001\n").unwrap();
    let out = run(&[
        "verify",
        path.to_str().unwrap(),
        "-r",
        "3",
        "-t",
        "2",
        "--mode",
        "pir",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "PIR(3,2)=no");
}

#[test]
fn malformed_matrix_exits_4() {
    let path = scratch("ragged.txt");
    std::fs::write(&path, "2 3\n101\n10\n").unwrap();
    for args in [
        vec!["verify", path.to_str().unwrap(), "-r", "2", "-t", "2"],
        vec!["dist", path.to_str().unwrap()],
        vec!["maxt", path.to_str().unwrap(), "-r", "2"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(4), "{args:?}");
    }
}

#[test]
fn budget_env_var_gives_inconclusive_exit_3() {
    let path = scratch("budget.txt");
    run(&[
        "construct",
        "-k",
        "5",
        "-r",
        "2",
        "-t",
        "3",
        "-o",
        path.to_str().unwrap(),
    ]);
    let out = bin()
        .args(["verify", path.to_str().unwrap(), "-r", "2", "-t", "3"])
        .env("BATCH_SEARCH_BUDGET", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("=inconclusive"));
    let out = bin()
        .args(["verify", path.to_str().unwrap(), "-r", "2", "-t", "3"])
        .env("BATCH_SEARCH_BUDGET", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn maxt_reports_exact_value() {
    let path = scratch("maxt.txt");
    run(&[
        "construct",
        "-k",
        "6",
        "-r",
        "3",
        "-t",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    let out = run(&["maxt", path.to_str().unwrap(), "-r", "3", "--mode", "batch"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "max_t=2 exact");
}

#[test]
fn certs_dump_is_one_based_json() {
    let path = scratch("certs-matrix.txt");
    let certs = scratch("certs.json");
    run(&[
        "construct",
        "-k",
        "4",
        "-r",
        "2",
        "-t",
        "2",
        "-o",
        path.to_str().unwrap(),
    ]);
    let out = run(&[
        "verify",
        path.to_str().unwrap(),
        "-r",
        "2",
        "-t",
        "2",
        "--certs",
        certs.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&certs).unwrap()).unwrap();
    let arr = parsed.as_array().unwrap();
    assert_eq!(arr.len(), 10); // C(4+1, 2) multisets
    for cert in arr {
        let query = cert["query"].as_array().unwrap();
        assert!(query.iter().all(|v| (1..=4).contains(&v.as_u64().unwrap())));
        assert_eq!(cert["sets"].as_array().unwrap().len(), query.len());
    }
}

#[test]
fn table_csv_parses_back_losslessly() {
    let out = run(&[
        "table", "--k-min", "4", "--k-max", "8", "--r-min", "2", "--r-max", "4", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "k,r,lb_t2,lb_t3,lb_t4,ub_t2,ub_t3,ub_t4"
    );
    let mut rows = 0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 8);
        let k: u64 = cells[0].parse().unwrap();
        let r: u64 = cells[1].parse().unwrap();
        assert!((4..=8).contains(&k) && (2..=4).contains(&r));
        for cell in &cells[2..] {
            assert!(*cell == "—" || cell.parse::<u64>().is_ok());
        }
        rows += 1;
    }
    assert_eq!(rows, 15);
}

#[test]
fn table_bad_ranges_exit_2() {
    let out = run(&[
        "table", "--k-min", "5", "--k-max", "4", "--r-min", "2", "--r-max", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "table", "--k-min", "4", "--k-max", "5", "--r-min", "1", "--r-max", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn koptgen_writes_expected_rows() {
    let path = scratch("kopt.csv");
    let out = run(&[
        "koptgen",
        "--n-max",
        "7",
        "--d-max",
        "7",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("q,n,d,k\n"));
    assert!(text.contains("\n2,7,3,4\n"));
    assert!(text.contains("\n2,3,3,1\n"));
    for n in 1..=7 {
        assert!(text.contains(&format!("\n2,{n},1,{n}\n")));
    }
    // idempotent
    let again = run(&[
        "koptgen",
        "--n-max",
        "7",
        "--d-max",
        "7",
        path.to_str().unwrap(),
    ]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn koptgen_cap_exit_2() {
    let path = scratch("kopt-cap.csv");
    let out = run(&[
        "koptgen",
        "--n-max",
        "15",
        "--d-max",
        "3",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_degenerate_k1() {
    let out = run(&["bounds", "-k", "1", "-r", "2", "-t", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("summary: 2 <= B(1,2,2) <= 2"));
}
