use std::path::PathBuf;
use std::process::{Command, Output};

fn acbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acbench")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap().trim().to_string()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("acbench-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_wn_prints_sixteen_letters() {
    let o = acbench(&["gen-wn", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).split_whitespace().count(), 16);
}

#[test]
fn solve_pipeline() {
    let w = stdout(&acbench(&["gen-wn", "--n", "4"]));
    let o = acbench(&["solve", "--group", "s2", "--word", &w]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "trivial"));
    let o = acbench(&["solve", "--group", "s3", "--word", "t x t^-1 x^-1"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(1), "nontrivial"));
}

#[test]
fn fib_bound_of_ten() {
    assert_eq!(stdout(&acbench(&["fib-bound", "--m", "10"])), "144");
}

#[test]
fn trivialize_then_verify() {
    let path = scratch("trace.json");
    let p = path.to_str().unwrap();
    for n in ["2", "3", "4", "5"] {
        let o = acbench(&["trivialize", "--seed", "s2", "--n", n, "--out", p]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let o = acbench(&["verify-trace", "--trace", p]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).starts_with("accepted"));
    }
    let o = acbench(&["--json", "acc-bounds", "--n", "4", "--trace", p]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["bounds"]["upper"], 32);
}

#[test]
fn json_output_is_versioned() {
    for args in [
        vec!["--json", "gen-v", "--m", "2"],
        vec!["--json", "measures", "--input", "bridson"],
        vec!["--json", "fixtures"],
        vec!["--json", "area", "--group", "q1", "--word", "x y x^-1 y^-1"],
    ] {
        let o = acbench(&args);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(v["format_version"], 1, "{args:?}");
    }
}

#[test]
fn built_presentations_parse_back() {
    let w = stdout(&acbench(&["gen-wn", "--n", "3"]));
    let o = acbench(&["build-pw", "--seed", "s2", "--a0", "t", "--a1", "x", "--w", &w]);
    let path = scratch("pw.txt");
    std::fs::write(&path, stdout(&o)).unwrap();
    let o = acbench(&["--json", "measures", "--input", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["measures"]["generators"], 4);
    assert_eq!(v["measures"]["balanced"], true);
}

#[test]
fn search_finds_a_short_trivialization() {
    let path = scratch("search.json");
    let o = acbench(&["search", "--input", "< a, b | a b^2, a^2 b^3 >", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(acbench(&["verify-trace", "--trace", path.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn caps_and_usage_errors_have_their_own_codes() {
    let o = acbench(&["area", "--group", "s2", "--word", "t x t^-1 x^-1", "--max-depth", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(acbench(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(acbench(&["verify-trace", "--trace", "/nonexistent/trace.json"]).status.code(), Some(3));
    assert_eq!(acbench(&["gen-wn", "--n", "0"]).status.code(), Some(3));
}

#[test]
fn threads_do_not_change_answers() {
    let args = ["--json", "area", "--group", "q2", "--word", "a^4 s^-2 a^-1 s^2", "--max-len", "24"];
    let one = acbench(&[&args[..], &["--threads", "1"]].concat());
    let two = acbench(&[&args[..], &["--threads", "2"]].concat());
    let area = |o: &Output| serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["area"].clone();
    assert_eq!(area(&one), area(&two));
    assert_eq!(area(&one)["area"], 3);
}
