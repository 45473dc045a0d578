//! End-to-end tests of the `lexfact` binary: flags, formats, exit codes.

use std::fs;
use std::process::{Command, Output};

fn lexfact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexfact"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn count_reports_count_and_seconds() {
    let output = lexfact(&["count", "--gens", "13,37,38", "--n", "1000"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let line = stdout(&output);
    let line = line.trim_end();
    let (count, seconds) = line.split_once(' ').expect("two fields");
    assert_eq!(count, "count=30");
    let seconds = seconds.strip_prefix("seconds=").expect("seconds field");
    assert!(seconds.parse::<f64>().is_ok(), "seconds value: {seconds}");
    assert_eq!(
        seconds.split('.').nth(1).map(str::len),
        Some(3),
        "seconds printed with millisecond precision: {seconds}"
    );
}

#[test]
fn count_is_stable_across_pool_shapes() {
    for extra in [
        &["--workers", "1"][..],
        &["--workers", "7"][..],
        &[
            "--workers",
            "4",
            "--buffer",
            "1",
            "--steps-between-splits",
            "1",
        ][..],
        &["--modulo", "on"][..],
        &["--modulo", "off"][..],
    ] {
        let mut args = vec!["count", "--gens", "13,37,38,40", "--n", "1000"];
        args.extend_from_slice(extra);
        let output = lexfact(&args);
        assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
        assert!(
            stdout(&output).starts_with("count=274 "),
            "args {args:?} produced {}",
            stdout(&output)
        );
    }
}

#[test]
fn count_of_an_empty_set_is_zero() {
    let output = lexfact(&["count", "--gens", "2,4", "--n", "7"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(stdout(&output).starts_with("count=0 "));
}

#[test]
fn list_writes_text_to_stdout() {
    let output = lexfact(&["list", "--gens", "2,3", "--n", "10", "--sort"]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), "5 0\n2 2\n");
}

#[test]
fn list_single_worker_arrives_in_stream_order() {
    let output = lexfact(&["list", "--gens", "2,3", "--n", "10", "--workers", "1"]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout(&output), "5 0\n2 2\n");
}

#[test]
fn list_writes_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let output = lexfact(&[
        "list",
        "--gens",
        "2,3",
        "--n",
        "10",
        "--sort",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert_eq!(stdout(&output), "", "file output leaves stdout empty");
    assert_eq!(fs::read_to_string(&path).unwrap(), "a1,a2\n5,0\n2,2\n");
}

#[test]
fn list_csv_of_an_empty_set_is_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let output = lexfact(&[
        "list",
        "--gens",
        "2,4",
        "--n",
        "7",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&path).unwrap(), "a1,a2\n");
}

#[test]
fn list_rejects_unwritable_output_paths() {
    let output = lexfact(&[
        "list",
        "--gens",
        "2,3",
        "--n",
        "10",
        "--output",
        "/nonexistent-dir/out.txt",
    ]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("cannot create"));
}

#[test]
fn bench_passes_matching_scenarios() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenarios.txt");
    fs::write(&path, "# tiny suite\n2,3;10;2\n13,37,38;1000;30\n").unwrap();
    let output = lexfact(&["bench", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.contains("pass"), "output: {text}");
    assert!(!text.contains("FAIL"), "output: {text}");
    assert!(text.contains("all 2 scenarios passed"), "output: {text}");
}

#[test]
fn bench_fails_on_a_count_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenarios.txt");
    fs::write(&path, "2,3;10;2\n13,37,38;1000;31\n").unwrap();
    let output = lexfact(&["bench", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let text = stdout(&output);
    assert!(text.contains("FAIL"), "output: {text}");
    assert!(stderr(&output).contains("1 of 2 scenarios failed"));
}

#[test]
fn bench_reports_malformed_lines_with_their_number() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scenarios.txt");
    fs::write(&path, "2,3;10;2\nnot a scenario\n").unwrap();
    let output = lexfact(&["bench", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("line 2"));
}

#[test]
fn bench_rejects_missing_files() {
    let output = lexfact(&["bench", "/nonexistent-dir/scenarios.txt"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("cannot read"));
}

#[test]
fn repository_scenario_file_parses_and_small_rows_pass() {
    // Only the quick rows here; the full file runs in release benchmarking.
    let all = fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/table1.txt"
    ))
    .unwrap();
    let quick: Vec<&str> = all
        .lines()
        .filter(|line| line.contains(";1000;") || line.contains(";5000;"))
        .collect();
    assert_eq!(quick.len(), 6, "expected the six n<=5000 rows");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("quick.txt");
    fs::write(&path, quick.join("\n")).unwrap();
    let output = lexfact(&["bench", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    assert!(stdout(&output).contains("all 6 scenarios passed"));
}

#[test]
fn usage_errors_exit_two() {
    // Unknown flag (clap) and domain validation both use exit code 2.
    assert_eq!(lexfact(&["count", "--bogus"]).status.code(), Some(2));
    assert_eq!(lexfact(&["count", "--n", "10"]).status.code(), Some(2));

    let output = lexfact(&["count", "--gens", "2,0,3", "--n", "10"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("generators must be positive"));

    let output = lexfact(&["count", "--gens", "2,3", "--n", "10", "--workers", "0"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("--workers"));

    let output = lexfact(&["count", "--gens", "18446744073709551615", "--n", "1"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr(&output).contains("2^64"));
}

#[test]
fn selftest_smoke_run_reports_ok() {
    let output = lexfact(&[
        "selftest",
        "--instances",
        "3",
        "--seed",
        "7",
        "--worker-counts",
        "1,2",
        "--max-element",
        "300",
    ]);
    assert_eq!(output.status.code(), Some(0), "stderr: {}", stderr(&output));
    let text = stdout(&output);
    assert!(text.starts_with("ok: "), "output: {text}");
    assert!(text.contains("W∈{1,2}"), "output: {text}");
    assert!(text.contains("modulo on/off"), "output: {text}");
}
