use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pseudoanalytic")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Value after `prefix` on the first stderr line that starts with it.
fn reported(out: &Output, prefix: &str) -> f64 {
    let err = stderr(out);
    let line = err.lines().find(|l| l.starts_with(prefix)).unwrap_or_else(|| panic!("no {prefix:?} in {err}"));
    line[prefix.len()..].trim().parse().unwrap()
}

#[test]
fn formal_power_matches_the_closed_form() {
    let out = run(&[
        "formal-power",
        "--ctx",
        "f_y2",
        "-n",
        "1",
        "-a",
        "1",
        "--center",
        "1,2",
        "--grid",
        "50x50",
        "--box",
        "0.5,3,0.5,3",
        "--oracle",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(reported(&out, "max rel err:") <= 1e-6);
    let csv = stdout(&out);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,re,im,exact_re,exact_im,rel_err"));
    assert_eq!(lines.count(), 2500);
}

#[test]
fn unit_powers_are_monomials() {
    let out =
        run(&["formal-power", "--ctx", "unit", "-n", "3", "-a", "1", "--center", "0,0", "--grid", "9x9", "--oracle"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(reported(&out, "max rel err:") <= 1e-12);
}

#[test]
fn transplanted_power_matches_its_closed_form() {
    let out = run(&[
        "formal-power",
        "--ctx",
        "g_1xy3",
        "-n",
        "2",
        "-a",
        "i",
        "--center",
        "1,2",
        "--via-transplant",
        "f_y2",
        "--grid",
        "4x4",
        "--oracle",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(reported(&out, "max rel err:") <= 1e-6);
}

#[test]
fn rows_are_row_major() {
    let out = run(&[
        "formal-power",
        "--ctx",
        "unit",
        "-n",
        "1",
        "--center",
        "0,0",
        "--grid",
        "3x2",
        "--box",
        "-0.5,0.5,-0.5,0.5",
    ]);
    assert_eq!(code(&out), 0);
    let xy: Vec<(f64, f64)> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| {
            let mut c = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (c.next().unwrap(), c.next().unwrap())
        })
        .collect();
    assert_eq!(xy, [(-0.5, -0.5), (0.0, -0.5), (0.5, -0.5), (-0.5, 0.5), (0.0, 0.5), (0.5, 0.5)]);
}

#[test]
fn json_output_carries_the_job() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let out = run(&[
        "--quad-order",
        "12",
        "formal-power",
        "--ctx",
        "f_y2",
        "-n",
        "2",
        "-a",
        "0.5,-1",
        "--center",
        "1,2",
        "--grid",
        "3x3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let v = read_json(&path);
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["schema", "spec", "rows"]);
    assert_eq!(v["schema"], "pseudoanalytic/1");
    assert_eq!(v["spec"]["command"], "formal-power");
    assert_eq!(v["spec"]["context"], "f_y2");
    assert_eq!(v["spec"]["tolerances"]["quad_order"], 12);
    assert_eq!(v["spec"]["params"]["a"]["im"], -1.0);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r["re"].is_f64() && r["im"].is_f64()));
}

#[test]
fn excluded_disc_gives_null_cells() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("k.json");
    let args = [
        "kernel-grid",
        "--ctx",
        "unit",
        "--center",
        "0,0",
        "--base",
        "0.5,-0.5",
        "--box",
        "-0.5,0.5,-0.5,0.5",
        "--grid",
        "3x3",
    ];
    let out = run(&[&args[..], &["--format", "json", "--out", json.to_str().unwrap()]].concat());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = read_json(&json);
    let middle = &v["rows"][4];
    assert_eq!(middle["x"], 0.0);
    assert!(middle["re"].is_null() && middle["im"].is_null() && middle["H"].is_null());
    let corner = &v["rows"][0];
    assert!((corner["H"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = run(&args);
    let csv = stdout(&out);
    assert_eq!(csv.lines().nth(5), Some("0e0,0e0,,,"));
}

#[test]
fn unit_kernel_is_the_pole() {
    let out = run(&[
        "kernel-grid",
        "--ctx",
        "unit",
        "-a",
        "0.3,-2",
        "--center",
        "0.2,0.1",
        "--box",
        "-0.9,0.9,-0.9,0.9",
        "--base",
        "-0.5,-0.7",
        "--grid",
        "15x15",
        "--closed-form",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(reported(&out, "max rel err against the closed form:") <= 1e-12);
    for line in stdout(&out).lines().skip(1) {
        let h = line.split(',').nth(4).unwrap();
        assert!(h.is_empty() || (h.parse::<f64>().unwrap() - 1.0).abs() < 1e-12, "{line}");
    }
}

#[test]
fn xy_kernel_matches_its_closed_form() {
    let out = run(&["kernel-grid", "--closed-form"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(reported(&out, "max rel err against the closed form:") <= 1e-6);
}

#[test]
fn output_is_deterministic() {
    let args = ["kernel-grid", "--grid", "6x6", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["verify", "--ctx", "unit", "--format", "csv"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["formal-power", "--ctx", "nope", "-n", "1", "--center", "1,2"],
        &["formal-power", "--ctx", "f_y2", "-n", "1", "--center", "1,-2"],
        &["formal-power", "--ctx", "f_y2", "-n", "1", "--center", "1,2", "--grid", "1x5"],
        &["formal-power", "--ctx", "f_y2", "-n", "1", "--center", "1,2", "--box", "3,1,1,2"],
        &["formal-power", "--ctx", "g_xy", "-n", "1", "--center", "1,2", "--oracle"],
        &["--quad-order", "0", "formal-power", "--ctx", "f_y2", "-n", "1", "--center", "1,2"],
        &["--h", "-1", "formal-power", "--ctx", "f_y2", "-n", "1", "--center", "1,2"],
        &[
            "kernel-grid",
            "--ctx",
            "hyperbolic_unit",
            "--center",
            "0,0",
            "--box",
            "-0.5,0.5,-0.5,0.5",
            "--base",
            "0.5,0",
        ],
        &["kernel-grid", "--base", "1,5"],
        &["kernel-grid", "--ctx", "f_y2"],
        &["verify", "--perturb", "no.such.check"],
        &["sequence", "--ctx", "unit", "--via-transplant", "f_y2"],
        &["formal-power", "--center", "1,2"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn tightened_tolerance_is_a_verification_failure() {
    let out = run(&[
        "--tol",
        "1e-30",
        "formal-power",
        "--ctx",
        "f_y2",
        "-n",
        "1",
        "--center",
        "1,2",
        "--grid",
        "4x4",
        "--oracle",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("exceeds"));
}

#[test]
fn verify_lists_enough_invariants() {
    let out = run(&["verify", "--list"]);
    assert_eq!(code(&out), 0);
    let names: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();
    assert!(names.len() >= 25);
    let mut unique = names.clone();
    unique.sort();
    unique.dedup();
    assert_eq!(unique.len(), names.len());
}

#[test]
fn hyperbolic_checks_pass() {
    let out = run(&["verify", "--ctx", "hyperbolic_unit"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    for name in ["hyperbolic.cauchy_riemann", "hyperbolic.klein_gordon_factorization"] {
        assert!(text.lines().any(|l| l.starts_with("PASS") && l.contains(name)), "{name} missing:\n{text}");
    }
}

#[test]
fn perturbation_fails_the_named_invariant() {
    for name in ["unit.vekua_residual", "transplant.unit.kernel_is_pole", "algebra.elliptic.inverse"] {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let out =
            run(&["verify", "--ctx", "unit", "--perturb", name, "--format", "json", "--out", path.to_str().unwrap()]);
        assert_eq!(code(&out), 1, "{name}");
        let v = read_json(&path);
        let rows = v["rows"].as_array().unwrap();
        let failed: Vec<&str> =
            rows.iter().filter(|r| r["passed"] == false).map(|r| r["name"].as_str().unwrap()).collect();
        assert_eq!(failed, [name]);
    }
}

#[test]
fn periodic_sequence_repeats() {
    let out = run(&["sequence", "--ctx", "f_y2", "-m", "3", "--grid", "3x3"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let csv = stdout(&out);
    let by_m: Vec<Vec<&str>> = (0..4)
        .map(|m| csv.lines().skip(1).filter(|l| l.starts_with(&format!("{m},"))).map(|l| &l[2..]).collect())
        .collect();
    assert_eq!(by_m[0].len(), 9);
    assert!(by_m.iter().all(|rows| *rows == by_m[0]));
}

#[test]
fn unit_sequence_is_one_and_i() {
    let out = run(&["sequence", "--ctx", "unit", "-m", "2", "--grid", "2x2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    for line in stdout(&out).lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(&cells[3..], ["1e0", "0e0", "0e0", "1e0", "ok"], "{line}");
    }
}

#[test]
fn transplanted_sequence_first_successor() {
    let out = run(&["sequence", "--ctx", "g_1xy3", "-m", "1", "--grid", "2x2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("ok   F_1 against its closed form"), "{err}");
    assert!(err.contains("ok   successor residual 0->1"), "{err}");
}

#[test]
fn failed_successor_is_reported_as_a_row() {
    let out = run(&["sequence", "--ctx", "g_xy", "-m", "1", "--grid", "2x2"]);
    assert_eq!(code(&out), 1);
    let csv = stdout(&out);
    let last = csv.lines().last().unwrap();
    assert!(last.starts_with("1,,,,,,,"), "{last}");
    assert!(last.contains("not a generating pair"));
}

#[test]
fn coefficients_and_grids_parse_from_the_command_line() {
    let dir = tempfile::tempdir().unwrap();
    for (a, re, im) in [("i", 0.0, 1.0), ("-i", 0.0, -1.0), ("2", 2.0, 0.0), ("1,-2", 1.0, -2.0)] {
        let path = dir.path().join("a.json");
        let out = run(&[
            "formal-power",
            "--ctx",
            "unit",
            "-n",
            "0",
            "-a",
            a,
            "--center",
            "0,0",
            "--grid",
            "5x4",
            "--format",
            "json",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{a}: {}", stderr(&out));
        let v = read_json(&path);
        assert_eq!(v["spec"]["params"]["a"]["re"], re);
        assert_eq!(v["spec"]["params"]["a"]["im"], im);
        assert_eq!(v["spec"]["grid"]["nx"], 5);
        assert_eq!(v["spec"]["grid"]["ny"], 4);
        assert_eq!(v["rows"].as_array().unwrap().len(), 20);
    }
    for bad in [&["-a", "1,2,3"][..], &["--center", "1,2,3"], &["--grid", "5"], &["--box", "0,1,0"]] {
        let out = run(&[&["formal-power", "--ctx", "unit", "-n", "1", "--center", "0,0"], bad].concat());
        assert_eq!(code(&out), 2, "{bad:?}");
    }
}
