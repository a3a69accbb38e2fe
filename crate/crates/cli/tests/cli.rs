use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fock-radial");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

const A02: &str = r#"{"type":"laguerre_basic","m":0,"xi":2}"#;

#[test]
fn eigs_closed_form_rows() {
    let o = run(&["eigs", "--symbol", A02, "--n-max", "3"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("n,gamma,gamma_im,engine,est_err\n"));
    let rows = csv_rows(&text);
    let got: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    let want = [("0", "1"), ("1", "0.5"), ("2", "0.25"), ("3", "0.125")];
    assert_eq!(got.len(), 4);
    for ((n, g), (wn, wg)) in got.iter().zip(want) {
        assert_eq!((n.as_str(), g.as_str()), (wn, wg));
    }
}

#[test]
fn eigs_constant_by_quadrature() {
    let o = run(&[
        "eigs",
        "--symbol",
        r#"{"type":"constant","value":1}"#,
        "--n-max",
        "5",
        "--engine",
        "quad",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 6);
    for r in rows {
        assert!((r[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
        assert_eq!(r[3], "quad");
    }
}

#[test]
fn eigs_both_engines_and_empty_combo() {
    let o = run(&[
        "eigs",
        "--symbol",
        r#"{"type":"combo","xi":2,"coefficients":[],"offset":0}"#,
        "--n-max",
        "4",
        "--engine",
        "both",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("n,gamma,gamma_im,engine,est_err,abs_diff\n"));
    for r in csv_rows(&text) {
        assert_eq!(r[1], "0");
        assert_eq!(r[5], "0");
    }

    let o = run(&[
        "eigs",
        "--symbol",
        r#"{"type":"laguerre_basic","m":1,"xi":4}"#,
        "--n-max",
        "6",
        "--engine",
        "both",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&stdout(&o));
    for row in v["rows"].as_array().unwrap() {
        assert!(row["abs_diff"].as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn eigs_reads_symbol_file_and_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("s.json");
    fs::write(&sym, A02).unwrap();
    let out = dir.path().join("out.csv");
    let o = run(&[
        "eigs",
        "--symbol",
        sym.to_str().unwrap(),
        "--n-max",
        "2",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).is_empty());
    assert_eq!(csv_rows(&fs::read_to_string(out).unwrap()).len(), 3);
}

#[test]
fn usage_errors_exit_1() {
    for args in [
        vec!["bogus"],
        vec!["eigs"],
        vec!["eigs", "--symbol", A02, "--n-max", "-1"],
        vec!["eigs", "--symbol", A02, "--format", "xml"],
        vec!["eigs", "--symbol", A02, "--rel-tol", "0"],
        vec![
            "approximate",
            "--target",
            "generator:inverse_plus_one",
            "--epsilon",
            "0",
        ],
        vec![
            "approximate",
            "--target",
            "generator:inverse_plus_one",
            "--epsilon",
            "-1",
        ],
        vec![
            "smooth",
            "--target",
            "generator:cos_sqrt?n=50",
            "--delta",
            "1.5",
        ],
        vec![
            "smooth",
            "--target",
            "generator:cos_sqrt?n=50",
            "--delta",
            "0",
        ],
        vec!["symbol-eval", "--symbol", A02, "--x", "-1"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 1, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["eigs", "--help"])), 0);
}

#[test]
fn bad_thread_count_is_usage_error() {
    let o = Command::new(BIN)
        .args(["eigs", "--symbol", A02])
        .env("FOCK_RADIAL_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 1);
    let o = Command::new(BIN)
        .args(["eigs", "--symbol", A02, "--engine", "quad", "--n-max", "3"])
        .env("FOCK_RADIAL_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        vec![
            "eigs",
            "--symbol",
            r#"{"type":"laguerre_basic","m":0,"xi":1}"#,
        ],
        vec!["eigs", "--symbol", r#"{"type":"nope"}"#],
        vec!["eigs", "--symbol", "/nonexistent/symbol.json"],
        vec![
            "approximate",
            "--target",
            "generator:cos_sqrt?n=100",
            "--epsilon",
            "0.1",
        ],
        vec![
            "approximate",
            "--target",
            "generator:inverse_plus_one?n=10",
            "--epsilon",
            "0.05",
        ],
        vec![
            "diagnose",
            "--target",
            r#"{"values":[],"tail":{"kind":"zero"}}"#,
        ],
        vec!["verify", "--plan", "/nonexistent/plan.json"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn unknown_tail_message_names_the_requirement() {
    let o = run(&[
        "approximate",
        "--target",
        r#"{"values":[1,0.5],"tail":{"kind":"unknown"}}"#,
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("tail"));
}

#[test]
fn failed_certification_exits_2() {
    // Forcing the minimum scale breaks the error budget.
    let o = run(&[
        "approximate",
        "--target",
        r#"{"values":[1,1,1],"tail":{"kind":"zero"}}"#,
        "--epsilon",
        "0.01",
        "--xi",
        "2",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("certification failed"));
}

#[test]
fn numeric_failure_exits_3() {
    let o = run(&[
        "eigs",
        "--symbol",
        r#"{"type":"laguerre_basic","m":60,"xi":2}"#,
        "--engine",
        "quad",
        "--n-max",
        "10",
        "--max-subdivisions",
        "1",
    ]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(!stdout(&o).is_empty());
}

#[test]
fn approximate_delta_zero() {
    let o = run(&[
        "approximate",
        "--target",
        r#"{"values":[1],"tail":{"kind":"zero"}}"#,
        "--epsilon",
        "0.2",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&stdout(&o));
    assert_eq!(v["plan"]["xi"], 10);
    assert_eq!(v["plan"]["N"], 1);
    let max = v["report"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["abs_error"].as_f64().unwrap())
        .fold(0.0, f64::max);
    assert!((max - 0.1).abs() < 1e-15);
}

#[test]
fn approximate_zero_target() {
    let o = run(&[
        "approximate",
        "--target",
        r#"{"values":[0,0,0],"tail":{"kind":"zero"}}"#,
        "--epsilon",
        "1e-6",
    ]);
    assert_eq!(code(&o), 0);
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[3] == "0"));
}

fn verified_error(plan: &Path) -> f64 {
    json(&fs::read_to_string(plan).unwrap())["verified_error"]
        .as_f64()
        .unwrap()
}

#[test]
fn plan_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    let o = run(&[
        "approximate",
        "--target",
        "generator:geometric?q=0.5&offset=1&n=80",
        "--epsilon",
        "0.1",
        "--plan-out",
        plan.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let recorded = verified_error(&plan);

    let o = run(&[
        "verify",
        "--plan",
        plan.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&stdout(&o));
    assert_eq!(v["report"]["verified_error"].as_f64().unwrap(), recorded);
    assert!(!stderr(&o).contains("warning"));
}

#[test]
fn verify_rejects_tampered_plan() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    run(&[
        "approximate",
        "--target",
        r#"{"values":[1,1],"tail":{"kind":"zero"}}"#,
        "--epsilon",
        "0.1",
        "--plan-out",
        plan.to_str().unwrap(),
    ]);
    let mut v = json(&fs::read_to_string(&plan).unwrap());
    v["xi"] = 2.into();
    fs::write(&plan, v.to_string()).unwrap();
    let o = run(&["verify", "--plan", plan.to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    v["N"] = 7.into();
    fs::write(&plan, v.to_string()).unwrap();
    assert_eq!(code(&run(&["verify", "--plan", plan.to_str().unwrap()])), 2);
}

#[test]
fn symbol_eval_values() {
    let o = run(&[
        "symbol-eval",
        "--symbol",
        r#"{"type":"laguerre_basic","m":1,"xi":4}"#,
        "--x",
        "0,0.5",
    ]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0][1], "-16");
    assert_eq!(rows[1][1], "0");
}

#[test]
fn smooth_reports() {
    let o = run(&[
        "smooth",
        "--target",
        r#"{"values":[2,2,2,2,2],"tail":{"kind":"limit","p":2}}"#,
        "--delta",
        "0.5",
    ]);
    assert_eq!(code(&o), 0);
    assert!(csv_rows(&stdout(&o)).iter().all(|r| r[3] == "0"));

    let o = run(&[
        "smooth",
        "--target",
        "generator:cos_sqrt?n=3000",
        "--delta",
        "0.3",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v = json(&stdout(&o));
    let s = &v["summary"];
    assert!(s["sup_diff"].as_f64().unwrap() <= s["modulus"].as_f64().unwrap() + 1e-12);
    assert_eq!(s["bound_holds"], true);
}

fn diagnose(target: &str) -> Vec<(String, String, f64)> {
    let o = run(&["diagnose", "--target", target]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    csv_rows(&stdout(&o))
        .into_iter()
        .map(|r| (r[0].clone(), r[1].clone(), r[2].parse().unwrap()))
        .collect()
}

#[test]
fn diagnose_examples() {
    let cos = diagnose("generator:cos_sqrt?n=20000");
    let lip = cos.iter().find(|r| r.0 == "lipschitz_seminorm").unwrap().2;
    assert!(lip <= 1.0 + 1e-12);

    let saw = diagnose("generator:sqrt_abs_sin_pi_sqrt?n=10001");
    let lip = saw.iter().find(|r| r.0 == "lipschitz_seminorm").unwrap().2;
    assert!(lip > 5.0);

    let flat = diagnose(r#"{"values":[3,3,3,3,3,3,3,3],"tail":{"kind":"zero"}}"#);
    assert!(flat.iter().all(|r| r.0 == "modulus" || r.2 == 0.0));
    let flat = diagnose(r#"{"values":[3,3,3,3,3,3,3,3],"tail":{"kind":"limit","p":3}}"#);
    assert!(flat.iter().all(|r| r.2 == 0.0), "{flat:?}");
}
