use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn entropy(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entropy"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    child.wait_with_output().unwrap()
}

fn json(args: &[&str], stdin: Option<&str>) -> Value {
    let out = entropy(args, stdin);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn logistic_series(n: &str) -> String {
    let out = entropy(
        &[
            "simulate", "map", "--map", "logistic", "--a", "4", "--n", n, "--format", "tsv",
        ],
        None,
    );
    assert!(out.status.success());
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn shannon_of_a_fair_coin() {
    let v = json(
        &["dist", "--probs", "0.5,0.5", "--measure", "shannon"],
        None,
    );
    assert_eq!(v["schema"], 1);
    assert_eq!(v["inputs"]["probs"], "0.5,0.5");
    assert!((v["result"]["entropy"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-6);
    let bits = json(&["dist", "--probs", "0.5,0.25,0.25", "--base", "2"], None);
    assert_eq!(bits["result"]["entropy"].as_f64().unwrap(), 1.5);
}

#[test]
fn golden_mean_shift() {
    let v = json(&["oracle", "sft", "--matrix", "1,1;1,0"], None);
    assert!((v["result"]["entropy"].as_f64().unwrap() - 0.481212).abs() < 1e-6);
    let tsv = String::from_utf8(
        entropy(
            &["oracle", "sft", "--matrix", "1,1;1,0", "--format", "tsv"],
            None,
        )
        .stdout,
    )
    .unwrap();
    assert!(tsv
        .lines()
        .any(|l| l.starts_with("result.entropy\t0.48121")));
}

#[test]
fn g_test_rejects_logistic_data() {
    let series = logistic_series("20000");
    let v = json(
        &["test", "g", "--input", "-", "--L", "3", "--alpha", "0.05"],
        Some(&series),
    );
    assert_eq!(v["result"]["decision"], "reject");
    assert!(v["result"]["p_value"].as_f64().unwrap() < 1e-6);
    let chi = json(&["test", "chi2", "--input", "-", "--L", "3"], Some(&series));
    assert_eq!(chi["result"]["decision"], "reject");
}

#[test]
fn series_estimators_run_on_csv() {
    let mut csv = String::from("t,value\n");
    for (i, x) in logistic_series("3000").lines().enumerate() {
        csv.push_str(&format!("{i},{x}\n"));
    }
    let pe = json(
        &[
            "series", "pe", "--input", "-", "--column", "value", "--L", "4",
        ],
        Some(&csv),
    );
    assert!(pe["result"]["normalized"].as_f64().unwrap() < 1.0);
    let census = json(
        &[
            "series", "census", "--input", "-", "--column", "1", "--L", "3",
        ],
        Some(&csv),
    );
    assert_eq!(census["result"]["missing"], serde_json::json!(["2,1,0"]));
    let naive = json(
        &[
            "series",
            "sampen",
            "--input",
            "-",
            "--column",
            "1",
            "--strategy",
            "naive",
        ],
        Some(&csv),
    );
    let sorted = json(
        &["series", "sampen", "--input", "-", "--column", "1"],
        Some(&csv),
    );
    assert_eq!(naive["result"], sorted["result"]);
    let apen = json(
        &[
            "series",
            "apen",
            "--input",
            "-",
            "--column",
            "1",
            "--k",
            "2",
            "--epsilon",
            "0.1",
        ],
        Some(&csv),
    );
    assert!(apen["result"]["apen"].as_f64().unwrap() > 0.0);
}

#[test]
fn output_is_reproducible() {
    let series = logistic_series("2000");
    let args = [
        "test",
        "surrogate",
        "--input",
        "-",
        "--L",
        "4",
        "--surrogates",
        "25",
        "--seed",
        "7",
    ];
    let a = entropy(&args, Some(&series));
    let b = entropy(&[&args[..], &["--threads", "1"]].concat(), Some(&series));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let sim = [
        "simulate",
        "markov",
        "--matrix",
        "0.9,0.1;0.4,0.6",
        "--n",
        "500",
        "--seed",
        "3",
    ];
    assert_eq!(entropy(&sim, None).stdout, entropy(&sim, None).stdout);
    assert_ne!(
        entropy(&sim, None).stdout,
        entropy(&[&sim[..], &["--seed", "4"]].concat(), None).stdout
    );
}

#[test]
fn maxent_and_oracles() {
    let v = json(
        &["maxent", "solve", "--support", "0,1,2", "--mean", "0.5"],
        None,
    );
    let p: Vec<f64> = v["result"]["distribution"]["probs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((p[1] - 0.267592).abs() < 1e-6);
    let cat = json(&["oracle", "toral", "--matrix", "2,1;1,1"], None);
    assert!(
        (cat["result"]["entropy"].as_f64().unwrap() - ((3.0 + 5f64.sqrt()) / 2.0).ln()).abs()
            < 1e-12
    );
    assert_eq!(
        cat["result"]["characteristic_polynomial"],
        serde_json::json!([1, -3, 1])
    );
    let laps = json(&["oracle", "lap", "--map", "tent", "--n", "8"], None);
    assert_eq!(laps["result"]["laps"][7]["laps"], 256);
    let gauss = json(
        &[
            "maxent",
            "closed-form",
            "--family",
            "gaussian",
            "--m1",
            "0",
            "--m2",
            "1",
        ],
        None,
    );
    assert!(
        (gauss["result"]["entropy"].as_f64().unwrap()
            - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln())
        .abs()
            < 1e-12
    );
}

#[test]
fn transfer_between_files() {
    let dir = std::env::temp_dir().join(format!("entropy-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let sim = entropy(
        &[
            "simulate",
            "markov",
            "--matrix",
            "0.5,0.5;0.5,0.5",
            "--n",
            "20000",
            "--seed",
            "1",
            "--format",
            "tsv",
        ],
        None,
    );
    let y: Vec<&str> = std::str::from_utf8(&sim.stdout).unwrap().lines().collect();
    let x: Vec<&str> = std::iter::once("0")
        .chain(y[..y.len() - 1].iter().copied())
        .collect();
    let (xp, yp) = (dir.join("x.txt"), dir.join("y.txt"));
    std::fs::write(&xp, x.join("\n")).unwrap();
    std::fs::write(&yp, y.join("\n")).unwrap();
    let (xs, ys) = (xp.to_str().unwrap(), yp.to_str().unwrap());
    let te = json(&["transfer", "te", "--x", xs, "--y", ys], None);
    assert!((te["result"]["value"].as_f64().unwrap() - 2f64.ln()).abs() < 0.005);
    let delta = json(&["transfer", "delta", "--x", xs, "--y", ys], None);
    assert!(delta["result"]["delta"].as_f64().unwrap() > 0.6);
    let alg = json(
        &[
            "transfer",
            "algebraic",
            "--group",
            "zm:2",
            "--xi",
            xs,
            "--eta",
            ys,
        ],
        None,
    );
    assert!(alg["result"]["hypotheses"]["coupling_complexity"].is_number());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn usage_and_validation_errors_exit_2() {
    assert_eq!(entropy(&["dist", "--bogus"], None).status.code(), Some(2));
    assert_eq!(entropy(&["frobnicate"], None).status.code(), Some(2));
    let out = entropy(
        &["test", "g", "--input", "-", "--alpha", "1.5"],
        Some("1\n2\n3\n"),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--alpha"));
    let out = entropy(
        &["test", "chi2", "--input", "-", "--L", "7"],
        Some("1\n2\n"),
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("--L"));
    assert_eq!(
        entropy(&["dist", "--probs", "0.7,0.7"], None).status.code(),
        Some(2)
    );
    let parse = entropy(&["series", "pe", "--input", "-"], Some("1\n2\nx\n"));
    assert_eq!(parse.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&parse.stderr).contains("line 3"));
}

#[test]
fn non_convergence_exits_3() {
    let out = entropy(
        &[
            "maxent",
            "solve",
            "--support",
            "0,1,2",
            "--mean",
            "0.5",
            "--max-iter",
            "1",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(3));
}
