use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn altrank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_altrank"))
        .args(args)
        .env_remove("ALTRANK_THREADS")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}); stderr: {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn construct(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut full = vec!["construct"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let out = altrank(&full);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn construct_m_tilde_alt_over_f3() {
    let out = altrank(&["construct", "--family", "m-tilde-alt", "--n", "7", "--s", "2", "--field", "Fp:3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["passed"], true);
    assert_eq!(r["field"], "Fp:3");
    assert_eq!(r["results"]["dimension"], 8);
    let profile = &r["results"]["rank"]["profile"];
    assert_eq!(profile["min_rank"], 4);
    assert_eq!(profile["max_rank"], 4);
    assert_eq!(profile["method"]["kind"], "exhaustive");
    assert_eq!(profile["method"]["members"], 6561);
    assert_eq!(r["results"]["space"]["basis"].as_array().unwrap().len(), 8);
}

#[test]
fn construct_counterexample_plane_over_q() {
    let out = altrank(&["construct", "--family", "counterexample-plane", "--field", "Q"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["dimension"], 2);
    assert_eq!(r["results"]["space"]["field"], "Q");
}

#[test]
fn construct_h_plus_over_f5() {
    let out = altrank(&["construct", "--family", "h-plus", "--r", "4", "--field", "Fp:5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["dimension"], 6);
    assert_eq!(r["results"]["shape"], serde_json::json!([5, 5]));
}

#[test]
fn verify_m_tilde_alt_exhaustively() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "m.json", &["--family", "m-tilde-alt", "--n", "7", "--s", "2", "--field", "Fp:3"]);
    let out = altrank(&["verify", "--input", &path, "--rank", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let check = &r["results"]["rank-profile"];
    assert_eq!(check["passed"], true);
    assert_eq!(check["profile"]["histogram"]["4"], 6561);
}

#[test]
fn verify_reads_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "h.json", &["--family", "h-plus", "--r", "2", "--field", "Fp:3"]);
    let out = Command::new(env!("CARGO_BIN_EXE_altrank"))
        .args(["verify", "--rank", "2"])
        .stdin(std::fs::File::open(&path).unwrap())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["parameters"]["input"], "-");
}

#[test]
fn verify_identity_operator_space_has_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("op.json");
    let m = |a: [&str; 4]| serde_json::json!({ "rows": 2, "cols": 2, "field": "Fp:5", "data": [[a[0], a[1]], [a[2], a[3]]] });
    let space = serde_json::json!({
        "field": "Fp:5",
        "shape": [2, 2],
        "alternating": false,
        "base": m(["0", "0", "0", "0"]),
        "basis": [m(["1", "0", "0", "1"]), m(["0", "1", "0", "0"])],
    });
    std::fs::write(&path, space.to_string()).unwrap();
    let out = altrank(&["verify", "--input", path.to_str().unwrap(), "--check", "trivial-spectrum"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["passed"], false);
    let witness = &r["results"]["trivial-spectrum"]["witness"];
    assert!(witness["eigenvalue"].as_str().unwrap() != "0");
    assert!(witness["member"].is_object());
}

#[test]
fn verify_plane_over_f3_finds_rank_drop() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "p.json", &["--family", "counterexample-plane", "--field", "Fp:3"]);
    let out = altrank(&["verify", "--input", &path, "--rank", "4"]);
    assert_eq!(out.status.code(), Some(1));
    let witness = &report(&out)["results"]["rank-profile"]["witness"];
    assert_eq!(witness["rank"], 2);
    // A(1,1,1): x = y = z = 1 on the upper triangle, -y = 2 at (1,3)
    let row = |i: usize| witness["member"]["data"][i].clone();
    assert_eq!(row(0), serde_json::json!(["0", "1", "1", "1"]));
    assert_eq!(row(1), serde_json::json!(["2", "0", "1", "2"]));
    assert_eq!(row(2)[3], "1");
}

#[test]
fn verify_runs_every_check_on_a_nonsingular_space() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "k.json", &["--family", "nonsingular-alt", "--s", "3", "--field", "Fp:5"]);
    let out = altrank(&[
        "verify", "--input", &path, "--rank", "6",
        "--check", "rank-profile", "--check", "flanders-atkinson", "--check", "duality",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["duality"]["holds"], true);
    assert_eq!(r["results"]["flanders-atkinson"]["holds"], true);
}

#[test]
fn sampled_results_carry_seed_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "m.json", &["--family", "m-tilde-alt", "--n", "7", "--s", "2", "--field", "Fp:5"]);
    let out = altrank(&["verify", "--input", &path, "--rank", "4", "--budget", "100", "--sample", "500", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["seed"], 9);
    let method = &r["results"]["rank-profile"]["profile"]["method"];
    assert_eq!(method["kind"], "sampled");
    assert_eq!(method["count"], 500);
    assert_eq!(method["seed"], 9);
}

#[test]
fn table_grid_agrees() {
    let out = altrank(&["table", "--n", "2..8", "--r", "2,4", "--fields", "Fp:3,Fp:5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# altrank "));
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split('\t').collect()).collect();
    assert!(!rows.is_empty());
    for row in &rows {
        assert_eq!(row[col("formula")], row[col("constructed")]);
        assert_eq!(row[col("rank_ok")], "true");
    }
    let find = |n: &str, r: &str, q: &str, thm: &str| {
        rows.iter()
            .find(|row| row[col("n")] == n && row[col("r")] == r && row[col("field")] == q && row[col("theorem")] == thm)
            .map(|row| row[col("formula")].to_string())
    };
    assert_eq!(find("5", "4", "Fp:5", "thm4").as_deref(), Some("6"));
    assert_eq!(find("5", "4", "Fp:5", "thm5").as_deref(), Some("6"));
    assert_eq!(find("7", "4", "Fp:3", "thm5").as_deref(), Some("8"));
}

#[test]
fn table_json_matches_tsv_rows() {
    let out = altrank(&["table", "--n", "4..5", "--r", "2", "--fields", "Fp:3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = report(&out)["results"]["rows"].as_array().unwrap().clone();
    assert!(rows.iter().all(|row| row["formula"] == row["constructed"]));
    assert!(rows.iter().any(|row| row["n"] == 4 && row["theorem"] == "thm5" && row["formula"] == 2));
}

#[test]
fn reduce_round_trip_over_f5() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "m.json", &["--family", "m-tilde-alt", "--n", "7", "--s", "2", "--field", "Fp:5"]);
    let cert = dir.path().join("cert.json");
    let out = altrank(&["reduce", "--input", &path, "--r", "4", "--out", cert.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let verdicts = &report(&out)["results"]["verdicts"];
    for key in ["base_rank", "moments", "lagrangian", "step1", "step2", "step3", "step4"] {
        assert_eq!(verdicts[key], true, "{key}");
    }
    let cert: Value = serde_json::from_str(&std::fs::read_to_string(cert).unwrap()).unwrap();
    assert_eq!(cert["P"]["rows"], 7);
    assert_eq!(cert["recovered_M"]["basis"].as_array().unwrap().len(), 1);
}

#[test]
fn reduce_rejects_small_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = construct(dir.path(), "m.json", &["--family", "m-tilde-alt", "--n", "7", "--s", "2", "--field", "Fp:3"]);
    let out = altrank(&["reduce", "--input", &path, "--r", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("field too small"));
}

#[test]
fn optimal_search_small_cases() {
    let out = altrank(&["optimal-search", "--n", "4", "--rank", "2", "--field", "Fp:3", "--expect", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["max_dimension"], 2);
    let out = altrank(&["optimal-search", "--n", "2", "--rank", "2", "--field", "Fp:5", "--expect", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["results"]["max_dimension"], 0);
}

#[test]
fn counterexample_demonstration_passes() {
    let out = altrank(&["counterexample", "--samples", "500", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["results"]["f3_witness_ok"], true);
    assert_eq!(r["results"]["f5_witness_ok"], true);
    assert_eq!(r["results"]["pencil_is_sum_of_squares"], true);
}

#[test]
fn usage_errors_exit_with_two() {
    let cases: &[&[&str]] = &[
        &["construct", "--family", "nope"],
        &["construct", "--family", "h-plus", "--r", "3"],
        &["construct", "--family", "m-tilde-alt", "--n", "7"],
        &["construct", "--family", "nt", "--n", "3", "--field", "Fp:4"],
        &["verify", "--input", "/nonexistent/space.json"],
        &["table", "--n", "8..2"],
        &["counterexample", "--samples", "0"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = altrank(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn reports_are_byte_identical() {
    let run = |threads: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_altrank"));
        cmd.args(["table", "--n", "2..7", "--r", "2,4", "--fields", "Fp:3,Fp:5", "--format", "json", "--seed", "5"]);
        match threads {
            Some(t) => cmd.env("ALTRANK_THREADS", t),
            None => cmd.env_remove("ALTRANK_THREADS"),
        };
        cmd.output().unwrap().stdout
    };
    let first = run(None);
    assert!(!first.is_empty());
    assert_eq!(first, run(None));
    assert_eq!(first, run(Some("1")));
    assert_eq!(first, run(Some("3")));

    let verify = || altrank(&["counterexample", "--samples", "300", "--seed", "11"]).stdout;
    assert_eq!(verify(), verify());
}

#[test]
fn timings_are_opt_in() {
    let plain = report(&altrank(&["construct", "--family", "nt", "--n", "3"]));
    assert!(plain.get("timings").is_none());
    let timed = report(&altrank(&["--timings", "construct", "--family", "nt", "--n", "3"]));
    assert!(timed["timings"]["total_ms"].is_u64());
}
