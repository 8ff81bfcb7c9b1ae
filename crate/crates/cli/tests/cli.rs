use std::process::{Command, Output};

fn shiftwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftwalk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_companion_order_passes() {
    let out = shiftwalk(&["verify", "lemma5.1", "--n-max", "512", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["suite"], "lemma5.1");
    assert_eq!(report["passed"], true);
}

#[test]
fn verify_q2_exact_passes() {
    let out = shiftwalk(&["verify", "q2-exact", "--n-max", "16", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(report["checks"][0]["observed"].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_bounded_diff_reaches_two() {
    let out = shiftwalk(&[
        "verify",
        "bounded-diff",
        "--trials",
        "100000",
        "--seed",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["checks"][0]["observed"], 2.0);
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let out = shiftwalk(&["verify", "lemma9.9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn profile_small_q1_has_exact_column() {
    let out = shiftwalk(&["profile", "q1", "--n", "10", "--t", "0..15"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with(
        "# schema_version=1\nt,tv_exact,tv_upper,tv_lower_emp,tv_lower_emp_se,chebyshev_lower\n"
    ));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 16);
    let at_11: f64 = rows[11][1].parse().unwrap();
    assert!(at_11 <= 0.2);
}

#[test]
fn profile_q2_reaches_uniform_at_n() {
    let out = shiftwalk(&[
        "profile",
        "--chain",
        "q2",
        "--n",
        "12",
        "--t-range",
        "0..12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let at_12: f64 = rows[12][1].parse().unwrap();
    assert!(at_12 <= 1e-12);
}

#[test]
fn profile_large_n_has_bound_columns() {
    let out = shiftwalk(&[
        "profile",
        "q1",
        "--n",
        "1024",
        "--t",
        "843,1025",
        "--samples",
        "10000",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1], "", "no exact column above the dimension guard");
    let lower: f64 = rows[0][3].parse().unwrap();
    assert!(lower > 0.5, "empirical lower bound {lower}");
    let upper: f64 = rows[1][2].parse().unwrap();
    assert!(upper <= 0.023);
}

#[test]
fn profile_is_deterministic_and_json_has_metadata() {
    let args = [
        "profile",
        "q1",
        "--n",
        "8",
        "--t",
        "0..9",
        "--samples",
        "500",
        "--seed",
        "9",
        "--format",
        "json",
    ];
    let a = shiftwalk(&args);
    let b = shiftwalk(&args);
    assert_eq!(a.stdout, b.stdout);
    let report: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(report["metadata"]["schema_version"], 1);
    assert_eq!(report["metadata"]["seed"], 9);
    assert_eq!(report["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn profile_rejects_bad_ranges() {
    for t in ["9..3", "1,1", "a..b"] {
        let out = shiftwalk(&["profile", "q1", "--n", "8", "--t", t]);
        assert_eq!(out.status.code(), Some(2), "--t {t}");
    }
}

#[test]
fn profile_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = shiftwalk(&["profile", "q1", "--n", "6", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(csv_rows(&text).len(), 8);
}

#[test]
fn sample_is_stable() {
    let a = shiftwalk(&["sample", "--n", "8", "--count", "3", "--seed", "7"]);
    let b = shiftwalk(&["sample", "--n", "8", "--count", "3", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<String> = stdout(&a).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 3);
    assert!(lines
        .iter()
        .all(|l| l.len() == 8 && l.chars().all(|c| c == '0' || c == '1')));
    let hex = shiftwalk(&[
        "sample", "--n", "8", "--count", "3", "--seed", "7", "--format", "hex",
    ]);
    assert_eq!(stdout(&hex).lines().count(), 3);
}

#[test]
fn sample_without_seed_reports_it() {
    let out = shiftwalk(&["sample", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().starts_with("seed: "));
}

#[test]
fn sample_rejects_odd_dimension() {
    assert_eq!(
        shiftwalk(&["sample", "--n", "7", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn solve_then_replay_reaches_target() {
    let out = shiftwalk(&["solve", "--n", "6", "--from", "000000", "--to", "101010"]);
    assert_eq!(out.status.code(), Some(0));
    let bits = stdout(&out).trim().to_string();
    assert_eq!(bits.len(), 6);
    let replay = shiftwalk(&[
        "simulate", "q2", "--n", "6", "--from", "000000", "--bits", &bits,
    ]);
    assert_eq!(replay.status.code(), Some(0));
    let rows = csv_rows(&stdout(&replay));
    assert_eq!(rows.last().unwrap()[1], "101010");
}

#[test]
fn simulate_emits_t_plus_one_rows() {
    let out = shiftwalk(&["simulate", "q1", "--n", "6", "--t", "7", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("t,state,weight\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    for (t, row) in rows.iter().enumerate() {
        assert_eq!(row[0], t.to_string());
        assert_eq!(row[2], row[1].matches('1').count().to_string());
    }
}

#[test]
fn simulate_replay_uses_one_based_coordinates() {
    // flip x_2 then shift: 0000 -> 0100 -> 1001
    let out = shiftwalk(&["simulate", "q1", "--n", "4", "--bits", "1", "--coords", "2"]);
    assert_eq!(csv_rows(&stdout(&out))[1][1], "1001");
    let bad = shiftwalk(&["simulate", "q1", "--n", "4", "--bits", "1", "--coords", "0"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn bounds_reports_spectral_sum() {
    let out = shiftwalk(&["bounds", "--n", "1024"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    let tv = doc["fourier"]["tv_bound"].as_f64().unwrap();
    assert!(tv <= (2.0f64 / 1024.0).sqrt() / 2.0);
    assert_eq!(doc["h_bounds"]["passed"], true);
    assert_eq!(doc["chebyshev"]["t"], 843);
}
