use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn geoforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoforge"))
        .args(args)
        .env_remove("GEOFORGE_PRECISION_BITS")
        .output()
        .expect("spawn geoforge")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Each invocation is run with `--no-meta`; stdout is compared with
/// `tests/golden/<name>.out`. Set `GEOFORGE_BLESS=1` to rewrite the files.
const GOLDEN: &[(&str, &[&str], i32)] = &[
    ("strand_length", &["strand", "--h", "1", "--length", "1.7627"], 0),
    ("strand_length_above", &["strand", "--h", "1", "--length", "1.76275"], 0),
    ("strand_omega", &["strand", "--h", "1", "--omega", "4"], 0),
    ("strand_h0", &["strand", "--h", "1", "--h0", "0.5"], 0),
    ("constants_g1_n1", &["constants", "--g", "1", "--n", "1", "--s", "1"], 0),
    ("constants_surface_y", &["constants", "--surface-y", "--k", "2", "--k", "10"], 0),
    ("survey_max2", &["survey", "--max-len", "2", "--k", "1"], 0),
    ("survey_max6_json", &["survey", "--max-len", "6", "--k", "3", "--format", "json"], 0),
    ("word_ab", &["word", "ab"], 0),
    ("word_aB", &["word", "aB"], 0),
    ("word_abab", &["word", "abab"], 0),
    ("example_k100", &["example", "--k", "100"], 4),
    ("example_k50", &["example", "--k", "50"], 0),
    ("example_k100_k1000", &["example", "--k", "100", "--k", "1000"], 4),
];

#[test]
fn golden_outputs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let bless = std::env::var_os("GEOFORGE_BLESS").is_some();
    let mut stale = Vec::new();
    for (name, args, expected_code) in GOLDEN {
        let mut full = vec!["--no-meta"];
        full.extend_from_slice(args);
        let out = geoforge(&full);
        assert_eq!(code(&out), *expected_code, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let path = dir.join(format!("{name}.out"));
        if bless {
            std::fs::write(&path, &out.stdout).unwrap();
            continue;
        }
        let golden = std::fs::read(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
        if golden != out.stdout {
            stale.push(*name);
        }
    }
    assert!(stale.is_empty(), "outputs differ from goldens: {stale:?}");
}

#[test]
fn strand_values() {
    // 2 arsinh(1) = 1.762747..., so the four-digit value sits just below the
    // first integer crossing
    let v = json(&geoforge(&["--no-meta", "strand", "--h", "1", "--length", "1.7627"]));
    assert_eq!(v["winding"], 1);
    let v = json(&geoforge(&["--no-meta", "strand", "--h", "1", "--length", "1.76275"]));
    assert_eq!(v["winding"], 2);
    assert_eq!(v["self_intersections"], 1);
    let v = json(&geoforge(&["--no-meta", "strand", "--h", "1", "--omega", "4"]));
    let lo: f64 = v["lower"].as_str().unwrap().parse().unwrap();
    let hi: f64 = v["upper"].as_str().unwrap().parse().unwrap();
    assert!((lo - 2.0 * 1.5f64.asinh()).abs() < 1e-14);
    assert!((hi - 2.0 * 2.0f64.asinh()).abs() < 1e-14);
    let v = json(&geoforge(&["--no-meta", "strand", "--h", "1", "--h0", "0.5"]));
    let t: f64 = v["threshold"].as_str().unwrap().parse().unwrap();
    assert!((t - 2.0 * 2.0f64.acosh()).abs() < 1e-14);
}

#[test]
fn constants_schema() {
    let v = json(&geoforge(&["--no-meta", "constants", "--g", "1", "--n", "1", "--s", "1"]));
    let r = &v["report"];
    let l_bers: f64 = r["topological"]["L_bers"].as_str().unwrap().parse().unwrap();
    assert!((l_bers - 4.0 * (4.0 * std::f64::consts::PI).ln()).abs() < 1e-12);
    assert_eq!(r["topological"]["h_adams"], 6);
    for field in ["D", "K"] {
        assert_eq!(r[field]["holds_at_value"], true);
        assert_eq!(r[field]["fails_below"], true);
        assert!(r[field]["value"].is_string());
    }
    let v = json(&geoforge(&["--no-meta", "constants", "--surface-y"]));
    assert_eq!(v["reference"]["asserted"], false);
    assert_eq!(v["report"]["direct_k_thick"]["certificate"]["value"], "2797879");
}

#[test]
fn survey_csv_layout() {
    let out = geoforge(&["survey", "--max-len", "3", "--k", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# tool=geoforge"));
    assert_eq!(lines.next().unwrap(), "word,trace,length,self_intersections,certified,bacK");
    assert_eq!(lines.next().unwrap().split(',').next(), Some("aaB"));
    let summary: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(summary["summaries"][0]["best_row"]["word"], "aaB");
    assert!(summary["meta"]["precision_bits"] == 128);
}

#[test]
fn survey_thread_counts_agree() {
    let run = |t: &str| geoforge(&["--no-meta", "survey", "--max-len", "7", "--k", "2", "--threads", t]);
    let one = run("1");
    let many = run("3");
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stderr, many.stderr);
}

#[test]
fn word_records() {
    let v = json(&geoforge(&["--no-meta", "word", "ab"]));
    assert_eq!(v["trace"], "6");
    assert_eq!(v["self_intersection"]["count"], 1);
    assert_eq!(v["self_intersection"]["certified"], true);
    let v = json(&geoforge(&["--no-meta", "word", "aB"]));
    assert_eq!(v["kind"], "peripheral");
    assert!(v["self_intersection"].is_null());
    let v = json(&geoforge(&["--no-meta", "word", "abab"]));
    assert_eq!(v["primitive"], false);
    assert!(v["self_intersection"].is_null());
    assert!(v["note"].is_string());
    let v = json(&geoforge(&["--no-meta", "word", "BAAA"]));
    assert_eq!(v["canonical"], "aaab");
    assert_eq!(v["bacK_shape"]["k"], 3);
}

#[test]
fn precision_flag_and_env() {
    let v = json(&geoforge(&["--precision", "256", "word", "ab"]));
    assert_eq!(v["meta"]["precision_bits"], 256);
    let out = Command::new(env!("CARGO_BIN_EXE_geoforge"))
        .args(["word", "ab"])
        .env("GEOFORGE_PRECISION_BITS", "192")
        .output()
        .unwrap();
    assert_eq!(json(&out)["meta"]["precision_bits"], 192);
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(code(&geoforge(&["strand", "--h", "1"])), 2);
    assert_eq!(code(&geoforge(&["strand", "--h", "1", "--omega", "2", "--h0", "0.5"])), 2);
    assert_eq!(code(&geoforge(&["survey", "--max-len", "1"])), 2);
    assert_eq!(code(&geoforge(&["word", "abx"])), 2);
    assert_eq!(code(&geoforge(&["strand", "--h", "one", "--omega", "2"])), 2);
    // domain
    assert_eq!(code(&geoforge(&["strand", "--h", "2", "--length", "0.96"])), 3);
    assert_eq!(code(&geoforge(&["strand", "--h", "1", "--h0", "2"])), 3);
    assert_eq!(code(&geoforge(&["constants", "--g", "0", "--n", "3", "--s", "1"])), 3);
    assert_eq!(code(&geoforge(&["word", "aA"])), 3);
    // assertion
    assert_eq!(code(&geoforge(&["example", "--k", "100"])), 4);
    // search cap
    assert_eq!(code(&geoforge(&["constants", "--surface-y", "--d-cap-exp", "3"])), 5);
}
