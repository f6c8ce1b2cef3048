//! End-to-end tests of the command line binary: exit codes, pointer
//! bearing schema errors, batch order, and byte-level determinism.

use std::io::Write as _;
use std::process::{Command, Stdio};

use serde_json::{json, Value};

use hodge_vfilt::generate::{random_population, Population};
use hodge_vfilt::json::model_to_json;
use hodge_vfilt::model::{delta_module_model, structure_module_model, Slope};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str], stdin: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hodge-vfilt"));
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    match stdin {
        Some(_) => cmd.stdin(Stdio::piped()),
        None => cmd.stdin(Stdio::null()),
    };
    let mut child = cmd.spawn().expect("binary spawns");
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .expect("piped")
            .write_all(text.as_bytes())
            .expect("stdin accepts input");
    }
    let out = child.wait_with_output().expect("binary exits");
    Run {
        code: out.status.code().expect("no signal"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

fn parse(r: &Run) -> Value {
    serde_json::from_str(&r.stdout).expect("stdout is JSON")
}

fn write_temp(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(contents.as_bytes()).expect("write");
    f
}

#[test]
fn classify_reports_the_quadric_cone() {
    let r = run(&["classify"], Some(r#"{"n":3,"r":1,"weights":[1,1,1],"degrees":[2]}"#));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = parse(&r);
    assert_eq!(v["du_bois"], json!(true));
    assert_eq!(v["k"], json!(0));
    assert_eq!(v["lower_bound"], json!("1"));
    assert_eq!(v["upper_bound"], json!("3/2"));
    assert_eq!(v["verdict"], json!("kRational(0)"));
}

#[test]
fn classify_schema_errors_carry_a_pointer_and_exit_1() {
    let r = run(&["classify"], Some(r#"{"weights":"three","degrees":[2]}"#));
    assert_eq!(r.code, 1);
    assert!(r.stdout.is_empty());
    assert!(r.stderr.contains("/weights"), "stderr: {}", r.stderr);
}

#[test]
fn classify_batch_keeps_order_and_signals_validation() {
    let batch = r#"[
        {"weights":[1,1,1],"degrees":[2]},
        {"weights":[1,1],"degrees":[3],"variables":["x","y"],"polynomials":["x^2 + y^3"]},
        {"weights":[3,2],"degrees":[6]}
    ]"#;
    let r = run(&["classify", "--jobs", "2"], Some(batch));
    assert_eq!(r.code, 2, "stderr: {}", r.stderr);
    let v = parse(&r);
    let entries = v.as_array().expect("array payload");
    assert_eq!(entries.len(), 3);
    assert_eq!(entries[0]["verdict"], json!("kRational(0)"));
    assert_eq!(entries[1]["ok"], json!(false));
    assert!(entries[1]["error"].as_str().expect("message").contains("not weighted homogeneous"));
    assert_eq!(entries[2]["verdict"], json!("NotDuBois"));
}

#[test]
fn classify_batch_schema_error_names_the_entry() {
    let r = run(&["classify"], Some(r#"[{"weights":[1],"degrees":[1]},{"degrees":[2]}]"#));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("/1"), "stderr: {}", r.stderr);
}

#[test]
fn bfun_ts_doubles_the_single_root() {
    let f = write_temp(r#"{"roots":{"1":1}}"#);
    let path = f.path().to_str().expect("utf-8 path");
    let r = run(&["bfun-ts", "--input", path, "--input", path], None);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = parse(&r);
    assert_eq!(v["roots"], json!({ "2": 1 }));
}

#[test]
fn bfun_rescale_scales_then_shifts() {
    let r = run(
        &["bfun-rescale", "--factor", "3", "--shift", "1"],
        Some(r#"{"roots":{"1/2":1,"1":2}}"#),
    );
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = parse(&r);
    assert_eq!(v["roots"], json!({ "1/2": 1, "2": 2 }));
}

#[test]
fn model_validate_rejects_broken_documents() {
    let r = run(&["model-validate"], Some(r#"{"slope":[1],"window":{"lo":"0","hi":"1"},"pieces":7}"#));
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("/pieces"), "stderr: {}", r.stderr);
}

#[test]
fn model_validate_reports_rule_violations_with_exit_2() {
    let m = structure_module_model(&Slope::new(vec![1]).expect("positive"), 1);
    let mut doc = model_to_json(&m);
    // Overwrite one derivative matrix so the commutator identity fails.
    let actions = doc["d_actions"].as_array_mut().expect("actions");
    actions[0]["matrix"] = json!(["5"]);
    let r = run(&["model-validate"], Some(&doc.to_string()));
    assert_eq!(r.code, 2, "stderr: {}", r.stderr);
    let v = parse(&r);
    assert_eq!(v["ok"], json!(false));
    let rules: Vec<&str> = v["violations"]
        .as_array()
        .expect("violations")
        .iter()
        .map(|x| x["rule"].as_str().expect("rule"))
        .collect();
    assert!(rules.contains(&"commutator-dt"), "rules: {rules:?}");
}

#[test]
fn model_koszul_reports_both_complexes_at_a_level() {
    let m = delta_module_model(&Slope::new(vec![1]).expect("positive"), 2);
    let f = write_temp(&model_to_json(&m).to_string());
    let path = f.path().to_str().expect("utf-8 path");
    let r = run(&["model-koszul", "--input", path, "--lambda", "-1"], None);
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = parse(&r);
    assert_eq!(v["lambda"], json!("-1"));
    // The graded complex at -1 is acyclic; the cumulative one regroups
    // as the sum of the graded complexes at -1 and 0, and the level-0
    // part keeps the generator line in degree 0.
    assert_eq!(v["b"]["total"], json!([0, 0]));
    assert_eq!(v["a"]["total"], json!([1, 0]));
}

#[test]
fn model_scan_output_is_byte_identical_across_runs() {
    let models = random_population(11, 6, Population::General);
    for m in &models {
        let f = write_temp(&model_to_json(m).to_string());
        let path = f.path().to_str().expect("utf-8 path");
        let first = run(&["model-koszul", "--input", path], None);
        let second = run(&["model-koszul", "--input", path], None);
        assert_eq!(first.code, 0, "stderr: {}", first.stderr);
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn model_sigma_prints_restriction_cohomology() {
    let m = structure_module_model(&Slope::new(vec![1]).expect("positive"), 1);
    let r = run(&["model-sigma"], Some(&model_to_json(&m).to_string()));
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = parse(&r);
    assert_eq!(v["total"], json!([0, 1]));
    assert_eq!(v["strict"], json!(true));
}

#[test]
fn transform_specialize_requires_one_mode() {
    let r = run(&["transform-specialize", "--slope", "2"], None);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("--lambda"), "stderr: {}", r.stderr);
}

#[test]
fn transform_cyclic_matches_the_inversion_example() {
    let r = run(
        &["transform-cyclic", "--cover", "3", "--slope", "1"],
        Some(r#"{"jumps":[{"index":"3"}]}"#),
    );
    assert_eq!(r.code, 0, "stderr: {}", r.stderr);
    let v = parse(&r);
    let comps = v["components"].as_array().expect("components");
    assert_eq!(comps.len(), 3);
    for (b, comp) in comps.iter().enumerate() {
        assert_eq!(comp["beta"], json!([b]));
        let idx = comp["spectrum"]["jumps"][0]["index"].as_str().expect("index");
        assert_eq!(idx, (b + 1).to_string());
    }
}

#[test]
fn output_flag_writes_the_same_bytes_as_stdout() {
    let input = r#"{"weights":[15,10,6],"degrees":[30]}"#;
    let direct = run(&["classify"], Some(input));
    assert_eq!(direct.code, 0);
    let out = tempfile::NamedTempFile::new().expect("temp file");
    let path = out.path().to_str().expect("utf-8 path");
    let filed = run(&["classify", "--output", path], Some(input));
    assert_eq!(filed.code, 0);
    assert!(filed.stdout.is_empty());
    let written = std::fs::read_to_string(path).expect("file written");
    assert_eq!(written, direct.stdout);
}

#[test]
fn table_format_renders_flat_rows() {
    let classify = run(
        &["classify", "--format", "table"],
        Some(r#"{"weights":[1,1,1],"degrees":[2]}"#),
    );
    assert_eq!(classify.code, 0);
    assert!(classify.stdout.contains("verdict"), "stdout: {}", classify.stdout);
    let roots = run(&["bfun-rescale", "--format", "table"], Some(r#"{"roots":{"5/6":1}}"#));
    assert_eq!(roots.code, 0);
    assert!(roots.stdout.starts_with("b(s) = (s + 5/6)"), "stdout: {}", roots.stdout);
}

#[test]
fn selftest_is_green_and_deterministic() {
    let first = run(&["selftest", "--seed", "3", "--models", "12"], None);
    assert_eq!(first.code, 0, "stderr: {}\nstdout: {}", first.stderr, first.stdout);
    let v = parse(&first);
    assert_eq!(v["ok"], json!(true));
    let second = run(&["selftest", "--seed", "3", "--models", "12"], None);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn help_exits_zero_and_unknown_flags_exit_one() {
    let help = run(&["--help"], None);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("model-koszul"));
    let bad = run(&["classify", "--no-such-flag"], None);
    assert_eq!(bad.code, 1);
}
