//! End-to-end tests of the trapset binary: output shapes, exit codes,
//! result files, instance listings, and worker-count determinism.

use std::path::Path;
use std::process::{Command, Output};

use trapset_core::codes::random_regular;
use trapset_core::graph::{build_qc, parse_qc_exponents};
use trapset_core::TannerGraph;

/// Runs the binary with a clean worker environment.
fn trapset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trapset"))
        .args(args)
        .env_remove("TRAPSET_WORKERS")
        .output()
        .expect("the binary runs")
}

fn sout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).expect("stdout is UTF-8")
}

fn serr(out: &Output) -> &str {
    std::str::from_utf8(&out.stderr).expect("stderr is UTF-8")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON document")
}

/// Writes a small 4-cycle-free degree-3 code to `dir` and returns its path.
fn fixture(dir: &Path, name: &str, n: usize, m: usize, seed: u64) -> String {
    let graph = random_regular(n, m, 3, seed).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, graph.write_alist()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn bounds_text_names_the_floors() {
    let out = trapset(&["bounds", "--dv", "3", "--girth", "8"]);
    assert!(out.status.success());
    let text = sout(&out);
    assert!(text.contains("L_SS1=6\n"));
    assert!(text.contains("L_SS2=9\n"));
    assert!(text.contains("L_SS3=14\n"));
    assert!(text.contains("bprime_max=9\n"));
    assert!(text.contains("disconnected_min=21,20,15,14\n"));
}

#[test]
fn bounds_json_document_shape() {
    let out = trapset(&["bounds", "--dv", "4", "--girth", "6", "--json"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["schema"], "trapset/1");
    assert_eq!(doc["command"], "bounds");
    // The manifest carries wall time and worker count, so it stays out
    // of the byte-stable stdout document.
    assert!(doc.get("manifest").is_none());
    assert_eq!(doc["result"]["l_ss1"], 5);
    assert_eq!(doc["result"]["l_ss2"], 7);
    assert_eq!(doc["result"]["l_ss3"], 9);
}

#[test]
fn exit_codes_and_error_prefixes() {
    let out = trapset(&["search", "lets", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(serr(&out).starts_with("E:usage:"));

    let out = trapset(&["bounds", "--dv", "3", "--girth", "7"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).starts_with("E:range:"));

    let out = trapset(&["info", "--code", "/no/such/file.alist"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).starts_with("E:io:"));
    assert!(serr(&out).contains("/no/such/file.alist"));

    let out = trapset(&["info", "--code", "@nosuch"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).starts_with("E:domain:"));

    let out = trapset(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(sout(&out).contains("Usage:"));
}

#[test]
fn gen_qc_builds_the_alist() {
    let dir = tempfile::tempdir().unwrap();
    let exp_path = dir.path().join("exp.txt");
    std::fs::write(&exp_path, "0 0\n0 1\n").unwrap();
    let out_path = dir.path().join("code.alist");
    let out = trapset(&[
        "gen-qc",
        "--exponents",
        exp_path.to_str().unwrap(),
        "--circulant-size",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let expected = build_qc(&parse_qc_exponents("0 0\n0 1\n").unwrap(), 3)
        .unwrap()
        .write_alist();
    let written = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(written, expected);

    // Without --out the same alist goes to standard output.
    let out = trapset(&[
        "gen-qc",
        "--exponents",
        exp_path.to_str().unwrap(),
        "--circulant-size",
        "3",
    ]);
    assert!(out.status.success());
    assert_eq!(sout(&out), expected);

    let parsed = TannerGraph::parse_alist(&written).unwrap();
    assert_eq!(parsed.num_vars(), 6);
    assert_eq!(parsed.num_checks(), 6);
}

#[test]
fn info_reports_the_builtin_code() {
    let out = trapset(&["info", "--code", "@tanner155", "--json"]);
    assert!(out.status.success());
    let result = &json(&out)["result"];
    assert_eq!(result["n"], 155);
    assert_eq!(result["m"], 93);
    assert_eq!(result["edges"], 465);
    assert_eq!(result["girth"], 8);
    assert_eq!(result["dv"], 3);
    assert_eq!(result["rate"], 0.4);
}

#[test]
fn lets_search_counts_the_small_classes() {
    let args = [
        "search",
        "lets",
        "--code",
        "@tanner155",
        "--a-max",
        "5",
        "--bprime-max",
        "4",
    ];
    let out = trapset(&args);
    assert!(out.status.success());
    assert_eq!(
        sout(&out),
        "   a    b        count\n\
         \x20  4    4          465\n\
         \x20  5    3          155\n\
         total=620\n\
         truncated=false\n"
    );

    let mut jargs = args.to_vec();
    jargs.push("--json");
    let doc = json(&trapset(&jargs));
    assert_eq!(doc["command"], "search-lets");
    assert_eq!(doc["result"]["category"], "LETS");
    assert_eq!(doc["result"]["total"], 620);
    assert_eq!(
        doc["result"]["classes"],
        serde_json::json!([
            {"a": 4, "b": 4, "count": 465},
            {"a": 5, "b": 3, "count": 155}
        ])
    );
}

#[test]
fn instance_listing_carries_every_set() {
    let dir = tempfile::tempdir().unwrap();
    let list_path = dir.path().join("lets.jsonl");
    let out = trapset(&[
        "search",
        "lets",
        "--code",
        "@tanner155",
        "--a-max",
        "4",
        "--bprime-max",
        "4",
        "--list-instances",
        list_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let listing = std::fs::read_to_string(&list_path).unwrap();
    let lines: Vec<&str> = listing.lines().collect();
    assert_eq!(lines.len(), 1 + 465);

    let header: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(header["schema"], "trapset/1");
    assert_eq!(header["command"], "search-lets");
    assert!(header["manifest"]["code_digest"].is_string());
    assert!(header["result"].is_null());

    for line in &lines[1..] {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["class"][0], 4);
        assert_eq!(record["class"][1], 4);
        assert_eq!(record["category"], "LETS");
        let vars: Vec<u32> = record["vars"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap() as u32)
            .collect();
        assert_eq!(vars.len(), 4);
        assert!(vars.windows(2).all(|w| w[0] < w[1]));
    }

    // Orbit-reduced runs keep representatives only, so listing them
    // would be misleading and is refused.
    let out = trapset(&[
        "search",
        "lets",
        "--code",
        "@tanner155",
        "--a-max",
        "4",
        "--symmetry",
        "auto",
        "--list-instances",
        list_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).starts_with("E:domain:"));
}

#[test]
fn worker_count_leaves_output_bytes_unchanged() {
    let args = [
        "search",
        "nets",
        "--code",
        "@tanner155",
        "--mode",
        "nonexhaustive",
        "--a-max",
        "6",
        "--json",
    ];
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut four = args.to_vec();
    four.extend(["--workers", "4"]);
    let first = trapset(&one);
    let second = trapset(&four);
    assert!(first.status.success());
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn symmetry_reduction_preserves_weighted_counts() {
    let plain = trapset(&[
        "search",
        "lets",
        "--code",
        "@tanner155",
        "--a-max",
        "5",
        "--bprime-max",
        "4",
        "--json",
    ]);
    let reduced = trapset(&[
        "search",
        "lets",
        "--code",
        "@tanner155",
        "--a-max",
        "5",
        "--bprime-max",
        "4",
        "--symmetry",
        "auto",
        "--json",
    ]);
    assert!(plain.status.success());
    assert!(reduced.status.success());
    assert_eq!(json(&plain)["result"], json(&reduced)["result"]);
}

#[test]
fn strict_mode_reports_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n24.alist", 24, 18, 0);
    let args = [
        "search",
        "lets",
        "--code",
        &code,
        "--a-max",
        "8",
        "--time-limit",
        "0",
    ];
    let out = trapset(&args);
    assert_eq!(out.status.code(), Some(0));
    assert!(sout(&out).contains("truncated=true\n"));

    let mut strict = args.to_vec();
    strict.push("--strict");
    let out = trapset(&strict);
    assert_eq!(out.status.code(), Some(3));
    assert!(serr(&out).starts_with("E:truncated:"));
    // The truncated result is still emitted before the status line.
    assert!(sout(&out).contains("truncated=true\n"));
}

#[test]
fn out_file_embeds_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n24.alist", 24, 18, 0);
    let out_path = dir.path().join("run.json");
    let out = trapset(&[
        "search",
        "lets",
        "--code",
        &code,
        "--a-max",
        "6",
        "--workers",
        "2",
        "--json",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let file: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(file["schema"], "trapset/1");
    assert_eq!(file["command"], "search-lets");
    let manifest = &file["manifest"];
    assert_eq!(manifest["workers"], 2);
    assert_eq!(manifest["config"]["a_max"], 6);
    assert_eq!(manifest["config"]["bprime_max"], 9);
    assert_eq!(manifest["code_digest"].as_str().unwrap().len(), 64);
    assert!(manifest["wall_seconds"].as_f64().unwrap() >= 0.0);
    // The stdout document and the result file carry the same body.
    assert_eq!(json(&out)["result"], file["result"]);
}

#[test]
fn stopping_drivers_agree_on_the_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n24.alist", 24, 18, 0);

    let out = trapset(&["stopping", "lower", "--code", &code, "--json"]);
    assert!(out.status.success());
    let result = &json(&out)["result"];
    assert_eq!(result["outcome"], "exact");
    assert_eq!(result["value"], 6);
    assert_eq!(result["certified_floor"], 5);
    assert_eq!(result["witness"]["a"], 6);
    assert_eq!(result["witness"]["elementary"], true);

    let text = trapset(&["stopping", "lower", "--code", &code]);
    assert!(sout(&text).contains("outcome=exact\nvalue=6\n"));

    let out = trapset(&["stopping", "upper", "--code", &code, "--json"]);
    assert!(out.status.success());
    let result = &json(&out)["result"];
    assert_eq!(result["outcome"], "upper-bound");
    assert_eq!(result["value"], 6);
    assert_eq!(result["rounds"], 1);
}

#[test]
fn tables_stopping_renders_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n24.alist", 24, 18, 0);
    let out = trapset(&["tables", "stopping", "--code", &code]);
    assert!(out.status.success());
    let text = sout(&out);
    assert!(text.starts_with("n=24 m=18 girth=6 lower=6 upper=6(e) "));
    assert!(text.contains("exact=true"));
}

#[test]
fn search_ss_lists_the_smallest_stopping_sets() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n24.alist", 24, 18, 0);
    let out = trapset(&["search", "ss", "--code", &code, "--a-max", "6", "--json"]);
    assert!(out.status.success());
    let result = &json(&out)["result"];
    let sizes = result["sizes"].as_array().unwrap();
    // The stopping distance of this fixture is 6, so size 6 is the
    // first nonempty row.
    assert_eq!(sizes[0]["a"], 6);
    assert!(sizes[0]["ess"].as_u64().unwrap() >= 1);
}

#[test]
fn oracle_compare_backs_the_engine_counts() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n20.alist", 20, 15, 7);
    let run_path = dir.path().join("lets.json");
    let out = trapset(&[
        "search",
        "lets",
        "--code",
        &code,
        "--a-max",
        "6",
        "--out",
        run_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let out = trapset(&[
        "oracle",
        "--code",
        &code,
        "--a-max",
        "6",
        "--compare-with",
        run_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let result = &json(&out)["result"];
    assert_eq!(result["compare"]["matched"], true);
    assert!(result["compare"]["classes_checked"].as_u64().unwrap() > 0);
    assert_eq!(result["compare"]["mismatches"], serde_json::json!([]));

    // Tampering with one count must surface as a mismatch with witnesses.
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&run_path).unwrap()).unwrap();
    let count = doc["result"]["classes"][0]["count"].as_u64().unwrap();
    doc["result"]["classes"][0]["count"] = serde_json::json!(count + 1);
    std::fs::write(&run_path, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = trapset(&[
        "oracle",
        "--code",
        &code,
        "--a-max",
        "6",
        "--compare-with",
        run_path.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    let result = &json(&out)["result"];
    assert_eq!(result["compare"]["matched"], false);
    let mismatch = &result["compare"]["mismatches"][0];
    assert_eq!(mismatch["engine"].as_u64().unwrap(), count + 1);
    assert_eq!(mismatch["oracle"].as_u64().unwrap(), count);
    assert!(!mismatch["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn nets_mode_rules_are_enforced() {
    let out = trapset(&["search", "nets", "--code", "@tanner155", "--a-max", "99"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).starts_with("E:range:"));
    assert!(serr(&out).contains("extended"));

    let out = trapset(&[
        "search",
        "nets",
        "--code",
        "@tanner155",
        "--mode",
        "extended",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).contains("--a-max"));

    let out = trapset(&[
        "search",
        "nets",
        "--code",
        "@tanner155",
        "--families",
        "N5",
        "--a-max",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(serr(&out).starts_with("E:domain:"));
}

#[test]
fn nets_exhaustive_defaults_to_the_certified_range() {
    let dir = tempfile::tempdir().unwrap();
    let code = fixture(dir.path(), "n24.alist", 24, 18, 0);
    // Degree 3, girth 6: certified through size 6 by the tabulated range.
    let out = trapset(&["search", "nets", "--code", &code, "--json"]);
    assert!(out.status.success());
    let doc = json(&out);
    assert_eq!(doc["result"]["mode"], "exhaustive");
    let families = doc["result"]["families"].as_array().unwrap();
    assert_eq!(families.len(), 6);
    let manifest_free = doc.get("manifest").is_none();
    assert!(manifest_free);
}
