use sclgap_cli::{revalidate, run, Document};
use serde_json::Value;

fn ok(args: &[&str]) -> Value {
    let (code, out, err) = run(std::iter::once("sclgap").chain(args.iter().copied()));
    assert_eq!(code, 0, "{args:?}: {err}");
    serde_json::from_str(&out).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(std::iter::once("sclgap").chain(args.iter().copied())).0
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["gap", "element", "--group", "C2 * C3", "a c"]), 2);
    assert_eq!(code(&["gap", "element", "--group", "C2 * Cx", "a"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["orb", "rel-gap", "--spec", "orb(genus=0, boundary=1, cones=[2,2])", "y1 y2"]), 3);
    assert_eq!(code(&["vondyck", "constant", "--eps", "0.5"]), 3);
}

#[test]
fn schema_and_sorted_keys() {
    let v = ok(&["gap", "chain", "--group", "F2", "[x1 x2 x1^-1 x2^-1]"]);
    assert_eq!(v["schema_version"], "1");
    assert!(v.get("timing").is_none());
    let keys: Vec<&String> = v["result"].as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    revalidate(&v["result"]).unwrap();
}

#[test]
fn timing_is_opt_in() {
    let v = ok(&["--timing", "reduce", "--group", "F2", "x1 x1^-1 x2"]);
    assert!(v["timing"].is_object());
}

#[test]
fn closed_gap_reports_classification() {
    let v = ok(&["orb", "closed-gap", "--spec", "orb(genus=0, cones=[3,3,3,3])", "y1 y3"]);
    assert_eq!(v["result"]["bound"]["den"], "36");
    assert!(v["result"].get("classification").is_some());
}

#[test]
fn tampered_certificate_is_rejected() {
    let mut v = ok(&["gap", "element", "--group", "C2 * C3", "a b"]);
    v["result"]["bound"]["den"] = Value::String("11".into());
    assert!(revalidate(&v["result"]).is_err());
}

#[test]
fn documents_round_trip() {
    let (_, out, _) = run(["sclgap", "vondyck", "constant"]);
    let doc = Document::parse(&out).unwrap();
    assert_eq!(doc.command, "vondyck constant");
    assert_eq!(doc.render() + "\n", out);
}

#[test]
fn text_format_flattens_paths() {
    let (code, out, _) = run(["sclgap", "--format", "text", "gap", "element", "--group", "C2 * C3", "a b"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "status = lower_bound"), "{out}");
}
