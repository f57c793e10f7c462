use std::fs;
use std::process::{Command, Output};

use hypcert_core::certificate::{from_json, to_json};

fn hypcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypcert")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn decompose_prints_minimal_b() {
    let o = hypcert(&["decompose", "31"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "r=31 b=6 c=2\n");
    assert_eq!(hypcert(&["decompose", "0"]).status.code(), Some(2));
    assert_eq!(hypcert(&["decompose", "abc"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hypcert(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(hypcert(&["gen-noncompact", "--n", "two"]).status.code(), Some(2));
    assert_eq!(hypcert(&["gen-noncompact", "--targets", "6,12"]).status.code(), Some(2));
    assert_eq!(hypcert(&["gen-compact", "--rho", "2+sqrt5"]).status.code(), Some(2));
    assert_eq!(hypcert(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
}

#[test]
fn generation_is_byte_identical() {
    let a = hypcert(&["gen-noncompact", "--prime", "3", "--kmax", "15", "--n", "4"]);
    let b = hypcert(&["gen-noncompact", "--prime", "3", "--kmax", "15", "--n", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(to_json(&from_json(&text).unwrap()), text);
    let c = hypcert(&["gen-compact", "--kmin", "2", "--kmax", "5", "--mode", "explicit"]);
    let d = hypcert(&["gen-compact", "--kmin", "2", "--kmax", "5", "--mode", "explicit"]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn verify_exit_codes_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let g = good.to_str().unwrap();
    assert_eq!(hypcert(&["gen-noncompact", "--kmax", "6", "--out", g]).status.code(), Some(0));
    let o = hypcert(&["verify", g]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("k=6 PASS separation"));

    let text = fs::read_to_string(&good).unwrap();
    let bad = dir.path().join("bad.json");
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let b = &mut v[3]["construction"]["decomposition"]["b"];
    let bumped = b.as_str().unwrap().parse::<u64>().unwrap() + 1;
    *b = bumped.to_string().into();
    fs::write(&bad, serde_json::to_string(&v).unwrap()).unwrap();
    let o = hypcert(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed check decomposition"), "{}", stderr(&o));

    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{not json").unwrap();
    assert_eq!(hypcert(&["verify", junk.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&junk, "[]").unwrap();
    assert_eq!(hypcert(&["verify", junk.to_str().unwrap()]).status.code(), Some(1));
    fs::write(&junk, text.replacen("\"schemaVersion\": 1", "\"schemaVersion\": 9", 1)).unwrap();
    let o = hypcert(&["verify", junk.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains('9'));

    let o = hypcert(&["verify", "--json", g]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 6);
    assert!(v[0]["overall"].as_bool().unwrap());
}

#[test]
fn report_formats() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("c.json");
    let p = f.to_str().unwrap();
    assert_eq!(hypcert(&["gen-compact", "--kmin", "1", "--kmax", "12", "--out", p]).status.code(), Some(0));
    let t = stdout(&hypcert(&["report", p]));
    assert!(t.contains("pigeonhole: all 12 certificates share one trace-ring bound"), "{t}");
    assert!(t.contains("O_K[1/(31,sqrt5-25)]"));
    let csv = stdout(&hypcert(&["report", p, "--format", "csv"]));
    assert_eq!(csv.lines().count(), 13);
    let json: serde_json::Value = serde_json::from_str(&stdout(&hypcert(&["report", p, "--format", "json"]))).unwrap();
    assert_eq!(json["singleClass"], true);
}

#[test]
fn environment_fallbacks() {
    let o = Command::new(env!("CARGO_BIN_EXE_hypcert"))
        .args(["gen-noncompact"])
        .env("HYPCERT_KMAX", "3")
        .env("HYPCERT_PRIME", "5")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let certs = from_json(&stdout(&o)).unwrap();
    assert_eq!(certs.len(), 3);
    assert_eq!(certs[2].target_string(), "125");
    // flags win over the environment
    let o = Command::new(env!("CARGO_BIN_EXE_hypcert"))
        .args(["gen-noncompact", "--kmax", "2"])
        .env("HYPCERT_KMAX", "3")
        .output()
        .unwrap();
    assert_eq!(from_json(&stdout(&o)).unwrap().len(), 2);
}

#[test]
fn smooth_target_lists() {
    let o = hypcert(&["gen-noncompact", "--targets", "6,12,18", "--smooth-bound", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(from_json(&stdout(&o)).unwrap().len(), 3);
    let o = hypcert(&["gen-noncompact", "--targets", "6,35", "--smooth-bound", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("35"));
}

#[test]
fn distance_and_three_squares() {
    let o = hypcert(&["distance", "--form", "-1,1,1,1", "--v", "0,1,0,0", "--w", "3,6,2,0"]);
    let s = stdout(&o);
    assert!(s.contains("class: ultraparallel") && s.contains("cosh^2: 36/31"), "{s}");
    assert!(s.contains("distance: [0.39152944059"), "{s}");
    let o = hypcert(&["distance", "--form", "-1,1,1,1", "--v", "0,1,0,0", "--w", "0,0,1,0"]);
    assert_eq!(stdout(&o), "class: incident\n");
    let o = hypcert(&["three-squares", "--eps", "3+sqrt5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("3+sqrt5 = "));
    assert_eq!(hypcert(&["three-squares", "--eps", "-1"]).status.code(), Some(2));
}
