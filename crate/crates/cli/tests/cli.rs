use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn modinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modinv")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn fixture(dir: &Path, name: &str, primes: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let mut args = vec!["fixtures", name, "--out", path.to_str().unwrap()];
    if !primes.is_empty() {
        args.extend(["--primes", primes]);
    }
    assert_eq!(code(&modinv(&args)), 0);
    path
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn independence_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let sl2 = fixture(dir.path(), "sl2-std", "7,11,13");
    let o = modinv(&["independence", "--bundle", sl2.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["tool"], "modinv");
    assert_eq!(v["command"], "independence");
    assert_eq!(v["seed"], 4);
    assert_eq!(v["report"]["verdict"], true);

    let adv = fixture(dir.path(), "torus-adversarial", "");
    let o = modinv(&["independence", "--bundle", adv.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["report"]["offending_primes"], serde_json::json!([11]));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&modinv(&["fixtures", "nope"])), 2);
    let missing = dir.path().join("missing.json");
    let o = modinv(&["independence", "--bundle", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(!o.stderr.is_empty());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n": 2}"#).unwrap();
    assert_eq!(code(&modinv(&["compat-check", "--bundle", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&modinv(&["tame", "digits", "--ell", "8", "--level", "2", "--exponent", "3"])), 2);
}

#[test]
fn tame_decompose_on_the_multiplication_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let rep = fixture(dir.path(), "tame-mult", "7");
    let o = modinv(&["tame", "decompose", "--in", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let digits: Vec<Value> = json(&o)["report"]["characters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["digits"].clone())
        .collect();
    assert_eq!(digits, vec![serde_json::json!([0, 1]), serde_json::json!([1, 0])]);
    // a digit bound of 0 fails the audit
    let o = modinv(&["tame", "serre", "--in", rep.to_str().unwrap(), "--e", "1", "--i", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn formchar_compare_and_wrapped_input() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let c = dir.path().join("c.json");
    std::fs::write(&a, r#"{"n":3,"weights":[[2,0,-2]]}"#).unwrap();
    std::fs::write(&b, r#"{"n":3,"weights":[[0,-2,2]]}"#).unwrap();
    std::fs::write(&c, r#"{"n":3,"weights":[[1,1,-2]]}"#).unwrap();
    let same = modinv(&["formchar", "--in", a.to_str().unwrap(), "--compare", b.to_str().unwrap()]);
    assert_eq!(code(&same), 0);
    let differ = modinv(&["formchar", "--in", a.to_str().unwrap(), "--compare", c.to_str().unwrap()]);
    assert_eq!(code(&differ), 1);

    // inputs wrapped in the tool's report envelope are accepted
    let bundle = fixture(dir.path(), "sl2-std", "7,11");
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&bundle).unwrap()).unwrap();
    let wrapped = dir.path().join("wrapped.json");
    let body = serde_json::json!({"tool": "modinv", "tool_version": "0", "command": "fixtures", "seed": 0, "report": raw});
    std::fs::write(&wrapped, body.to_string()).unwrap();
    let o = modinv(&["compat-check", "--bundle", wrapped.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["pass"], true);
}

#[test]
fn envelope_and_rank_commands() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, r#"{"n":2,"ell":7,"generators":[[[1,1],[0,1]],[[1,0],[1,1]]]}"#).unwrap();
    let o = modinv(&["envelope", "--in", g.to_str().unwrap(), "--quotient"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["report"]["envelope"]["dim"], 3);
    assert_eq!(v["report"]["quotient"]["points_order"], 336);

    let r = dir.path().join("r.json");
    std::fs::write(&r, r#"[{"type":"A1","twist":1,"f":2,"ell":7}]"#).unwrap();
    let o = modinv(&["rank", "--in", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["report"]["rank_report"]["total_rank"], 2);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let bundle = fixture(dir.path(), "sym2", "7,11");
    for format in ["json", "text"] {
        let args = ["independence", "--bundle", bundle.to_str().unwrap(), "--seed", "11", "--format", format];
        let a = modinv(&args);
        let b = modinv(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
    let first = fixture(dir.path(), "weil-res-sl2", "7,11");
    let again = std::fs::read(&first).unwrap();
    let second = fixture(dir.path(), "weil-res-sl2", "7,11");
    assert_eq!(again, std::fs::read(second).unwrap());
    let v: Value = serde_json::from_slice(&again).unwrap();
    assert_eq!(v["n"], 4);
}
