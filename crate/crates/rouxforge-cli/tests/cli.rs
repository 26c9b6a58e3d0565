use rouxforge::lines::MatrixFile;
use rouxforge::roux::{branch_signature, idempotent_data, verify_roux, RouxMatrix};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn rouxforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rouxforge")).args(args).env_remove("ROUXFORGE_CACHE").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn higman(report: &Value) -> Vec<&Value> {
    report["characters"].as_array().unwrap().iter().filter(|c| c["higman"] == true).collect()
}

#[test]
fn psl2_13_is_real_with_d_7() {
    let out = rouxforge(&["family", "psl2", "--q", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["n"], 14);
    assert_eq!(r["all_pass"], true);
    let quad = higman(&r).into_iter().find(|c| c["image_order"] == 2).unwrap();
    let b = quad["branches"].as_array().unwrap().iter().find(|b| b["k"] == 1).unwrap();
    assert_eq!(b["d"].as_f64().unwrap().round(), 7.0);
    assert_eq!(b["real_algebraic"], true);
    assert_eq!(b["certified"], true);
}

#[test]
fn excluded_orders_are_input_errors() {
    let out = rouxforge(&["family", "psl2", "--q", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PSL(2,9)"));
    assert_eq!(rouxforge(&["family", "psl2", "--q", "8"]).status.code(), Some(2));
    assert_eq!(rouxforge(&["family", "psu3", "--q", "2"]).status.code(), Some(2));
    assert_eq!(rouxforge(&["family", "psl2"]).status.code(), Some(2));
    assert_eq!(rouxforge(&["family", "sp", "--m", "2", "--epsilon", "+"]).status.code(), Some(2));
    assert_eq!(rouxforge(&["family", "psl2", "--q", "5", "--tol-etf", "0"]).status.code(), Some(2));
    assert_eq!(rouxforge(&["family", "nope"]).status.code(), Some(2));
}

#[test]
fn psu3_3_has_two_nontrivial_blocks() {
    let out = rouxforge(&["family", "psu3", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let mut orders: Vec<u64> = higman(&r).iter().map(|c| c["image_order"].as_u64().unwrap()).filter(|&o| o > 1).collect();
    orders.sort();
    orders.dedup();
    assert_eq!(orders, vec![2, 4]);
    let only4 = json(&rouxforge(&["family", "psu3", "--q", "3", "--r-prime", "4"]));
    let c = &only4["characters"].as_array().unwrap()[0];
    assert_eq!(c["compressed"], serde_json::json!([2, 8, 8, 8]));
}

#[test]
fn witness_families_exit_zero() {
    for args in [
        vec!["family", "suzuki", "--q", "8"],
        vec!["family", "ree", "--q", "27"],
        vec!["family", "sp", "--m", "3", "--epsilon", "-"],
        vec!["family", "sp", "--m", "4", "--epsilon", "plus"],
    ] {
        let out = rouxforge(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let r = json(&rouxforge(&["family", "sp", "--m", "3", "--epsilon", "-"]));
    assert_eq!(r["w_substituted"], true);
    assert_eq!(r["derived_index"], 2);
}

#[test]
fn detect_s3_and_sl25() {
    let dir = tempfile::tempdir().unwrap();
    let s3 = write(dir.path(), "s3.json", r#"{"kind":"permutation","degree":3,"generators":[[1,0,2],[1,2,0]]}"#);
    let r = json(&rouxforge(&["detect", &s3, "--all-characters"]));
    let trivial = &r["characters"][0];
    assert_eq!(trivial["image_order"], 1);
    assert_eq!(trivial["higman"], true);
    for b in trivial["branches"].as_array().unwrap() {
        let d = b["d"].as_f64().unwrap().round();
        assert!(d == 1.0 || d == 2.0);
    }

    let sl = write(dir.path(), "sl.json", r#"{"kind":"matrix","q":5,"dim":2,"generators":[[1,1,0,1],[2,0,0,3],[0,1,4,0]]}"#);
    let quad = write(
        dir.path(),
        "quad.json",
        r#"{"modulus":4,"images":[{"element":[2,0,0,3],"value":2},{"element":[1,1,0,1],"value":0}]}"#,
    );
    let out = rouxforge(&["detect", &sl, "--character", &quad]);
    assert_eq!(out.status.code(), Some(0));
    let c = &json(&out)["characters"][0];
    assert_eq!(c["higman"], true);
    assert_eq!(c["params"], serde_json::json!([2, 0, 2, 0]));

    let base = write(dir.path(), "a5.json", r#"{"kind":"permutation","degree":6,"generators":[[0,3,4,2,5,1],[0,4,3,2,1,5],[5,4,2,3,1,0]]}"#);
    let out = rouxforge(&["detect", &sl, "--cover", &base, "--all-characters"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["kernel_order"], 2);
    assert_eq!(higman(&r).len(), 2);
    let wrong = write(dir.path(), "w.json", r#"{"kind":"permutation","degree":6,"generators":[[1,2,3,4,5,0],[0,4,3,2,1,5],[5,4,2,3,1,0]]}"#);
    assert_eq!(rouxforge(&["detect", &sl, "--cover", &wrong, "--all-characters"]).status.code(), Some(2));
}

#[test]
fn detect_precondition_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let intrans = write(dir.path(), "i.json", r#"{"kind":"permutation","degree":4,"generators":[[1,0,2,3]]}"#);
    let out = rouxforge(&["detect", &intrans, "--all-characters"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("H1"));
    let cyc = write(dir.path(), "c.json", r#"{"kind":"permutation","degree":4,"generators":[[1,2,3,0]]}"#);
    assert_eq!(rouxforge(&["detect", &cyc, "--all-characters"]).status.code(), Some(3));
    let junk = write(dir.path(), "j.json", "{");
    assert_eq!(rouxforge(&["detect", &junk, "--all-characters"]).status.code(), Some(2));
    let bad = write(dir.path(), "b.json", r#"{"kind":"permutation","degree":3,"generators":[[0,0,1]]}"#);
    assert_eq!(rouxforge(&["detect", &bad, "--all-characters"]).status.code(), Some(2));
}

#[test]
fn exported_roux_verifies_and_corruption_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let ex = dir.path().join("ex");
    let out = rouxforge(&["family", "psl2", "--q", "7", "--export-dir", ex.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let quad = higman(&json(&out)).into_iter().find(|c| c["image_order"] == 2).unwrap()["index"].as_u64().unwrap();
    let path = ex.join(format!("roux_{quad}.json"));
    let v = json(&rouxforge(&["verify", "roux", path.to_str().unwrap()]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["params"], serde_json::json!([0, 3, 0, 3]));

    let mut b: RouxMatrix = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    b.entries[1][3] = Some((b.entries[1][3].unwrap() + 1) % b.r);
    b.entries[3][1] = Some((b.r - b.entries[1][3].unwrap()) % b.r);
    let bad = write(dir.path(), "bad.json", &serde_json::to_string(&b).unwrap());
    let out = rouxforge(&["verify", "roux", &bad]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["pass"], false);
    assert!(v["cell"].is_array());
}

#[test]
fn verify_signatures_and_two_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let n = 5;
    let entries: Vec<[f64; 2]> = (0..n * n).map(|t| [if t / n == t % n { 0.0 } else { 1.0 }, 0.0]).collect();
    let jmi = write(dir.path(), "jmi.json", &serde_json::to_string(&MatrixFile { n, entries }).unwrap());
    let v = json(&rouxforge(&["verify", "signature", &jmi]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["etf"]["d"], 1);

    let ex = dir.path().join("ex");
    json(&rouxforge(&["family", "psl2", "--q", "5", "--r-prime", "2", "--export-dir", ex.to_str().unwrap()]));
    let file = std::fs::read_dir(&ex).unwrap().next().unwrap().unwrap().path();
    let b: RouxMatrix = serde_json::from_str(&std::fs::read_to_string(file).unwrap()).unwrap();
    let (_, minus) = idempotent_data(&verify_roux(&b).unwrap(), 1);
    let s = branch_signature(&b, &minus);
    let sig = write(dir.path(), "paley.json", &serde_json::to_string(&MatrixFile::from_matrix(&s)).unwrap());
    let v = json(&rouxforge(&["verify", "twograph", &sig]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["parity"], true);
    assert_eq!(v["d"].as_f64().unwrap().round(), 3.0);
    let v = json(&rouxforge(&["verify", "signature", &sig]));
    assert_eq!(v["etf"]["d"], 3);
    assert_eq!(v["real"], true);

    let gram = write(dir.path(), "g.json", &serde_json::to_string(&MatrixFile { n: 2, entries: vec![[1.0, 0.0], [0.5, 0.0], [0.5, 0.0], [1.0, 0.0]] }).unwrap());
    let v = json(&rouxforge(&["verify", "etf", &gram]));
    assert_eq!(v["kind"], "etf");
}

#[test]
fn output_is_deterministic_and_cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let a = rouxforge(&["family", "psu3", "--q", "3", "--all-characters"]).stdout;
    let b = rouxforge(&["family", "psu3", "--q", "3", "--all-characters", "--jobs", "4"]).stdout;
    assert_eq!(a, b);
    let cache = dir.path().join("cache");
    let cached = |args: &[&str]| Command::new(env!("CARGO_BIN_EXE_rouxforge")).args(args).env("ROUXFORGE_CACHE", &cache).output().unwrap();
    let first = cached(&["family", "psu3", "--q", "3", "--all-characters"]);
    assert!(std::fs::read_dir(&cache).unwrap().count() > 0);
    let second = cached(&["family", "psu3", "--q", "3", "--all-characters"]);
    assert_eq!(first.stdout, a);
    assert_eq!(second.stdout, a);
}

#[test]
fn csv_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = rouxforge(&["family", "psl2", "--q", "5", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "family,q,n,character,r_prime,higman,k,eps,d,mu,welch,real,certified");
    assert!(lines.any(|l| l.starts_with("psl2,5,6,") && l.contains(",3.000000000000,")));
}
