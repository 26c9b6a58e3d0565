use rouxforge_web::{parameter_table, psl2_summary, psu3_table};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.unwrap()).unwrap()
}

#[test]
fn psl2_summary_lists_higman_roux() {
    let v = parse(psl2_summary(13));
    assert_eq!(v["n"], 14);
    assert_eq!(v["all_pass"], true);
    let roux = v["roux"].as_array().unwrap();
    assert!(!roux.is_empty());
    let b = roux.iter().find(|b| b["image_order"] == 2).unwrap();
    assert_eq!(b["entries"].as_array().unwrap().len(), 14);
    let halves = b["table"]["branches"].as_array().unwrap().iter().filter(|x| (x["d"].as_f64().unwrap() - 7.0).abs() < 1e-9).count();
    assert!(halves > 0);
    assert!(psl2_summary(19).is_err());
    assert!(psl2_summary(6).is_err());
}

#[test]
fn psu3_table_has_both_signs() {
    let v = parse(psu3_table(3, 4));
    assert_eq!(v["n"], 28);
    assert_eq!(v["branches"].as_array().unwrap().len(), 8);
    let d7 = v["branches"].as_array().unwrap().iter().any(|b| (b["d"].as_f64().unwrap() - 7.0).abs() < 1e-9);
    assert!(d7);
    assert!(psu3_table(3, 3).is_err());
}

#[test]
fn parameter_table_validates_input() {
    let v = parse(parameter_table(6, "4"));
    let ds: Vec<f64> = v["branches"].as_array().unwrap().iter().map(|b| b["d"].as_f64().unwrap()).collect();
    assert!((ds[0] - 1.0).abs() < 1e-9 || (ds[1] - 1.0).abs() < 1e-9);
    assert!(parameter_table(6, "1,2").is_err());
    assert!(parameter_table(6, "x").is_err());
    assert!(parameter_table(6, "2,1,1").is_ok());
}
