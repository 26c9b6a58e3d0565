use crate::Failure;
use rouxforge::families::{CharacterRecord, FamilyReport};
use serde::Serialize;
use serde_json::Value;
use std::io::Write;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::internal(e.to_string())),
    }
}

fn field(v: f64) -> String {
    format!("{v:.12}")
}

pub const BRANCH_HEADER: &str = "family,q,n,character,r_prime,higman,k,eps,d,mu,welch,real,certified";

pub fn branch_rows(family: &str, q: u64, n: usize, chars: &[CharacterRecord]) -> String {
    let mut s = String::new();
    for c in chars {
        if c.branches.is_empty() {
            s.push_str(&format!("{family},{q},{n},{},{},{},,,,,,,\n", c.index, c.image_order, c.higman));
        }
        for b in &c.branches {
            let welch = b.certificate.as_ref().map(|c| field(c.welch)).unwrap_or_default();
            s.push_str(&format!(
                "{family},{q},{n},{},{},{},{},{},{},{},{welch},{},{}\n",
                c.index,
                c.image_order,
                c.higman,
                b.k,
                b.eps,
                field(b.d),
                field(b.mu),
                b.real_algebraic,
                b.certified
            ));
        }
    }
    s
}

pub fn family_csv(r: &FamilyReport) -> String {
    format!("{BRANCH_HEADER}\n{}", branch_rows(&r.family, r.q, r.n, &r.characters))
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") }, x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `field,value` rows from a JSON object, nested keys joined with dots.
pub fn key_value_csv<T: Serialize>(value: &T) -> Result<String, Failure> {
    let v = serde_json::to_value(value).map_err(|e| Failure::internal(e.to_string()))?;
    let mut rows = Vec::new();
    flatten("", &v, &mut rows);
    let mut s = String::from("field,value\n");
    for (k, x) in rows {
        s.push_str(&format!("{},{}\n", quote(&k), quote(&x)));
    }
    Ok(s)
}
