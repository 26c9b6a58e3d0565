//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export returns a JSON string, or an error message.

use rouxforge::families::{psu3_parameters_closed_form, sl2_family, FamilyOptions};
use rouxforge::roux::{idempotent_data, is_real_lines, verify_roux, RouxParameters};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `q` the page offers for PSL(2,q); larger orders freeze a browser tab.
pub const DEMO_MAX_Q: u64 = 17;

#[derive(Serialize)]
struct Branch {
    k: u32,
    eps: i8,
    c_hat: f64,
    mu: f64,
    d: f64,
    real: bool,
}

#[derive(Serialize)]
struct Table {
    n: usize,
    r: u32,
    c: Vec<i64>,
    branches: Vec<Branch>,
}

fn table(p: &RouxParameters) -> Table {
    let branches = (0..p.r)
        .flat_map(|k| {
            let (plus, minus) = idempotent_data(p, k);
            [plus, minus].map(|b| Branch { k, eps: b.eps, c_hat: b.c_hat, mu: b.mu, d: b.d, real: is_real_lines(p, k) })
        })
        .collect();
    Table { n: p.n, r: p.r, c: p.c.clone(), branches }
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Roux {
    character: usize,
    image_order: u32,
    n: usize,
    r: u32,
    entries: Vec<Vec<Option<u32>>>,
    table: Table,
}

#[derive(Serialize)]
struct Summary {
    q: u64,
    n: usize,
    group_order: usize,
    all_pass: bool,
    checks: Vec<(String, bool)>,
    roux: Vec<Roux>,
}

/// Builds PSL(2,q) from matrices and returns every Higman roux with its branch table.
#[wasm_bindgen]
pub fn psl2_summary(q: u32) -> Result<String, String> {
    let q = q as u64;
    if q > DEMO_MAX_Q {
        return Err(format!("q = {q} is above the demo limit {DEMO_MAX_Q}"));
    }
    let r = sl2_family(q, &FamilyOptions::default()).map_err(|e| e.to_string())?;
    let mut roux = Vec::new();
    for c in r.characters.iter().filter(|c| c.higman) {
        let Some(b) = r.roux_for(c.index) else { continue };
        let p = verify_roux(b).map_err(|e| e.to_string())?;
        roux.push(Roux { character: c.index, image_order: c.image_order, n: b.n, r: b.r, entries: b.entries.clone(), table: table(&p) });
    }
    json(&Summary {
        q,
        n: r.n,
        group_order: r.group_order,
        all_pass: r.all_pass,
        checks: r.checks.iter().map(|c| (c.id.clone(), c.pass)).collect(),
        roux,
    })
}

/// Closed-form PSU(3,q) parameters over `C_{r'}` and their branch table.
#[wasm_bindgen]
pub fn psu3_table(q: u32, r_prime: u32) -> Result<String, String> {
    let p = psu3_parameters_closed_form(q as u64, r_prime).map_err(|e| e.to_string())?;
    json(&table(&p))
}

/// Branch table for hand-entered parameters `c_0..c_{r-1}`, comma separated.
#[wasm_bindgen]
pub fn parameter_table(n: u32, c: &str) -> Result<String, String> {
    let c: Vec<i64> = c
        .split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| format!("bad coefficient {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if n < 2 || c.is_empty() {
        return Err("need n >= 2 and at least one coefficient".into());
    }
    if c.iter().any(|&x| x < 0) || c.iter().sum::<i64>() != n as i64 - 2 {
        return Err(format!("coefficients must be nonnegative and sum to n - 2 = {}", n as i64 - 2));
    }
    let r = c.len();
    if (0..r).any(|g| c[g] != c[(r - g) % r]) {
        return Err("coefficients must satisfy c_g = c_{-g}".into());
    }
    json(&table(&RouxParameters { n: n as usize, r: r as u32, c }))
}
