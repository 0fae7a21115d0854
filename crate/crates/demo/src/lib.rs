//! WebAssembly bindings behind the static page in `www/`.
//!
//! Every exported function returns a JSON string. Integers are written as
//! decimal strings so nothing is lost on the JavaScript side.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use fwps::classify::classify_weight;
use fwps::invariants::{gorenstein_index, gorenstein_report, invariant_bundle, picard_index, DegreeMatrix};
use fwps::weights::enumerate_gorenstein_weights;
use fwps::Int;

/// Largest dimension the page classifies in the browser.
pub const MAX_CLASSIFY_DIM: usize = 3;
/// Largest dimension the page enumerates weight vectors for.
pub const MAX_COUNT_DIM: usize = 5;

fn strings(v: &[Int]) -> Vec<String> {
    v.iter().map(Int::to_string).collect()
}

pub fn invariants_value(matrix: &str) -> Value {
    let q = match DegreeMatrix::parse_unverified(matrix) {
        Ok(q) => q,
        Err(e) => return json!({ "error": e.to_string() }),
    };
    let b = invariant_bundle(&q);
    let report = gorenstein_report(&q);
    json!({
        "matrix": q.to_string(),
        "l": b.l.to_string(),
        "m": b.m.to_string(),
        "m_factors": strings(&b.m_factors),
        "s": b.s.to_string(),
        "picard_index": picard_index(&q).to_string(),
        "gorenstein_index": gorenstein_index(&q).to_string(),
        "lcm_divides_sum": report.lcm_divides_sum,
        "m_divides_quotient": report.m_divides_quotient,
        "rows_sum_to_zero": report.rows_sum_to_zero,
        "gorenstein": report.holds(),
        // 1-based, as shown on the page
        "failing_column": q.failing_column().map(|c| c + 1),
    })
}

pub fn classify_value(dim: usize) -> Value {
    if !(1..=MAX_CLASSIFY_DIM).contains(&dim) {
        return json!({ "error": format!("dimension must be between 1 and {MAX_CLASSIFY_DIM}") });
    }
    let records: Vec<Value> = enumerate_gorenstein_weights(dim)
        .iter()
        .flat_map(|w| classify_weight(w))
        .map(|r| serde_json::from_str(&r.to_line()).expect("records are valid JSON"))
        .collect();
    json!({ "dim": dim, "records": records })
}

pub fn weight_counts_value(max_dim: usize) -> Value {
    if !(1..=MAX_COUNT_DIM).contains(&max_dim) {
        return json!({ "error": format!("dimension must be between 1 and {MAX_COUNT_DIM}") });
    }
    let counts: Vec<Value> = (1..=max_dim)
        .map(|n| {
            let weights = enumerate_gorenstein_weights(n);
            let largest = weights.iter().map(|w| w.iter().sum::<Int>()).max().unwrap_or(0);
            json!({ "dim": n, "count": weights.len(), "largest_sum": largest.to_string() })
        })
        .collect();
    json!({ "counts": counts })
}

/// Invariants and Gorenstein conditions of a degree matrix such as `1,1,1;0,1,2@3`.
#[wasm_bindgen]
pub fn invariants(matrix: &str) -> String {
    invariants_value(matrix).to_string()
}

/// Every class of the given dimension as classification records.
#[wasm_bindgen]
pub fn classify(dim: usize) -> String {
    classify_value(dim).to_string()
}

/// Number of weight vectors in each dimension up to `max_dim`.
#[wasm_bindgen]
pub fn weight_counts(max_dim: usize) -> String {
    weight_counts_value(max_dim).to_string()
}
