//! Browser bindings for the `www/index.html` demo page.
//!
//! Each exported function takes plain text from a form field and returns a
//! JSON string. The `*_json` functions hold the logic and run natively, so
//! they are tested without a browser.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use gromov_core::census::{run_census, SamplerConfig};
use gromov_core::equivalence::decide_equivalence;
use gromov_core::metric::{extract_structure, MetricError};
use gromov_core::structure::removed_edges;
use gromov_core::{fingerprint, matrix_rep, parse_metric, GromovStructure, MetricFormat};

/// Largest census the page will run; the browser has a single thread.
pub const MAX_DEMO_SAMPLES: u64 = 200_000;

fn detect_format(text: &str) -> MetricFormat {
    match text.lines().find(|l| !l.trim().is_empty()) {
        Some(first) if first.trim_start().starts_with('{') => MetricFormat::Json,
        Some(first) if first.split(',').count() == 1 => MetricFormat::CsvLower,
        _ => MetricFormat::CsvFull,
    }
}

fn structure_report(s: &GromovStructure) -> Value {
    let fp = fingerprint(s);
    json!({
        "n": s.n(),
        "triples": s.triples_label(),
        "matrix": matrix_rep(s).rows(),
        "removed_edges": removed_edges(s).into_iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
        "rank": fp.rank,
        "ends": fp.ends,
        "irreducible": fp.irreducible,
        "char_poly": fp.char_poly.factored_string(),
        "min_poly": fp.min_poly.factored_string(),
    })
}

/// Extracts the structure of a metric given as CSV (full or lower triangle)
/// or JSON, and lists its invariants.
pub fn analyze_json(text: &str) -> Result<Value, String> {
    let space = parse_metric(text, detect_format(text)).map_err(|e| e.to_string())?;
    match extract_structure(&space) {
        Ok(extraction) => {
            let mut report = structure_report(&extraction.structure);
            report["minima"] = json!(extraction.minima.iter().map(ToString::to_string).collect::<Vec<_>>());
            Ok(report)
        }
        Err(MetricError::NonGeneric { vertices }) => Err(format!(
            "not generic: tied minimal products at vertices {}",
            vertices.iter().map(|v| (v + 1).to_string()).collect::<Vec<_>>().join(", ")
        )),
        Err(e) => Err(e.to_string()),
    }
}

/// Decides whether two structures, each one `i: a b` line per vertex or a
/// JSON triple list, are relabelings of each other.
pub fn compare_json(first: &str, second: &str) -> Result<Value, String> {
    let a = GromovStructure::parse(first).map_err(|e| format!("first structure: {e}"))?;
    let b = GromovStructure::parse(second).map_err(|e| format!("second structure: {e}"))?;
    let verdict = decide_equivalence(&a, &b).map_err(|e| e.to_string())?;
    Ok(serde_json::to_value(verdict).expect("verdict serializes"))
}

/// Runs a census with the default weight range and lists the classes found,
/// most frequent first.
pub fn census_json(n: usize, samples: u64, seed: u64) -> Result<Value, String> {
    if samples > MAX_DEMO_SAMPLES {
        return Err(format!("at most {MAX_DEMO_SAMPLES} samples in the browser"));
    }
    let registry = run_census(&SamplerConfig::new(n, samples, seed), 0).map_err(|e| e.to_string())?;
    let mut classes: Vec<_> = registry.records.values().collect();
    classes.sort_by(|x, y| y.hits.cmp(&x.hits));
    let classes: Vec<Value> = classes
        .into_iter()
        .map(|r| {
            let mut entry = structure_report(&r.canonical);
            entry["hits"] = json!(r.hits);
            entry["first_draw"] = json!(r.first_witness.draw_index);
            entry
        })
        .collect();
    Ok(json!({
        "summary": registry.summary_line(),
        "nongeneric_rate": registry.nongeneric_rate(),
        "classes": classes,
    }))
}

fn finish(result: Result<Value, String>) -> Result<String, JsValue> {
    result.map(|v| v.to_string()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn analyze(text: &str) -> Result<String, JsValue> {
    finish(analyze_json(text))
}

#[wasm_bindgen]
pub fn compare(first: &str, second: &str) -> Result<String, JsValue> {
    finish(compare_json(first, second))
}

#[wasm_bindgen]
pub fn census(n: usize, samples: u32, seed: u32) -> Result<String, JsValue> {
    finish(census_json(n, samples.into(), seed.into()))
}
