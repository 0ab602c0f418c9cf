//! Browser bindings: list the built-in models and compute reports.
//!
//! Every function returns a JSON string; errors come back as a thrown string.

use std::collections::BTreeMap;

use bicohom::catalog;
use bicohom::dsl;
use bicohom::report::{self, TextOptions, USER_LABEL};
use bicohom::Rational;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse_params(params_json: &str) -> Result<BTreeMap<String, Rational>, String> {
    if params_json.trim().is_empty() {
        return Ok(BTreeMap::new());
    }
    let raw: BTreeMap<String, String> = serde_json::from_str(params_json).map_err(|e| e.to_string())?;
    raw.into_iter()
        .map(|(k, v)| v.trim().parse::<Rational>().map(|r| (k.clone(), r)).map_err(|_| format!("{k}: '{v}' is not rational")))
        .collect()
}

fn output(r: &bicohom::cohomology::SurfaceReport) -> String {
    json!({
        "report": r,
        "text": report::render_text(r, &TextOptions { representatives: true, ..TextOptions::default() }),
    })
    .to_string()
}

/// `[{id, description, params: [{name, default, nonzero}]}]`
pub fn list_models_json() -> String {
    let models: Vec<_> = catalog::list()
        .into_iter()
        .map(|m| {
            let params: Vec<_> = m
                .params
                .iter()
                .map(|p| json!({ "name": p.name, "default": p.default.to_string(), "nonzero": p.nonzero }))
                .collect();
            json!({ "id": m.id, "description": m.description, "params": params })
        })
        .collect();
    serde_json::Value::Array(models).to_string()
}

/// Report of a built-in model; `params_json` maps names to rational strings.
pub fn compute_model_json(id: &str, params_json: &str) -> Result<String, String> {
    let params = parse_params(params_json)?;
    let (a, _) = report::analyze_catalog(id, &params).map_err(|e| e.to_string())?;
    Ok(output(&a.report))
}

/// Report of a model written in the description language.
pub fn compute_source_json(source: &str) -> Result<String, String> {
    let (doc, _) = dsl::parse(source).map_err(|d| d.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("\n"))?;
    let model = doc.instantiate(&BTreeMap::new()).map_err(|e| e.to_string())?;
    let a = report::analyze_model(&model, USER_LABEL).map_err(|e| e.to_string())?;
    Ok(output(&a.report))
}

#[wasm_bindgen]
pub fn list_models() -> String {
    list_models_json()
}

#[wasm_bindgen]
pub fn compute_model(id: &str, params_json: &str) -> Result<String, JsValue> {
    compute_model_json(id, params_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compute_source(source: &str) -> Result<String, JsValue> {
    compute_source_json(source).map_err(|e| JsValue::from_str(&e))
}
