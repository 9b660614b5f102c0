//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes and returns JSON strings; errors become JS exceptions.

pub mod api;

use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    let v = r.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string()))
}

/// Runs an experiment config and returns `{records, summary, ...}`.
#[wasm_bindgen(js_name = runExperiment)]
pub fn run_experiment(config_json: &str) -> Result<String, JsError> {
    to_json(api::run_experiment(config_json))
}

#[wasm_bindgen(js_name = evaluateGaps)]
pub fn evaluate_gaps(
    game_json: &str,
    partition_json: &str,
    strategy_json: &str,
) -> Result<String, JsError> {
    to_json(api::evaluate_gaps(game_json, partition_json, strategy_json))
}

#[wasm_bindgen(js_name = checkLemmas)]
pub fn check_lemmas(
    game_json: &str,
    partition_json: &str,
    trials: u32,
    steps: u32,
    seed: u32,
) -> Result<String, JsError> {
    to_json(api::check_lemmas(
        game_json,
        partition_json,
        trials as usize,
        u64::from(steps),
        u64::from(seed),
    ))
}
